#pragma once

// Goodness-of-fit statistics: symmetrized KL and chi-square divergences over
// a binned empirical density, the Kolmogorov-Smirnov / Cramer-von Mises /
// Anderson-Darling ecdf statistics (with the standard small-sample
// modification factors), and the AIC/AICc/BIC information criteria.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ggn/sample.hpp"
#include "ggn/specfun.hpp"

namespace ggn {

struct BinnedDensity {
    std::vector<double> edges;    // bin_count + 1
    std::vector<double> centers;  // bin_count
    std::vector<double> density;  // normalized: sum(density * width) = 1
    std::vector<std::size_t> counts;
    std::string method;  // "freedman-diaconis", "sqrt-n" or "fixed"

    std::size_t bin_count() const { return density.size(); }
};

/// Histogram density, normalized to integrate to one.  bins = 0 selects the
/// Freedman-Diaconis rule with a sqrt(n) fallback when the IQR vanishes.
inline BinnedDensity empirical_density(const Sample& data, std::size_t bins = 0) {
    if (data.size() < 20)
        throw std::domain_error("empirical_density: need at least 20 observations");
    std::vector<double> v = data.values;
    std::sort(v.begin(), v.end());
    const double lo = v.front(), hi = v.back();
    if (!(hi > lo)) throw std::domain_error("empirical_density: degenerate sample");
    const double n = static_cast<double>(v.size());

    BinnedDensity out;
    if (bins == 0) {
        const double q1 = v[static_cast<std::size_t>(0.25 * (v.size() - 1))];
        const double q3 = v[static_cast<std::size_t>(0.75 * (v.size() - 1))];
        const double iqr = q3 - q1;
        if (iqr > 0.0) {
            const double h = 2.0 * iqr / std::cbrt(n);
            bins = static_cast<std::size_t>(std::ceil((hi - lo) / h));
            out.method = "freedman-diaconis";
        } else {
            bins = static_cast<std::size_t>(std::ceil(std::sqrt(n)));
            out.method = "sqrt-n";
        }
        bins = std::max<std::size_t>(1, std::min<std::size_t>(bins, 100000));
    } else {
        out.method = "fixed";
    }

    const double width = (hi - lo) / static_cast<double>(bins);
    out.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) out.edges[i] = lo + width * static_cast<double>(i);
    out.edges.back() = hi;
    out.counts.assign(bins, 0);
    for (double x : v) {
        auto idx = static_cast<std::size_t>((x - lo) / width);
        if (idx >= bins) idx = bins - 1;  // right edge inclusive
        ++out.counts[idx];
    }
    out.centers.resize(bins);
    out.density.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        out.centers[i] = lo + width * (static_cast<double>(i) + 0.5);
        out.density[i] = static_cast<double>(out.counts[i]) / (n * width);
    }
    return out;
}

/// Symmetrized Kullback-Leibler divergence between model density values f_i
/// and the binned density P_i, summed over occupied bins.  f and P must be
/// aligned; zero model density over an occupied bin is an error.
inline double sym_kl(const std::vector<double>& f, const std::vector<double>& P) {
    if (f.size() != P.size()) throw std::invalid_argument("sym_kl: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (P[i] <= 0.0) continue;  // empty bin: excluded
        if (!(f[i] > 0.0))
            throw std::domain_error("sym_kl: model density vanishes on an occupied bin");
        sum += f[i] * std::log(f[i] / P[i]) + P[i] * std::log(P[i] / f[i]);
    }
    return sum;
}

/// Symmetrized chi-square divergence over occupied bins.
inline double sym_chi2(const std::vector<double>& f, const std::vector<double>& P) {
    if (f.size() != P.size()) throw std::invalid_argument("sym_chi2: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (P[i] <= 0.0) continue;
        if (!(f[i] > 0.0))
            throw std::domain_error("sym_chi2: model density vanishes on an occupied bin");
        const double d = f[i] - P[i];
        sum += d * d / f[i] + d * d / P[i];
    }
    return sum;
}

/// Kolmogorov-Smirnov statistic against a model cdf.
inline double ks_stat(const Sample& data, const std::function<double(double)>& cdf) {
    if (data.size() < 1) throw std::domain_error("ks_stat: empty sample");
    std::vector<double> v = data.values;
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double F = cdf(v[i]);
        d = std::max(d, std::max(std::fabs((i + 1) / n - F), std::fabs(F - i / n)));
    }
    return d;
}

namespace detail {

inline double clamp_unit(double F, int& clamps) {
    const double lo = std::numeric_limits<double>::min();
    const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    if (F < lo) {
        ++clamps;
        return lo;
    }
    if (F > hi) {
        ++clamps;
        return hi;
    }
    return F;
}

}  // namespace detail

/// Cramer-von Mises W* with the small-sample modification (1 + 0.5/n).
inline double cvm_stat(const Sample& data, const std::function<double(double)>& cdf,
                       int* boundary_clamps = nullptr) {
    if (data.size() < 1) throw std::domain_error("cvm_stat: empty sample");
    std::vector<double> v = data.values;
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    int clamps = 0;
    double w2 = 1.0 / (12.0 * n);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double F = detail::clamp_unit(cdf(v[i]), clamps);
        const double d = F - (2.0 * (i + 1) - 1.0) / (2.0 * n);
        w2 += d * d;
    }
    if (boundary_clamps) *boundary_clamps += clamps;
    return w2 * (1.0 + 0.5 / n);
}

/// Anderson-Darling A* with the small-sample modification
/// (1 + 0.75/n + 2.25/n^2).
inline double ad_stat(const Sample& data, const std::function<double(double)>& cdf,
                      int* boundary_clamps = nullptr) {
    if (data.size() < 1) throw std::domain_error("ad_stat: empty sample");
    std::vector<double> v = data.values;
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    int clamps = 0;
    std::vector<double> F(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) F[i] = detail::clamp_unit(cdf(v[i]), clamps);
    double a2 = -n;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double w = 2.0 * (i + 1) - 1.0;
        a2 -= w * (std::log(F[i]) + std::log1p(-F[v.size() - 1 - i])) / n;
    }
    if (boundary_clamps) *boundary_clamps += clamps;
    return a2 * (1.0 + 0.75 / n + 2.25 / (n * n));
}

struct InfoCriteria {
    double aic = 0.0;
    double aicc = std::numeric_limits<double>::quiet_NaN();
    double bic = 0.0;
    bool aicc_defined = false;
};

/// AIC, corrected AIC and BIC from a log-likelihood.
inline InfoCriteria info_criteria(double loglik, int k, std::size_t n) {
    detail::require(k >= 1, "info_criteria: requires k >= 1");
    detail::require(n >= 1, "info_criteria: requires n >= 1");
    InfoCriteria out;
    out.aic = -2.0 * loglik + 2.0 * k;
    out.bic = -2.0 * loglik + k * std::log(static_cast<double>(n));
    if (n > static_cast<std::size_t>(k) + 1) {
        out.aicc = out.aic + 2.0 * k * (k + 1.0) / (static_cast<double>(n) - k - 1.0);
        out.aicc_defined = true;
    }
    return out;
}

/// The eight statistics for one (model, sample) pair, plus the binning
/// descriptor that makes the divergence numbers auditable.
struct GofReport {
    double d_kl = 0.0;
    double d_chi2 = 0.0;
    double d_ks = 0.0;
    double w_star = 0.0;
    double a_star = 0.0;
    double aic = 0.0;
    double aicc = std::numeric_limits<double>::quiet_NaN();
    double bic = 0.0;
    bool aicc_defined = false;
    std::size_t n_obs = 0;
    int k_params = 0;
    // binning descriptor
    std::string binning_method;
    std::size_t bin_count = 0;
    std::vector<double> bin_edges;
    std::size_t excluded_empty_bins = 0;
    int boundary_clamps = 0;
    std::string modification =
        "W*=W2*(1+0.5/n); A*=A2*(1+0.75/n+2.25/n^2)";
};

inline GofReport make_gof_report(const Sample& data, const std::function<double(double)>& pdf,
                                 const std::function<double(double)>& cdf, double loglik,
                                 int k_params, std::size_t bins = 0) {
    const auto hist = empirical_density(data, bins);
    std::vector<double> f(hist.bin_count()), P(hist.bin_count());
    std::size_t empty = 0;
    for (std::size_t i = 0; i < hist.bin_count(); ++i) {
        P[i] = hist.density[i];
        f[i] = pdf(hist.centers[i]);
        if (hist.counts[i] == 0) ++empty;
    }
    GofReport r;
    r.d_kl = sym_kl(f, P);
    r.d_chi2 = sym_chi2(f, P);
    r.d_ks = ks_stat(data, cdf);
    r.w_star = cvm_stat(data, cdf, &r.boundary_clamps);
    r.a_star = ad_stat(data, cdf, &r.boundary_clamps);
    const auto ic = info_criteria(loglik, k_params, data.size());
    r.aic = ic.aic;
    r.aicc = ic.aicc;
    r.bic = ic.bic;
    r.aicc_defined = ic.aicc_defined;
    r.n_obs = data.size();
    r.k_params = k_params;
    r.binning_method = hist.method;
    r.bin_count = hist.bin_count();
    r.bin_edges = hist.edges;
    r.excluded_empty_bins = empty;
    return r;
}

}  // namespace ggn
