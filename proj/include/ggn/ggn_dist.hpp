#pragma once

// The gamma generalized normal (GGN) distribution with parameters
// (mu, sigma, s, a).  a = 1 recovers the GN baseline; (s, a) = (2, 1) is
// normal with variance sigma^2/2 and (s, a) = (1, 1) is Laplace.

#include <cmath>

#include "ggn/gn.hpp"
#include "ggn/specfun.hpp"

namespace ggn {

struct GgnParams {
    double mu = 0.0;
    double sigma = 1.0;
    double s = 2.0;
    double a = 1.0;

    void validate() const {
        detail::require(std::isfinite(mu), "GgnParams: mu must be finite");
        detail::require(sigma > 0.0 && std::isfinite(sigma), "GgnParams: sigma must be > 0");
        detail::require(s > 0.0 && std::isfinite(s), "GgnParams: s must be > 0");
        detail::require(a > 0.0 && std::isfinite(a), "GgnParams: a must be > 0");
    }

    GnParams baseline() const { return GnParams{mu, sigma, s}; }
};

/// t(z) = -log(1 - Phi_s(z)), the gamma-G transform of the baseline cdf.
/// Computed through the log-sf path so the upper tail keeps full magnitude.
inline double ggn_log_transform(double s, double z) {
    return -std_gn_log_sf(s, z);
}

/// log density.  Returns -inf when the log-power term underflows (deep lower
/// tail with a > 1, where the true density underflows anyway).
inline double ggn_log_pdf(const GgnParams& p, double x) {
    p.validate();
    const double z = (x - p.mu) / p.sigma;
    const double t = ggn_log_transform(p.s, z);
    if (t <= 0.0) {  // 1 - Phi underflowed to 1, i.e. Phi underflowed to 0
        return -std::numeric_limits<double>::infinity();
    }
    return std_gn_log_pdf(p.s, z) - std::log(p.sigma) - ln_gamma(p.a)
        + (p.a - 1.0) * std::log(t);
}

inline double ggn_pdf(const GgnParams& p, double x) {
    const double l = ggn_log_pdf(p, x);
    return std::isfinite(l) ? std::exp(l) : 0.0;
}

/// F(x) = gamma1(a, -log(1 - Phi_s(z))).
inline double ggn_cdf(const GgnParams& p, double x) {
    p.validate();
    const double z = (x - p.mu) / p.sigma;
    const double t = ggn_log_transform(p.s, z);
    if (t <= 0.0) return 0.0;
    return reg_lower_inc_gamma(p.a, t);
}

/// Baseline quantile evaluated through a Gamma(a,1) draw z; shared by the
/// quantile (z = gamma_quantile(a, u)) and the sampler.  Branches at
/// z = log 2, where both forms give x = mu.
inline double gn_quantile_from_gamma_draw(const GnParams& p, double z) {
    if (z <= M_LN2) {
        // complement of 2 e^-z - 1, kept accurate for z near 0
        const double q = -2.0 * std::expm1(-z);
        if (q <= 0.0) return -std::numeric_limits<double>::infinity();
        return p.mu - p.sigma * std::pow(gamma_quantile_upper(1.0 / p.s, q), 1.0 / p.s);
    }
    const double q = 2.0 * std::exp(-z);  // Q-target in (0, 1)
    return p.mu + p.sigma * std::pow(gamma_quantile_upper(1.0 / p.s, q), 1.0 / p.s);
}

inline double ggn_quantile(const GgnParams& p, double u) {
    p.validate();
    detail::require(u > 0.0 && u < 1.0, "ggn_quantile: requires u in (0,1)");
    return gn_quantile_from_gamma_draw(p.baseline(), gamma_quantile(p.a, u));
}

/// Density of the s -> infinity limit law on [mu - sigma, mu + sigma]
/// (the gamma-uniform law); zero outside.
inline double ggn_limit_pdf(double mu, double sigma, double a, double x) {
    detail::require(sigma > 0.0, "ggn_limit_pdf: requires sigma > 0");
    detail::require(a > 0.0, "ggn_limit_pdf: requires a > 0");
    const double z = (x - mu) / sigma;
    if (z < -1.0 || z > 1.0) return 0.0;
    const double g = -std::log1p(-(0.5 + 0.5 * z));
    return std::pow(g, a - 1.0) / (2.0 * sigma * std::exp(ln_gamma(a)));
}

}  // namespace ggn
