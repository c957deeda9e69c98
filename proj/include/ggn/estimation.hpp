#pragma once

// Maximum likelihood machinery: GGN log-likelihood, analytic score, the
// four-parameter GGN fit, and two-parameter gamma/beta baseline fits used
// for model comparison.  Optimization runs in an unconstrained
// reparameterization (positive parameters in log space): a derivative-free
// simplex phase followed by a quasi-Newton polish on the analytic score.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "ggn/ggn_dist.hpp"
#include "ggn/sample.hpp"
#include "ggn/specfun.hpp"

namespace ggn {

enum class ModelTag { GGN, GAMMA, BETA };

inline const char* to_string(ModelTag m) {
    switch (m) {
        case ModelTag::GGN: return "ggn";
        case ModelTag::GAMMA: return "gamma";
        case ModelTag::BETA: return "beta";
    }
    return "?";
}

struct FitResult {
    ModelTag model_tag = ModelTag::GGN;
    std::vector<double> estimates;
    std::vector<double> std_errors;  // NaN entries when unavailable
    bool std_errors_available = false;
    double loglik = -std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
    std::size_t n_obs = 0;
};

struct FitOptions {
    int max_iterations = 600;          // simplex iterations
    double f_tolerance = 1e-11;        // simplex spread, relative
    double gradient_tolerance = 1e-5;  // per-observation score scale
    bool compute_std_errors = true;
};

// ---------------------------------------------------------------------------
// log-likelihood and score
// ---------------------------------------------------------------------------

/// Sum of Eq.-style per-observation log densities; -infinity when any
/// observation lands where the log-power term is invalid.
inline double ggn_loglik(const GgnParams& p, const Sample& data) {
    p.validate();
    double sum = 0.0;
    for (double x : data.values) {
        const double l = ggn_log_pdf(p, x);
        if (!std::isfinite(l)) return -std::numeric_limits<double>::infinity();
        sum += l;
    }
    return sum;
}

struct ScoreResult {
    std::array<double, 4> u{};  // d/d(mu, sigma, s, a)
    bool singular = false;      // some x_i == mu with s < 1
};

/// Analytic score of the GGN log-likelihood, summed over observations.
/// sign(0) is taken as 0, so ties x = mu contribute nothing for s >= 1;
/// with s < 1 a tie is flagged singular instead.
inline ScoreResult ggn_score(const GgnParams& p, const Sample& data) {
    p.validate();
    ScoreResult out;
    const double s = p.s, a = p.a, sigma = p.sigma;
    const double psi_inv_s = digamma(1.0 / s);
    const double ga_inv_s = std::exp(ln_gamma(1.0 / s));
    for (double x : data.values) {
        const double z = (x - p.mu) / sigma;
        const double az = std::fabs(z);
        const double sgn = (z > 0.0) ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
        if (z == 0.0 && s < 1.0) {
            out.singular = true;
            continue;
        }
        const double az_pow_s = detail::abs_pow(z, s);          // |z|^s
        const double az_pow_sm1 = (z == 0.0) ? 0.0 : std::exp((s - 1.0) * std::log(az));

        const double lsf = std_gn_log_sf(s, z);   // log(1 - Phi)
        const double t = -lsf;                    // -log(1 - Phi) > 0
        // phi / ((1 - Phi) * t), via logs for tail safety
        const double ratio = std::exp(std_gn_log_pdf(s, z) - lsf - std::log(t));

        // d/dmu
        out.u[0] += (s / sigma) * sgn * az_pow_sm1 - (a - 1.0) / sigma * ratio;
        // d/dsigma
        out.u[1] += (s / sigma) * az_pow_s - 1.0 / sigma - (a - 1.0) * z / sigma * ratio;
        // d/ds
        {
            const double dlogphi = 1.0 / s + psi_inv_s / (s * s)
                - ((z == 0.0) ? 0.0 : az_pow_s * std::log(az));
            double dPhi;
            if (z == 0.0) {
                dPhi = 0.0;
            } else {
                const double psit = upper_inc_gamma_s_derivative(s, az);
                const double gupper = ga_inv_s * reg_upper_inc_gamma_ln(1.0 / s, s * std::log(az));
                const double mag = (psit + psi_inv_s * gupper / (s * s)) / (2.0 * ga_inv_s);
                dPhi = (z <= 0.0) ? mag : -mag;
            }
            const double denom_ratio = dPhi / (std::exp(lsf) * t);
            out.u[2] += dlogphi + (a - 1.0) * denom_ratio;
        }
        // d/da
        out.u[3] += std::log(t) - digamma(a);
    }
    return out;
}

// ---------------------------------------------------------------------------
// generic optimizers (detail)
// ---------------------------------------------------------------------------

namespace detail {

using ObjFn = std::function<double(const std::vector<double>&)>;
using GradFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct MinimizeResult {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead with standard reflection/expansion/contraction coefficients.
inline MinimizeResult nelder_mead(const ObjFn& f, const std::vector<double>& x0,
                                  const std::vector<double>& scale, int max_iter,
                                  double ftol) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += scale[i];
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> p2;
        std::vector<double> f2;
        for (auto i : idx) {
            p2.push_back(pts[i]);
            f2.push_back(fv[i]);
        }
        pts.swap(p2);
        fv.swap(f2);
    };
    order();

    MinimizeResult res;
    int it = 0;
    for (; it < max_iter; ++it) {
        if (std::fabs(fv[n] - fv[0]) <= ftol * (std::fabs(fv[0]) + 1.0)) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / n;
        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + coef * (pts[n][d] - centroid[d]);
            return p;
        };
        const auto xr = blend(-1.0);
        const double fr = f(xr);
        if (fr < fv[0]) {
            const auto xe = blend(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                pts[n] = xe;
                fv[n] = fe;
            } else {
                pts[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            pts[n] = xr;
            fv[n] = fr;
        } else {
            const auto xc = blend(fr < fv[n] ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fv[n])) {
                pts[n] = xc;
                fv[n] = fc;
            } else {  // shrink toward the best point
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t d = 0; d < n; ++d)
                        pts[i][d] = pts[0][d] + 0.5 * (pts[i][d] - pts[0][d]);
                    fv[i] = f(pts[i]);
                }
            }
        }
        order();
    }
    res.x = pts[0];
    res.f = fv[0];
    res.iterations = it;
    return res;
}

// BFGS with backtracking Armijo line search.
inline MinimizeResult bfgs(const ObjFn& f, const GradFn& grad, const std::vector<double>& x0,
                           double gtol, int max_iter) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) H[i][i] = 1.0;
    std::vector<double> x = x0;
    double fx = f(x);
    std::vector<double> g = grad(x);
    MinimizeResult res;
    int it = 0;
    for (; it < max_iter; ++it) {
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::fabs(v));
        if (gmax <= gtol) {
            res.converged = true;
            break;
        }
        std::vector<double> d(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i] -= H[i][j] * g[j];
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += d[i] * g[i];
        if (slope >= 0.0) {  // reset to steepest descent
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) H[i][j] = (i == j) ? 1.0 : 0.0;
                d[i] = -g[i];
            }
            slope = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
        }
        double step = 1.0;
        std::vector<double> xn(n);
        double fn = std::numeric_limits<double>::infinity();
        bool ok = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * d[i];
            fn = f(xn);
            if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if (!ok) break;
        const auto gn = grad(xn);
        std::vector<double> sk(n), yk(n);
        for (std::size_t i = 0; i < n; ++i) {
            sk[i] = xn[i] - x[i];
            yk[i] = gn[i] - g[i];
        }
        double ys = std::inner_product(yk.begin(), yk.end(), sk.begin(), 0.0);
        if (ys > 1e-12) {
            // BFGS inverse update
            const double rho = 1.0 / ys;
            std::vector<double> Hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i][j] * yk[j];
            const double yHy = std::inner_product(yk.begin(), yk.end(), Hy.begin(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    H[i][j] += (1.0 + rho * yHy) * rho * sk[i] * sk[j]
                        - rho * (sk[i] * Hy[j] + Hy[i] * sk[j]);
                }
            }
        }
        x = xn;
        fx = fn;
        g = gn;
    }
    res.x = x;
    res.f = fx;
    res.iterations = it;
    return res;
}

// central-difference Hessian with per-coordinate relative step
inline std::vector<std::vector<double>> numeric_hessian(const ObjFn& f, const std::vector<double>& x,
                                                        double rel_step) {
    const std::size_t n = x.size();
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = rel_step * std::max(1.0, std::fabs(x[i]));
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    const double f0 = f(x);
    for (std::size_t i = 0; i < n; ++i) {
        auto xp = x, xm = x;
        xp[i] += h[i];
        xm[i] -= h[i];
        H[i][i] = (f(xp) - 2.0 * f0 + f(xm)) / (h[i] * h[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            auto xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h[i]; xpp[j] += h[j];
            xpm[i] += h[i]; xpm[j] -= h[j];
            xmp[i] -= h[i]; xmp[j] += h[j];
            xmm[i] -= h[i]; xmm[j] -= h[j];
            H[i][j] = H[j][i] = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h[i] * h[j]);
        }
    }
    return H;
}

// invert a small SPD-expected matrix by Gauss-Jordan; false when singular
inline bool invert_matrix(std::vector<std::vector<double>> A, std::vector<std::vector<double>>& out) {
    const std::size_t n = A.size();
    out.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) out[i][i] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
        if (std::fabs(A[piv][c]) < 1e-300) return false;
        std::swap(A[piv], A[c]);
        std::swap(out[piv], out[c]);
        const double d = A[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            A[c][j] /= d;
            out[c][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double m = A[r][c];
            if (m == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                A[r][j] -= m * A[c][j];
                out[r][j] -= m * out[c][j];
            }
        }
    }
    return true;
}

inline double sample_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double sample_sd(const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / std::max<std::size_t>(1, v.size() - 1));
}

// shared post-optimum bookkeeping: std errors from the observed information
// in the reparameterized coordinates, delta-method transformed back
inline void finish_fit(FitResult& fit, const ObjFn& negloglik, const std::vector<double>& theta,
                       const std::vector<double>& jac_diag, bool want_se) {
    fit.std_errors.assign(theta.size(), std::numeric_limits<double>::quiet_NaN());
    fit.std_errors_available = false;
    if (!want_se) return;
    const auto H = numeric_hessian(negloglik, theta, 1e-4);  // of -loglik: observed info
    std::vector<std::vector<double>> cov;
    if (!invert_matrix(H, cov)) return;
    bool ok = true;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double v = cov[i][i] * jac_diag[i] * jac_diag[i];
        if (!(v > 0.0) || !std::isfinite(v)) {
            ok = false;
            break;
        }
        fit.std_errors[i] = std::sqrt(v);
    }
    fit.std_errors_available = ok;
    if (!ok)
        fit.std_errors.assign(theta.size(), std::numeric_limits<double>::quiet_NaN());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// fits
// ---------------------------------------------------------------------------

/// Four-parameter GGN maximum likelihood fit.
inline FitResult fit_ggn(const Sample& data, const FitOptions& options = {}) {
    data.validate_for_fit();
    FitResult fit;
    fit.model_tag = ModelTag::GGN;
    fit.n_obs = data.size();
    fit.estimates.assign(4, std::numeric_limits<double>::quiet_NaN());

    const double med = detail::sample_median(data.values);
    std::vector<double> absdev;
    absdev.reserve(data.size());
    for (double x : data.values) absdev.push_back(std::fabs(x - med));
    double sigma0 = 1.4826 * detail::sample_median(absdev);
    if (!(sigma0 > 0.0)) sigma0 = detail::sample_sd(data.values);
    if (!(sigma0 > 0.0)) return fit;  // degenerate constant sample

    auto unpack = [](const std::vector<double>& th) {
        return GgnParams{th[0], std::exp(th[1]), std::exp(th[2]), std::exp(th[3])};
    };
    auto neg = [&](const std::vector<double>& th) {
        if (std::fabs(th[1]) > 300.0 || std::fabs(th[2]) > 6.0 || std::fabs(th[3]) > 30.0)
            return 1e300;
        const double l = ggn_loglik(unpack(th), data);
        return std::isfinite(l) ? -l : 1e300;
    };

    const std::vector<double> th0{med, std::log(sigma0), std::log(2.0), 0.0};
    const std::vector<double> scale{0.4 * sigma0, 0.35, 0.35, 0.35};
    auto nm = detail::nelder_mead(neg, th0, scale, options.max_iterations, options.f_tolerance);

    // quasi-Newton polish on the analytic score; an exact tie x = mu with
    // s < 1 makes the score singular, in which case the simplex result stands
    const double n = static_cast<double>(data.size());
    auto grad = [&](const std::vector<double>& th) {
        const auto p = unpack(th);
        const auto sc = ggn_score(p, data);
        // chain rule through the log reparameterization
        return std::vector<double>{-sc.u[0], -sc.u[1] * p.sigma, -sc.u[2] * p.s, -sc.u[3] * p.a};
    };
    auto polished = nm;
    if (!ggn_score(unpack(nm.x), data).singular) {
        auto b = detail::bfgs(neg, grad, nm.x, options.gradient_tolerance * n, 200);
        if (b.f <= nm.f) polished = b;
        polished.iterations = nm.iterations + b.iterations;
        polished.converged = b.converged || nm.converged;
    }

    const auto p = unpack(polished.x);
    fit.estimates = {p.mu, p.sigma, p.s, p.a};
    fit.loglik = -polished.f;
    fit.iterations = polished.iterations;
    fit.converged = polished.converged && std::isfinite(fit.loglik);
    detail::finish_fit(fit, neg, polished.x, {1.0, p.sigma, p.s, p.a},
                       options.compute_std_errors && fit.converged);
    return fit;
}

/// Two-parameter gamma fit (shape alpha, rate beta); requires positive data.
inline FitResult fit_gamma(const Sample& data, const FitOptions& options = {}) {
    data.validate_for_fit();
    for (double x : data.values)
        if (!(x > 0.0)) throw std::domain_error("fit_gamma: data must be positive");
    FitResult fit;
    fit.model_tag = ModelTag::GAMMA;
    fit.n_obs = data.size();
    fit.estimates.assign(2, std::numeric_limits<double>::quiet_NaN());

    const double n = static_cast<double>(data.size());
    const double mean = std::accumulate(data.values.begin(), data.values.end(), 0.0) / n;
    const double sd = detail::sample_sd(data.values);
    if (!(sd > 0.0)) return fit;  // degenerate
    double sumlog = 0.0;
    for (double x : data.values) sumlog += std::log(x);

    auto neg = [&](const std::vector<double>& th) {
        if (std::fabs(th[0]) > 30.0 || std::fabs(th[1]) > 300.0) return 1e300;
        const double alpha = std::exp(th[0]), beta = std::exp(th[1]);
        double sum = n * (alpha * std::log(beta) - ln_gamma(alpha));
        sum += (alpha - 1.0) * sumlog - beta * mean * n;
        return -sum;
    };
    auto grad = [&](const std::vector<double>& th) {
        const double alpha = std::exp(th[0]), beta = std::exp(th[1]);
        const double dalpha = sumlog + n * (std::log(beta) - digamma(alpha));
        const double dbeta = n * alpha / beta - mean * n;
        return std::vector<double>{-dalpha * alpha, -dbeta * beta};
    };
    const double a0 = std::max(1e-3, mean * mean / (sd * sd));
    const std::vector<double> th0{std::log(a0), std::log(a0 / mean)};
    auto nm = detail::nelder_mead(neg, th0, {0.3, 0.3}, options.max_iterations, options.f_tolerance);
    auto b = detail::bfgs(neg, grad, nm.x, options.gradient_tolerance * n, 200);
    const auto& best = (b.f <= nm.f) ? b : nm;

    fit.estimates = {std::exp(best.x[0]), std::exp(best.x[1])};
    fit.loglik = -best.f;
    fit.iterations = nm.iterations + b.iterations;
    fit.converged = (b.converged || nm.converged) && std::isfinite(fit.loglik);
    detail::finish_fit(fit, neg, best.x, {fit.estimates[0], fit.estimates[1]},
                       options.compute_std_errors && fit.converged);
    return fit;
}

/// Two-parameter beta fit; requires data in the open unit interval.
inline FitResult fit_beta(const Sample& data, const FitOptions& options = {}) {
    data.validate_for_fit();
    for (double x : data.values)
        if (!(x > 0.0 && x < 1.0))
            throw std::domain_error("fit_beta: data must lie strictly inside (0,1)");
    FitResult fit;
    fit.model_tag = ModelTag::BETA;
    fit.n_obs = data.size();
    fit.estimates.assign(2, std::numeric_limits<double>::quiet_NaN());

    const double n = static_cast<double>(data.size());
    const double mean = std::accumulate(data.values.begin(), data.values.end(), 0.0) / n;
    const double sd = detail::sample_sd(data.values);
    if (!(sd > 0.0)) return fit;
    double sumlog = 0.0, sumlog1m = 0.0;
    for (double x : data.values) {
        sumlog += std::log(x);
        sumlog1m += std::log1p(-x);
    }
    auto neg = [&](const std::vector<double>& th) {
        if (std::fabs(th[0]) > 30.0 || std::fabs(th[1]) > 30.0) return 1e300;
        const double alpha = std::exp(th[0]), beta = std::exp(th[1]);
        const double lnB = ln_gamma(alpha) + ln_gamma(beta) - ln_gamma(alpha + beta);
        return -((alpha - 1.0) * sumlog + (beta - 1.0) * sumlog1m - n * lnB);
    };
    auto grad = [&](const std::vector<double>& th) {
        const double alpha = std::exp(th[0]), beta = std::exp(th[1]);
        const double psiab = digamma(alpha + beta);
        const double dalpha = sumlog - n * (digamma(alpha) - psiab);
        const double dbeta = sumlog1m - n * (digamma(beta) - psiab);
        return std::vector<double>{-dalpha * alpha, -dbeta * beta};
    };
    // moment-matching start
    const double v = sd * sd;
    const double common = std::max(0.1, mean * (1.0 - mean) / v - 1.0);
    const std::vector<double> th0{std::log(std::max(0.05, mean * common)),
                                  std::log(std::max(0.05, (1.0 - mean) * common))};
    auto nm = detail::nelder_mead(neg, th0, {0.3, 0.3}, options.max_iterations, options.f_tolerance);
    auto b = detail::bfgs(neg, grad, nm.x, options.gradient_tolerance * n, 200);
    const auto& best = (b.f <= nm.f) ? b : nm;

    fit.estimates = {std::exp(best.x[0]), std::exp(best.x[1])};
    fit.loglik = -best.f;
    fit.iterations = nm.iterations + b.iterations;
    fit.converged = (b.converged || nm.converged) && std::isfinite(fit.loglik);
    detail::finish_fit(fit, neg, best.x, {fit.estimates[0], fit.estimates[1]},
                       options.compute_std_errors && fit.converged);
    return fit;
}

}  // namespace ggn
