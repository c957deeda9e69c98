#pragma once

// Scalar special functions: log-gamma, digamma, the incomplete gamma pair
// with regularized and log-space forms, gamma quantiles for both tails, and
// the s-derivative of the composition Gamma(1/s, x^s).
//
// All functions are pure and thread-safe. Domain violations throw
// std::domain_error.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ggn {

namespace detail {

inline void require(bool ok, const char* what) {
    if (!ok) throw std::domain_error(what);
}

}  // namespace detail

/// log Gamma(x) for x > 0 (Lanczos, g = 5.2421875, 14 coefficients).
inline double ln_gamma(double x) {
    detail::require(x > 0.0 && std::isfinite(x), "ln_gamma: requires x > 0");
    static const double cof[14] = {
        57.1562356658629235,     -59.5979603554754912,
        14.1360979747417471,     -0.491913816097620199,
        0.339946499848118887e-4, 0.465236289270485756e-4,
        -0.983744753048795646e-4, 0.158088703224912494e-3,
        -0.210264441724104883e-3, 0.217439618115212643e-3,
        -0.164318106536763890e-3, 0.844182239838527433e-4,
        -0.261908384015814087e-4, 0.368991826595316234e-5};
    double y = x;
    double tmp = x + 5.24218750000000000;
    tmp = (x + 0.5) * std::log(tmp) - tmp;
    double ser = 0.999999999999997092;
    for (int j = 0; j < 14; j++) ser += cof[j] / ++y;
    return tmp + std::log(2.5066282746310005 * ser / x);
}

/// digamma(x) = d/dx log Gamma(x), x > 0.
inline double digamma(double x) {
    detail::require(x > 0.0 && std::isfinite(x), "digamma: requires x > 0");
    double result = 0.0;
    while (x < 8.0) {  // shift up with psi(x) = psi(x+1) - 1/x
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    // asymptotic series with Bernoulli terms through x^-12
    result += std::log(x) - 0.5 * inv
        - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0
        - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    return result;
}

namespace detail {

// Regularized lower incomplete gamma by power series, x < a + 1.
inline double gamma_p_series(double a, double x) {
    if (x <= 0.0) return 0.0;
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 800; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - ln_gamma(a));
}

// Continued fraction (modified Lentz) for the upper tail; returns the CF
// value h with Q(a,x) = exp(-x + a log x - lnGamma(a)) * h, valid x >= a + 1.
inline double gamma_q_cf(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 2000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) break;
    }
    return h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x) = gamma(a,x)/Gamma(a).
inline double reg_lower_inc_gamma(double a, double x) {
    detail::require(a > 0.0 && std::isfinite(a), "reg_lower_inc_gamma: requires a > 0");
    detail::require(x >= 0.0, "reg_lower_inc_gamma: requires x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    double lq = -x + a * std::log(x) - ln_gamma(a);
    return 1.0 - std::exp(lq) * detail::gamma_q_cf(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a).
inline double reg_upper_inc_gamma(double a, double x) {
    detail::require(a > 0.0 && std::isfinite(a), "reg_upper_inc_gamma: requires a > 0");
    detail::require(x >= 0.0, "reg_upper_inc_gamma: requires x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return std::exp(-x + a * std::log(x) - ln_gamma(a)) * detail::gamma_q_cf(a, x);
}

/// log Q(a, x); stays finite far into the tail where Q underflows.
inline double log_reg_upper_inc_gamma(double a, double x) {
    detail::require(a > 0.0 && std::isfinite(a), "log_reg_upper_inc_gamma: requires a > 0");
    detail::require(x >= 0.0, "log_reg_upper_inc_gamma: requires x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return std::log1p(-detail::gamma_p_series(a, x));
    return -x + a * std::log(x) - ln_gamma(a) + std::log(detail::gamma_q_cf(a, x));
}

/// Upper incomplete gamma Gamma(a, x) (unregularized).
inline double upper_inc_gamma(double a, double x) {
    return reg_upper_inc_gamma(a, x) * std::exp(ln_gamma(a));
}

/// Q(a, e^lx) with the argument given in log space, usable when e^lx
/// under- or overflows (arises as |z|^s with large shape exponents).
inline double reg_upper_inc_gamma_ln(double a, double lx) {
    detail::require(a > 0.0 && std::isfinite(a), "reg_upper_inc_gamma_ln: requires a > 0");
    if (lx == -std::numeric_limits<double>::infinity()) return 1.0;
    if (lx > 700.0) return 0.0;
    if (lx < -690.0) {
        // x below the representable range: P = x^a / Gamma(a+1) + O(x^{a+1})
        const double e = a * lx - ln_gamma(a + 1.0);
        return e < -700.0 ? 1.0 : 1.0 - std::exp(e);
    }
    return reg_upper_inc_gamma(a, std::exp(lx));
}

/// log Q(a, e^lx); -inf when the tail is below double range entirely.
inline double log_reg_upper_inc_gamma_ln(double a, double lx) {
    detail::require(a > 0.0 && std::isfinite(a), "log_reg_upper_inc_gamma_ln: requires a > 0");
    if (lx == -std::numeric_limits<double>::infinity()) return 0.0;
    if (lx > 700.0) return -std::numeric_limits<double>::infinity();
    if (lx < -690.0) {
        const double e = a * lx - ln_gamma(a + 1.0);
        return e < -700.0 ? 0.0 : std::log1p(-std::exp(e));
    }
    return log_reg_upper_inc_gamma(a, std::exp(lx));
}

namespace detail {

// Inverse standard normal cdf (Acklam's rational approximation), used only
// as a quantile starting guess.
inline double normal_quantile(double p) {
    static const double a_[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b_[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
    static const double c_[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d_[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c_[0] * q + c_[1]) * q + c_[2]) * q + c_[3]) * q + c_[4]) * q + c_[5]) /
               ((((d_[0] * q + d_[1]) * q + d_[2]) * q + d_[3]) * q + 1.0);
    }
    if (p > phigh) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c_[0] * q + c_[1]) * q + c_[2]) * q + c_[3]) * q + c_[4]) * q + c_[5]) /
               ((((d_[0] * q + d_[1]) * q + d_[2]) * q + d_[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a_[0] * r + a_[1]) * r + a_[2]) * r + a_[3]) * r + a_[4]) * r + a_[5]) * q /
           (((((b_[0] * r + b_[1]) * r + b_[2]) * r + b_[3]) * r + b_[4]) * r + 1.0);
}

inline double gamma_log_pdf(double shape, double x) {
    return (shape - 1.0) * std::log(x) - x - ln_gamma(shape);
}

}  // namespace detail

/// Quantile of the unit-scale gamma distribution: x with P(shape, x) = p.
/// Newton iteration in p-space with a bisection safeguard; Wilson-Hilferty
/// starting guess. p = 0 maps to 0; p must lie in [0, 1).
inline double gamma_quantile(double shape, double p) {
    detail::require(shape > 0.0 && std::isfinite(shape), "gamma_quantile: requires shape > 0");
    detail::require(p >= 0.0 && p < 1.0, "gamma_quantile: requires p in [0,1)");
    if (p == 0.0) return 0.0;

    // Wilson-Hilferty; falls back to the small-shape series inversion when
    // the cube root goes nonpositive.
    double x;
    {
        const double z = detail::normal_quantile(p);
        const double t = 1.0 - 1.0 / (9.0 * shape) + z / (3.0 * std::sqrt(shape));
        if (t > 0.03) {
            x = shape * t * t * t;
        } else {
            x = std::exp((std::log(p) + ln_gamma(shape + 1.0)) / shape);
        }
    }
    if (!(x > 0.0) || !std::isfinite(x)) x = shape;

    // bracket [lo, hi] with P(lo) <= p <= P(hi)
    double lo = 0.0, hi = x;
    while (reg_lower_inc_gamma(shape, hi) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) break;
    }
    if (x <= lo || x >= hi) x = 0.5 * (lo + hi);

    for (int it = 0; it < 100; ++it) {
        const double f = reg_lower_inc_gamma(shape, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        if (std::fabs(f) <= 1e-14 * p) break;
        const double lpdf = detail::gamma_log_pdf(shape, x);
        double step;
        if (lpdf < -700.0) {
            step = 0.0;  // derivative underflow; bisection takes over
        } else {
            step = f / std::exp(lpdf);
        }
        double xn = x - step;
        if (!(xn > lo && xn < hi) || step == 0.0) xn = 0.5 * (lo + hi);
        if (xn == x) break;
        x = xn;
    }
    return x;
}

/// Upper-tail gamma quantile: x with Q(shape, x) = q, accurate for tiny q.
/// Newton on log Q; q in (0, 1].
inline double gamma_quantile_upper(double shape, double q) {
    detail::require(shape > 0.0 && std::isfinite(shape), "gamma_quantile_upper: requires shape > 0");
    detail::require(q > 0.0 && q <= 1.0, "gamma_quantile_upper: requires q in (0,1]");
    if (q == 1.0) return 0.0;
    if (q >= 1e-10) return gamma_quantile(shape, 1.0 - q);

    const double lq = std::log(q);
    // asymptotic start:  Q ~ x^(a-1) e^-x / Gamma(a)  =>  x ~ -lq + (a-1) log x
    double x = -lq;
    for (int i = 0; i < 4; ++i) x = -lq + (shape - 1.0) * std::log(std::max(x, 1e-12)) - ln_gamma(shape);
    if (!(x > 0.0)) x = -lq + shape;
    for (int it = 0; it < 60; ++it) {
        const double lQ = log_reg_upper_inc_gamma(shape, x);
        const double f = lQ - lq;
        if (std::fabs(f) < 1e-12) break;
        // d(log Q)/dx = -pdf/Q
        const double dlq = -std::exp(detail::gamma_log_pdf(shape, x) - lQ);
        double xn = x - f / dlq;
        if (!(xn > 0.0) || !std::isfinite(xn)) xn = 0.5 * x;
        if (xn == x) break;
        x = xn;
    }
    return x;
}

namespace detail {

// continued fraction for the regularized incomplete beta (modified Lentz)
inline double betacf(double a, double b, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) break;
    }
    return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b) (cdf of the beta distribution).
inline double reg_inc_beta(double a, double b, double x) {
    detail::require(a > 0.0 && b > 0.0, "reg_inc_beta: requires a, b > 0");
    detail::require(x >= 0.0 && x <= 1.0, "reg_inc_beta: requires x in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double lbeta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::betacf(a, b, x) / a;
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

/// d/ds Gamma(1/s, x^s) for s > 0 and x > 0, by central differences with a
/// relative step and one Richardson refinement.
inline double upper_inc_gamma_s_derivative(double s, double x) {
    detail::require(s > 0.0 && std::isfinite(s), "upper_inc_gamma_s_derivative: requires s > 0");
    detail::require(x > 0.0 && std::isfinite(x), "upper_inc_gamma_s_derivative: requires x > 0");
    auto g = [x](double ss) { return upper_inc_gamma(1.0 / ss, std::pow(x, ss)); };
    const double h = 1e-4 * std::max(s, 0.25);
    const double d1 = (g(s + h) - g(s - h)) / (2.0 * h);
    const double d2 = (g(s + 0.5 * h) - g(s - 0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace ggn
