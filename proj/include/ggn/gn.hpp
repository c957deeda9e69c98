#pragma once

// Baseline generalized normal (GN) distribution with location mu, dispersion
// sigma and shape s.  s = 1 is Laplace(mu, sigma); s = 2 is normal with mean
// mu and variance sigma^2/2.

#include <cmath>

#include "ggn/specfun.hpp"

namespace ggn {

struct GnParams {
    double mu = 0.0;
    double sigma = 1.0;
    double s = 2.0;

    void validate() const {
        detail::require(std::isfinite(mu), "GnParams: mu must be finite");
        detail::require(sigma > 0.0 && std::isfinite(sigma), "GnParams: sigma must be > 0");
        detail::require(s > 0.0 && std::isfinite(s), "GnParams: s must be > 0");
    }
};

namespace detail {

// |z|^s with an explicit zero branch so fractional s never sees log(0).
inline double abs_pow(double z, double s) {
    const double az = std::fabs(z);
    if (az == 0.0) return 0.0;
    return std::exp(s * std::log(az));
}

}  // namespace detail

/// log of the standardized GN density phi_s(z) = s/(2 Gamma(1/s)) exp(-|z|^s).
inline double std_gn_log_pdf(double s, double z) {
    return std::log(s) - std::log(2.0) - ln_gamma(1.0 / s) - detail::abs_pow(z, s);
}

inline double std_gn_pdf(double s, double z) {
    return std::exp(std_gn_log_pdf(s, z));
}

/// Standardized GN cdf Phi_s(z); exact 1/2 at z = 0.  The incomplete gamma
/// argument |z|^s is passed in log space so that large s cannot underflow it.
inline double std_gn_cdf(double s, double z) {
    if (z == 0.0) return 0.5;
    const double lx = s * std::log(std::fabs(z));
    const double q = reg_upper_inc_gamma_ln(1.0 / s, lx);
    return z < 0.0 ? 0.5 * q : 1.0 - 0.5 * q;
}

/// Survival function 1 - Phi_s(z), accurate in the upper tail.
inline double std_gn_sf(double s, double z) {
    if (z == 0.0) return 0.5;
    const double lx = s * std::log(std::fabs(z));
    const double q = reg_upper_inc_gamma_ln(1.0 / s, lx);
    return z > 0.0 ? 0.5 * q : 1.0 - 0.5 * q;
}

/// log(1 - Phi_s(z)); stays finite for |z| far beyond where the sf underflows.
inline double std_gn_log_sf(double s, double z) {
    if (z == 0.0) return -M_LN2;
    const double lx = s * std::log(std::fabs(z));
    if (z > 0.0) return log_reg_upper_inc_gamma_ln(1.0 / s, lx) - M_LN2;
    return std::log1p(-0.5 * reg_upper_inc_gamma_ln(1.0 / s, lx));
}

/// log Phi_s(z), the mirror of std_gn_log_sf.
inline double std_gn_log_cdf(double s, double z) {
    return std_gn_log_sf(s, -z);
}

/// Standardized GN quantile, u in (0,1).
inline double std_gn_quantile(double s, double u) {
    detail::require(u > 0.0 && u < 1.0, "std_gn_quantile: requires u in (0,1)");
    if (u == 0.5) return 0.0;
    if (u < 0.5) return -std::pow(gamma_quantile(1.0 / s, 1.0 - 2.0 * u), 1.0 / s);
    return std::pow(gamma_quantile(1.0 / s, 2.0 * u - 1.0), 1.0 / s);
}

inline double gn_pdf(const GnParams& p, double x) {
    p.validate();
    return std_gn_pdf(p.s, (x - p.mu) / p.sigma) / p.sigma;
}

inline double gn_log_pdf(const GnParams& p, double x) {
    p.validate();
    return std_gn_log_pdf(p.s, (x - p.mu) / p.sigma) - std::log(p.sigma);
}

inline double gn_cdf(const GnParams& p, double x) {
    p.validate();
    return std_gn_cdf(p.s, (x - p.mu) / p.sigma);
}

inline double gn_quantile(const GnParams& p, double u) {
    p.validate();
    return p.mu + p.sigma * std_gn_quantile(p.s, u);
}

}  // namespace ggn
