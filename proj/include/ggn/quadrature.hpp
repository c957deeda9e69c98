#pragma once

// Thin wrapper over Boost.Math adaptive Gauss-Kronrod, used by the
// quadrature-based oracles (moment checks, normalization tests).

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ggn {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

template <typename F>
QuadResult integrate(F&& f, double lo, double hi, double tol = 1e-10) {
    QuadResult r;
    r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), lo, hi, 22, tol, &r.error_estimate);
    r.converged = r.error_estimate <= tol * std::max(1.0, std::fabs(r.value)) * 100.0;
    return r;
}

/// Integrate with an interior split point (a known kink or spike location),
/// so both pieces see it as an endpoint where nodes cluster.
template <typename F>
QuadResult integrate_split(F&& f, double lo, double split, double hi, double tol = 1e-10) {
    const double mid = std::min(std::max(split, lo), hi);
    const auto l = integrate(f, lo, mid, tol);
    const auto r = integrate(f, mid, hi, tol);
    QuadResult out;
    out.value = l.value + r.value;
    out.error_estimate = l.error_estimate + r.error_estimate;
    out.converged = l.converged && r.converged;
    return out;
}

}  // namespace ggn
