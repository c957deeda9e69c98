#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ggn/estimation.hpp"
#include "ggn/sampling.hpp"

using namespace ggn;
using Catch::Approx;

TEST_CASE("loglik reduces to the GN sum at a = 1") {
    const auto s = ggn_sample({0.2, 1.1, 1.6, 1.0}, 200, {31, 0});
    GgnParams p{0.1, 1.2, 1.4, 1.0};
    double gn_sum = 0.0;
    for (double x : s.values) gn_sum += gn_log_pdf(p.baseline(), x);
    CHECK(ggn_loglik(p, s) == Approx(gn_sum).epsilon(1e-12));
}

TEST_CASE("single-observation loglik hand value") {
    Sample one{{0.0}, "hand"};
    CHECK(ggn_loglik({0, 1, 2, 2}, one) == Approx(-0.93887786350636441).epsilon(1e-13));
}

TEST_CASE("location-family shift invariance") {
    const auto s = ggn_sample({0.5, 0.9, 1.8, 2.0}, 100, {44, 2});
    GgnParams p{0.5, 0.9, 1.8, 2.0};
    const double base = ggn_loglik(p, s);
    Sample shifted = s;
    for (double& x : shifted.values) x += 3.25;
    GgnParams ps = p;
    ps.mu += 3.25;
    CHECK(ggn_loglik(ps, shifted) == Approx(base).epsilon(1e-12));
}

TEST_CASE("score hand value: U_a at x = mu, a = 1") {
    Sample one{{0.7}, "hand"};
    const auto sc = ggn_score({0.7, 1.0, 2.0, 1.0}, one);
    CHECK(sc.u[3] == Approx(0.21070274431986853).epsilon(1e-10));
    CHECK_FALSE(sc.singular);
}

TEST_CASE("score matches finite differences of the loglik") {
    const auto data = ggn_sample({0.1, 1.2, 1.8, 2.3}, 50, {5150, 0});
    GgnParams p{0.1, 1.2, 1.8, 2.3};
    const auto sc = ggn_score(p, data);
    auto fd = [&](auto bump) {
        const double h = 1e-6;
        auto pp = p, pm = p;
        bump(pp, h);
        bump(pm, -h);
        return (ggn_loglik(pp, data) - ggn_loglik(pm, data)) / (2.0 * h);
    };
    const double fmu = fd([](GgnParams& q, double h) { q.mu += h; });
    const double fsg = fd([](GgnParams& q, double h) { q.sigma += h; });
    const double fs = fd([](GgnParams& q, double h) { q.s += h; });
    const double fa = fd([](GgnParams& q, double h) { q.a += h; });
    CHECK(sc.u[0] == Approx(fmu).margin(1e-5 + 1e-4 * std::fabs(fmu)));
    CHECK(sc.u[1] == Approx(fsg).margin(1e-5 + 1e-4 * std::fabs(fsg)));
    CHECK(sc.u[2] == Approx(fs).margin(1e-5 + 1e-4 * std::fabs(fs)));
    CHECK(sc.u[3] == Approx(fa).margin(1e-5 + 1e-4 * std::fabs(fa)));
}

TEST_CASE("score identity on randomized cases with s >= 1") {
    RngStream st({777, 0});
    for (int rep = 0; rep < 10; ++rep) {
        GgnParams p{2.0 * st.uniform() - 1.0, 0.5 + 1.5 * st.uniform(),
                    1.0 + 2.0 * st.uniform(), 0.4 + 3.0 * st.uniform()};
        const auto data = ggn_sample(p, 40, {888, static_cast<std::uint64_t>(rep)});
        const auto sc = ggn_score(p, data);
        auto fd = [&](auto bump) {
            const double h = 1e-6;
            auto pp = p, pm = p;
            bump(pp, h);
            bump(pm, -h);
            return (ggn_loglik(pp, data) - ggn_loglik(pm, data)) / (2.0 * h);
        };
        const double f[4] = {fd([](GgnParams& q, double h) { q.mu += h; }),
                             fd([](GgnParams& q, double h) { q.sigma += h; }),
                             fd([](GgnParams& q, double h) { q.s += h; }),
                             fd([](GgnParams& q, double h) { q.a += h; })};
        for (int c = 0; c < 4; ++c) {
            CHECK(sc.u[c] == Approx(f[c]).margin(1e-5 + 1e-4 * std::fabs(f[c])));
        }
    }
}

TEST_CASE("singular tie flag for s < 1") {
    Sample d{{0.3, 0.5, 0.8, 1.1, 1.4}, "tie"};
    const auto sc = ggn_score({0.5, 1.0, 0.7, 1.5}, d);
    CHECK(sc.singular);
    const auto ok = ggn_score({0.5, 1.0, 1.3, 1.5}, d);
    CHECK_FALSE(ok.singular);
}

TEST_CASE("fit_ggn recovers truth on a large sample") {
    GgnParams truth{0.0, 1.0, 1.0, 2.0};
    const auto data = ggn_sample(truth, 10000, {1234, 0});
    const auto fit = fit_ggn(data);
    REQUIRE(fit.converged);
    CHECK(std::fabs(fit.estimates[3] - 2.0) < 0.3);
    CHECK(std::fabs(fit.estimates[2] - 1.0) < 0.15);
    // first-order condition at the reported optimum
    const auto sc = ggn_score({fit.estimates[0], fit.estimates[1], fit.estimates[2],
                               fit.estimates[3]}, data);
    for (double u : sc.u) CHECK(std::fabs(u) < 1e-3 * static_cast<double>(data.size()));
    CHECK(fit.std_errors_available);
}

TEST_CASE("likelihood nesting: GGN fit beats the a = 1 profile") {
    GgnParams truth{0.0, 1.0, 2.0, 1.0};
    const auto data = ggn_sample(truth, 2000, {4321, 1});
    const auto fit = fit_ggn(data);
    REQUIRE(fit.converged);
    CHECK(std::fabs(fit.estimates[3] - 1.0) < 0.35);
    // GN fit: profile with a fixed at 1 via the simplex on (mu, log sigma, log s)
    auto neg3 = [&](const std::vector<double>& th) {
        const double l = ggn_loglik({th[0], std::exp(th[1]), std::exp(th[2]), 1.0}, data);
        return std::isfinite(l) ? -l : 1e300;
    };
    auto nm = detail::nelder_mead(neg3, {0.0, 0.0, std::log(2.0)}, {0.2, 0.2, 0.2}, 800, 1e-12);
    const double gn_loglik_max = -nm.f;
    CHECK(fit.loglik >= gn_loglik_max - 1e-4 * std::fabs(gn_loglik_max));
    CHECK(fit.loglik - gn_loglik_max < 2.0 + 2.0);
}

TEST_CASE("deterministic restart") {
    const auto data = ggn_sample({0.3, 1.2, 1.5, 1.8}, 500, {2, 7});
    const auto f1 = fit_ggn(data);
    const auto f2 = fit_ggn(data);
    CHECK(f1.estimates == f2.estimates);
    CHECK(f1.loglik == f2.loglik);
    CHECK(f1.iterations == f2.iterations);
}

TEST_CASE("equivariance under affine maps") {
    const auto data = ggn_sample({0.0, 1.0, 1.6, 1.8}, 3000, {99, 3});
    const auto base = fit_ggn(data);
    Sample scaled = data;
    const double c = 2.5, d = -1.75;
    for (double& x : scaled.values) x = c * x + d;
    const auto tr = fit_ggn(scaled);
    REQUIRE(base.converged);
    REQUIRE(tr.converged);
    CHECK(tr.estimates[0] == Approx(c * base.estimates[0] + d).margin(2e-3));
    CHECK(tr.estimates[1] == Approx(c * base.estimates[1]).epsilon(2e-3));
    CHECK(tr.estimates[2] == Approx(base.estimates[2]).epsilon(5e-3));
    CHECK(tr.estimates[3] == Approx(base.estimates[3]).epsilon(5e-3));
}

TEST_CASE("standard errors shrink like 1/sqrt(n)") {
    GgnParams truth{0.0, 1.0, 1.5, 1.8};
    double prev_se = -1.0;
    for (std::size_t n : {500u, 2000u, 8000u}) {
        const auto data = ggn_sample(truth, n, {31415, n});
        const auto fit = fit_ggn(data);
        REQUIRE(fit.converged);
        REQUIRE(fit.std_errors_available);
        const double se = fit.std_errors[1];  // sigma
        if (prev_se > 0.0) {
            const double ratio = prev_se / se;  // expected 2 for 4x data
            CHECK(ratio > 2.0 / 1.5);
            CHECK(ratio < 2.0 * 1.5);
        }
        prev_se = se;
    }
}

TEST_CASE("fit_gamma against the digamma-equation oracle") {
    RngStream st({11, 0});
    Sample data;
    data.source = "gamma draws";
    for (int i = 0; i < 10000; ++i) data.values.push_back(gamma_variate(2.0, st) / 3.0);
    const auto fit = fit_gamma(data);
    REQUIRE(fit.converged);
    CHECK(std::fabs(fit.estimates[0] - 2.0) < 0.1);
    // oracle: Newton on  log(alpha) - psi(alpha) = log(mean) - mean(log x)
    const double n = static_cast<double>(data.values.size());
    double mean = 0.0, meanlog = 0.0;
    for (double x : data.values) {
        mean += x / n;
        meanlog += std::log(x) / n;
    }
    const double target = std::log(mean) - meanlog;
    double alpha = 0.5 / target;
    for (int it = 0; it < 50; ++it) {
        const double f = std::log(alpha) - digamma(alpha) - target;
        const double fp = 1.0 / alpha - (digamma(alpha + 1e-6) - digamma(alpha - 1e-6)) / 2e-6;
        alpha -= f / fp;
    }
    CHECK(fit.estimates[0] == Approx(alpha).epsilon(1e-4));
    CHECK(fit.estimates[1] == Approx(alpha / mean).epsilon(1e-4));

    Sample bad{{1.0, -0.5, 2.0, 0.1, 0.2}, "bad"};
    CHECK_THROWS_AS(fit_gamma(bad), std::domain_error);
}

TEST_CASE("fit_beta against the moment-matching oracle") {
    RngStream st({13, 0});
    Sample data;
    data.source = "beta draws";
    for (int i = 0; i < 10000; ++i) {
        const double g1 = gamma_variate(2.0, st);
        const double g2 = gamma_variate(2.0, st);
        data.values.push_back(g1 / (g1 + g2));
    }
    const auto fit = fit_beta(data);
    REQUIRE(fit.converged);
    CHECK(std::fabs(fit.estimates[0] - 2.0) < 0.15);
    CHECK(std::fabs(fit.estimates[1] - 2.0) < 0.15);

    Sample bad{{0.2, 0.4, 1.2, 0.6, 0.7}, "bad"};
    CHECK_THROWS_AS(fit_beta(bad), std::domain_error);
}

TEST_CASE("degenerate constant sample flags non-convergence") {
    Sample flat{{1.0, 1.0, 1.0, 1.0, 1.0, 1.0}, "flat"};
    CHECK_FALSE(fit_ggn(flat).converged);
    CHECK_FALSE(fit_gamma(flat).converged);
    Sample flatb{{0.5, 0.5, 0.5, 0.5, 0.5}, "flatb"};
    CHECK_FALSE(fit_beta(flatb).converged);
}
