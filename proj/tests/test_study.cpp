#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ggn/study.hpp"

using namespace ggn;
using Catch::Approx;

TEST_CASE("smoke run with two replications") {
    StudyConfig cfg;
    cfg.true_params = {0.0, 1.0, 2.0, 2.0};
    cfg.sample_sizes = {25};
    cfg.replications = 2;
    cfg.base_seed = 1;
    cfg.scenario_label = "smoke";
    const auto res = run_study(cfg);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].replications_used + res.rows[0].failures == 2);
    CHECK_FALSE(res.rows[0].mse_reliable);
}

TEST_CASE("same seed reproduces the result exactly") {
    StudyConfig cfg;
    cfg.true_params = {0.0, 1.0, 1.0, 2.0};
    cfg.sample_sizes = {25};
    cfg.replications = 24;
    cfg.base_seed = 77;
    cfg.scenario_label = "repro";
    const auto r1 = run_study(cfg, 4);
    const auto r2 = run_study(cfg, 2);  // different thread count, same streams
    REQUIRE(r1.rows.size() == r2.rows.size());
    for (int c = 0; c < 4; ++c) {
        CHECK(r1.rows[0].mean_estimate[c] == r2.rows[0].mean_estimate[c]);
        CHECK(r1.rows[0].mse[c] == r2.rows[0].mse[c]);
    }
    CHECK(r1.rows[0].failures == r2.rows[0].failures);
}

TEST_CASE("larger samples tighten the shape estimate") {
    StudyConfig cfg;
    cfg.true_params = {0.0, 1.0, 1.0, 2.0};  // Table-style scenario (a,mu,sigma,s) = (2,0,1,1)
    cfg.sample_sizes = {25, 121};
    cfg.replications = 150;
    cfg.base_seed = 20240214;
    cfg.scenario_label = "(2,0,1,1)";
    const auto res = run_study(cfg);
    REQUIRE(res.rows.size() == 2);
    const auto& r25 = res.rows[0];
    const auto& r121 = res.rows[1];
    // MSE of s-hat falls with the sample size
    CHECK(r121.mse[2] < r25.mse[2]);
    // mu and sigma biases shrink too
    CHECK(std::fabs(r121.mean_estimate[0] - 0.0) < std::fabs(r25.mean_estimate[0] - 0.0) + 0.02);
    CHECK(std::fabs(r121.mean_estimate[1] - 1.0) < std::fabs(r25.mean_estimate[1] - 1.0) + 0.02);
    // failure rate below 5% at N = 121
    CHECK(static_cast<double>(r121.failures) <
          0.05 * static_cast<double>(cfg.replications));
    // estimates in the right neighborhood
    CHECK(r121.mean_estimate[3] == Approx(2.1).margin(0.35));
    CHECK(r121.mean_estimate[2] == Approx(1.0).margin(0.12));
    CHECK(r121.mse_reliable);
}
