#pragma once

// Replicate-generate-fit-aggregate parameter study.  Replications run on
// independent counter-based streams (stream_index = replication number) and
// may execute in parallel; aggregation is a sequential compensated sum over
// the stored per-replication results, so the outcome is independent of the
// thread schedule.

#include <array>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "ggn/estimation.hpp"
#include "ggn/sampling.hpp"

namespace ggn {

struct StudyConfig {
    GgnParams true_params;
    std::vector<std::size_t> sample_sizes;
    std::size_t replications = 1000;
    std::uint64_t base_seed = 0;
    std::string scenario_label;

    void validate() const {
        true_params.validate();
        detail::require(!sample_sizes.empty(), "StudyConfig: sample_sizes must be nonempty");
        detail::require(replications >= 1, "StudyConfig: replications must be >= 1");
        for (auto n : sample_sizes)
            detail::require(n >= 5, "StudyConfig: sample sizes must be >= 5");
    }
};

/// Per (scenario, N) aggregate.  Parameter order is (mu, sigma, s, a).
struct StudyRow {
    std::string scenario_label;
    std::size_t sample_size = 0;
    std::array<double, 4> mean_estimate{};
    std::array<double, 4> mse{};
    std::size_t failures = 0;
    std::size_t replications_used = 0;
    bool mse_reliable = false;  // at least 50 successful replications
};

struct StudyResult {
    GgnParams true_params;
    std::uint64_t base_seed = 0;
    std::vector<StudyRow> rows;
};

namespace detail {

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace detail

inline StudyResult run_study(const StudyConfig& cfg, unsigned threads = 0) {
    cfg.validate();
    if (threads == 0)
        threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));

    StudyResult out;
    out.true_params = cfg.true_params;
    out.base_seed = cfg.base_seed;
    const std::array<double, 4> truth{cfg.true_params.mu, cfg.true_params.sigma,
                                      cfg.true_params.s, cfg.true_params.a};

    for (std::size_t N : cfg.sample_sizes) {
        std::vector<std::array<double, 4>> est(cfg.replications);
        std::vector<char> ok(cfg.replications, 0);

        auto worker = [&](std::size_t first, std::size_t last) {
            for (std::size_t r = first; r < last; ++r) {
                const auto data = ggn_sample(cfg.true_params, N, {cfg.base_seed, r});
                FitOptions opt;
                opt.compute_std_errors = false;
                const auto fit = fit_ggn(data, opt);
                if (fit.converged) {
                    est[r] = {fit.estimates[0], fit.estimates[1], fit.estimates[2],
                              fit.estimates[3]};
                    ok[r] = 1;
                }
            }
        };
        if (threads <= 1 || cfg.replications < 4) {
            worker(0, cfg.replications);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (cfg.replications + threads - 1) / threads;
            for (unsigned t = 0; t < threads; ++t) {
                const std::size_t first = t * chunk;
                const std::size_t last = std::min(cfg.replications, first + chunk);
                if (first >= last) break;
                pool.emplace_back(worker, first, last);
            }
            for (auto& th : pool) th.join();
        }

        StudyRow row;
        row.scenario_label = cfg.scenario_label;
        row.sample_size = N;
        std::array<detail::KahanSum, 4> mean_acc{}, mse_acc{};
        for (std::size_t r = 0; r < cfg.replications; ++r) {
            if (!ok[r]) {
                ++row.failures;
                continue;
            }
            ++row.replications_used;
            for (int c = 0; c < 4; ++c) {
                mean_acc[c].add(est[r][c]);
                const double d = est[r][c] - truth[c];
                mse_acc[c].add(d * d);
            }
        }
        const double used = std::max<double>(1.0, static_cast<double>(row.replications_used));
        for (int c = 0; c < 4; ++c) {
            row.mean_estimate[c] = mean_acc[c].sum / used;
            row.mse[c] = mse_acc[c].sum / used;
        }
        row.mse_reliable = row.replications_used >= 50;
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace ggn
