// ggn: command-line front end for GGN sampling, fitting, goodness-of-fit
// comparison, Monte Carlo parameter studies, moment evaluation and plot-data
// export.
//
// Exit codes: 0 success, 2 input parse error, 3 domain/support error,
// 4 non-convergence, 5 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ggn/estimation.hpp"
#include "ggn/gof.hpp"
#include "ggn/sampling.hpp"
#include "ggn/series.hpp"
#include "ggn/study.hpp"

using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr int kExitParse = 2;
constexpr int kExitDomain = 3;
constexpr int kExitConvergence = 4;
constexpr int kExitIo = 5;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& msg) { throw CliError{code, msg}; }

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kExitIo, "cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(kExitIo, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) fail(kExitIo, "write failed for '" + path + "'");
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// newline-delimited numbers, or single-column CSV with an optional header
struct DataFile {
    ggn::Sample sample;
    std::vector<std::size_t> line_numbers;  // aligned with sample.values
    std::string path;
};

DataFile read_data(const std::string& path) {
    const std::string bytes = read_file(path);
    DataFile out;
    out.path = path;
    out.sample.source = path;
    std::istringstream in(bytes);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        const std::string tok = line.substr(start);
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') {
            if (lineno == 1) continue;  // header row
            fail(kExitParse, path + ":" + std::to_string(lineno) + ": cannot parse '" + tok + "'");
        }
        if (!std::isfinite(v))
            fail(kExitParse, path + ":" + std::to_string(lineno) + ": non-finite value");
        out.sample.values.push_back(v);
        out.line_numbers.push_back(lineno);
    }
    return out;
}

void check_support(const DataFile& data, ggn::ModelTag tag) {
    for (std::size_t i = 0; i < data.sample.values.size(); ++i) {
        const double v = data.sample.values[i];
        if (tag == ggn::ModelTag::GAMMA && !(v > 0.0))
            fail(kExitDomain, data.path + ":" + std::to_string(data.line_numbers[i]) + ": value " +
                                  format_full(v) + " outside (0, inf); the gamma model needs "
                                  "positive data");
        if (tag == ggn::ModelTag::BETA && !(v > 0.0 && v < 1.0))
            fail(kExitDomain, data.path + ":" + std::to_string(data.line_numbers[i]) + ": value " +
                                  format_full(v) + " outside (0, 1); the beta model needs unit-"
                                  "interval data");
    }
}

json envelope(const std::string& command, const std::string& digest_src, json payload) {
    json env;
    env["schema_version"] = 1;
    env["tool_version"] = kToolVersion;
    env["command"] = command;
    env["inputs_digest"] = "fnv1a64:" + hex64(fnv1a64(digest_src));
    env["payload"] = std::move(payload);
    return env;
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

json fit_to_json(const ggn::FitResult& fit) {
    json j;
    j["model"] = ggn::to_string(fit.model_tag);
    j["estimates"] = fit.estimates;
    if (fit.std_errors_available)
        j["std_errors"] = fit.std_errors;
    else
        j["std_errors"] = nullptr;
    j["loglik"] = fit.loglik;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["n_obs"] = fit.n_obs;
    if (fit.model_tag == ggn::ModelTag::GGN)
        j["parameter_names"] = {"mu", "sigma", "s", "a"};
    else
        j["parameter_names"] = {"alpha", "beta"};
    return j;
}

ggn::FitResult fit_from_json(const json& j) {
    ggn::FitResult fit;
    const std::string m = j.at("model").get<std::string>();
    if (m == "ggn") fit.model_tag = ggn::ModelTag::GGN;
    else if (m == "gamma") fit.model_tag = ggn::ModelTag::GAMMA;
    else if (m == "beta") fit.model_tag = ggn::ModelTag::BETA;
    else fail(kExitParse, "unknown model tag '" + m + "' in fit report");
    fit.estimates = j.at("estimates").get<std::vector<double>>();
    fit.loglik = j.at("loglik").get<double>();
    fit.converged = j.at("converged").get<bool>();
    fit.n_obs = j.at("n_obs").get<std::size_t>();
    return fit;
}

json gof_to_json(const ggn::GofReport& r) {
    json j;
    j["d_kl"] = r.d_kl;
    j["d_chi2"] = r.d_chi2;
    j["d_ks"] = r.d_ks;
    j["w_star"] = r.w_star;
    j["a_star"] = r.a_star;
    j["aic"] = r.aic;
    if (r.aicc_defined) j["aicc"] = r.aicc; else j["aicc"] = nullptr;
    j["bic"] = r.bic;
    j["n_obs"] = r.n_obs;
    j["k_params"] = r.k_params;
    j["binning"] = {{"method", r.binning_method},
                    {"bin_count", r.bin_count},
                    {"edges", r.bin_edges},
                    {"excluded_empty_bins", r.excluded_empty_bins}};
    j["boundary_clamps"] = r.boundary_clamps;
    j["modification"] = r.modification;
    return j;
}

struct ModelFns {
    std::function<double(double)> pdf;
    std::function<double(double)> cdf;
    std::function<double(double)> quantile;
    int k_params = 0;
};

ModelFns model_functions(const ggn::FitResult& fit) {
    ModelFns fns;
    if (fit.model_tag == ggn::ModelTag::GGN) {
        ggn::GgnParams p{fit.estimates[0], fit.estimates[1], fit.estimates[2], fit.estimates[3]};
        fns.pdf = [p](double x) { return ggn::ggn_pdf(p, x); };
        fns.cdf = [p](double x) { return ggn::ggn_cdf(p, x); };
        fns.quantile = [p](double u) { return ggn::ggn_quantile(p, u); };
        fns.k_params = 4;
    } else if (fit.model_tag == ggn::ModelTag::GAMMA) {
        const double alpha = fit.estimates[0], beta = fit.estimates[1];
        fns.pdf = [=](double x) {
            if (x <= 0.0) return 0.0;
            return std::exp(alpha * std::log(beta) + (alpha - 1.0) * std::log(x) - beta * x -
                            ggn::ln_gamma(alpha));
        };
        fns.cdf = [=](double x) { return x <= 0.0 ? 0.0 : ggn::reg_lower_inc_gamma(alpha, beta * x); };
        fns.quantile = [=](double u) { return ggn::gamma_quantile(alpha, u) / beta; };
        fns.k_params = 2;
    } else {
        const double alpha = fit.estimates[0], beta = fit.estimates[1];
        const double lbeta = ggn::ln_gamma(alpha) + ggn::ln_gamma(beta) - ggn::ln_gamma(alpha + beta);
        fns.pdf = [=](double x) {
            if (x <= 0.0 || x >= 1.0) return 0.0;
            return std::exp((alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x) - lbeta);
        };
        fns.cdf = [=](double x) {
            if (x <= 0.0) return 0.0;
            if (x >= 1.0) return 1.0;
            return ggn::reg_inc_beta(alpha, beta, x);
        };
        fns.quantile = [=](double u) {
            // bisection on the cdf; plotting-grade accuracy is plenty here
            double lo = 0.0, hi = 1.0;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (ggn::reg_inc_beta(alpha, beta, mid) < u ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        };
        fns.k_params = 2;
    }
    return fns;
}

void print_fit_table(const ggn::FitResult& fit) {
    std::printf("model: %s  (n = %zu, loglik = %.6f, converged = %s)\n",
                ggn::to_string(fit.model_tag), fit.n_obs, fit.loglik,
                fit.converged ? "yes" : "no");
    const char* const* names;
    static const char* ggn_names[] = {"mu", "sigma", "s", "a"};
    static const char* ab_names[] = {"alpha", "beta"};
    names = (fit.model_tag == ggn::ModelTag::GGN) ? ggn_names : ab_names;
    for (std::size_t i = 0; i < fit.estimates.size(); ++i) {
        if (fit.std_errors_available)
            std::printf("  %-6s %14.8g  (%.6g)\n", names[i], fit.estimates[i], fit.std_errors[i]);
        else
            std::printf("  %-6s %14.8g  (n/a)\n", names[i], fit.estimates[i]);
    }
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------

int cmd_sample(const std::string& cmdline, double mu, double sigma, double s, double a,
               std::size_t count, std::uint64_t seed, std::uint64_t stream,
               const std::string& out_path) {
    ggn::GgnParams p{mu, sigma, s, a};
    try {
        p.validate();
    } catch (const std::domain_error& e) {
        fail(kExitDomain, e.what());
    }
    const auto sample = ggn::ggn_sample(p, count, {seed, stream});
    std::string body;
    body.reserve(count * 20);
    for (double v : sample.values) {
        body += format_full(v);
        body += '\n';
    }
    write_file(out_path, body);

    json payload;
    payload["parameters"] = {{"mu", mu}, {"sigma", sigma}, {"s", s}, {"a", a}};
    payload["count"] = count;
    payload["output"] = out_path;
    json env = envelope(cmdline, body, std::move(payload));
    env["rng"] = ggn::kRngName;
    env["seed"] = {{"base_seed", seed}, {"stream_index", stream}};
    write_file(out_path + ".json", env.dump(2) + "\n");
    std::printf("wrote %zu values to %s (envelope: %s.json)\n", count, out_path.c_str(),
                out_path.c_str());
    return 0;
}

ggn::FitResult fit_one(ggn::ModelTag tag, const ggn::Sample& data) {
    switch (tag) {
        case ggn::ModelTag::GGN: return ggn::fit_ggn(data);
        case ggn::ModelTag::GAMMA: return ggn::fit_gamma(data);
        case ggn::ModelTag::BETA: return ggn::fit_beta(data);
    }
    fail(kExitParse, "unreachable model tag");
}

int cmd_fit(const std::string& cmdline, const std::string& data_path, const std::string& model,
            bool with_gof, std::size_t bins, const std::string& out_path,
            const std::string& format) {
    const auto data = read_data(data_path);
    try {
        data.validate_for_fit();
    } catch (const std::domain_error& e) {
        fail(kExitDomain, e.what());
    }

    std::vector<ggn::ModelTag> tags;
    if (model == "ggn") tags = {ggn::ModelTag::GGN};
    else if (model == "gamma") tags = {ggn::ModelTag::GAMMA};
    else if (model == "beta") tags = {ggn::ModelTag::BETA};
    else if (model == "all")
        tags = {ggn::ModelTag::GGN, ggn::ModelTag::GAMMA, ggn::ModelTag::BETA};
    else fail(kExitParse, "unknown model '" + model + "'");

    struct Row {
        ggn::FitResult fit;
        std::optional<ggn::GofReport> gof;
    };
    std::vector<Row> rows;
    for (auto tag : tags) {
        Row row;
        try {
            row.fit = fit_one(tag, data);
        } catch (const std::domain_error& e) {
            if (tags.size() == 1) fail(kExitDomain, e.what());
            std::fprintf(stderr, "skipping %s: %s\n", ggn::to_string(tag), e.what());
            continue;
        }
        if (with_gof && row.fit.converged) {
            const auto fns = model_functions(row.fit);
            row.gof = ggn::make_gof_report(data, fns.pdf, fns.cdf, row.fit.loglik, fns.k_params,
                                           bins);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(kExitDomain, "no model could be fitted to '" + data_path + "'");

    std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
        const double ax = x.gof ? x.gof->aic : -2.0 * x.fit.loglik + 2.0 * 4;
        const double ay = y.gof ? y.gof->aic : -2.0 * y.fit.loglik + 2.0 * 4;
        return ax < ay;
    });

    json payload = json::array();
    for (const auto& row : rows) {
        json entry;
        entry["fit"] = fit_to_json(row.fit);
        if (row.gof) entry["gof"] = gof_to_json(*row.gof);
        payload.push_back(std::move(entry));
    }
    const json env = envelope(cmdline, read_file(data_path), std::move(payload));

    if (format == "json") {
        std::printf("%s\n", env.dump(2).c_str());
    } else {
        for (const auto& row : rows) {
            print_fit_table(row.fit);
            if (row.gof) {
                std::printf("  aic %.4f", row.gof->aic);
                if (row.gof->aicc_defined) std::printf("  aicc %.4f", row.gof->aicc);
                std::printf("  bic %.4f  d_ks %.5f  W* %.5f  A* %.5f\n", row.gof->bic,
                            row.gof->d_ks, row.gof->w_star, row.gof->a_star);
            }
            std::printf("\n");
        }
        if (with_gof && rows.size() > 1) std::printf("(ordered by AIC, best first)\n");
    }
    if (!out_path.empty()) write_file(out_path, env.dump(2) + "\n");
    bool any_converged = false;
    for (const auto& row : rows) any_converged = any_converged || row.fit.converged;
    return any_converged ? 0 : kExitConvergence;
}

int cmd_gof(const std::string& cmdline, const std::string& data_path,
            const std::string& fit_path, std::size_t bins, const std::string& out_path,
            const std::string& format) {
    const auto data = read_data(data_path);
    ggn::GofReport report;
    json fitj;
    if (fit_path == "ecdf") {
        // self-test mode: compare the sample with its own histogram / ecdf
        const auto hist = ggn::empirical_density(data, bins);
        std::vector<double> sorted = data.values;
        std::sort(sorted.begin(), sorted.end());
        auto pdf = [hist](double x) {
            for (std::size_t i = 0; i < hist.bin_count(); ++i)
                if (x >= hist.edges[i] && x <= hist.edges[i + 1]) return hist.density[i];
            return 0.0;
        };
        auto cdf = [sorted](double x) {
            const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
            return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
        };
        double ll = 0.0;
        for (double x : data.values) ll += std::log(std::max(pdf(x), 1e-300));
        report = ggn::make_gof_report(data, pdf, cdf, ll, 1, bins);
        fitj = {{"model", "ecdf"}};
    } else {
        json env = json::parse(read_file(fit_path), nullptr, false);
        if (env.is_discarded()) fail(kExitParse, "cannot parse fit report '" + fit_path + "'");
        json fj = env.contains("payload") ? env["payload"] : env;
        if (fj.is_array()) fj = fj.at(0);
        if (fj.contains("fit")) fj = fj["fit"];
        const auto fit = fit_from_json(fj);
        if (!fit.converged) fail(kExitConvergence, "fit report '" + fit_path + "' is not converged");
        const auto fns = model_functions(fit);
        try {
            report = ggn::make_gof_report(data, fns.pdf, fns.cdf, fit.loglik, fns.k_params, bins);
        } catch (const std::domain_error& e) {
            fail(kExitDomain, e.what());
        }
        fitj = fj;
    }
    json payload = gof_to_json(report);
    payload["fit"] = fitj;
    const json env = envelope(cmdline, read_file(data_path) + fit_path, std::move(payload));
    if (format == "json") {
        std::printf("%s\n", env.dump(2).c_str());
    } else {
        std::printf("d_KL    %.6g\nd_chi2  %.6g\nd_KS    %.6g\nW*      %.6g\nA*      %.6g\n",
                    report.d_kl, report.d_chi2, report.d_ks, report.w_star, report.a_star);
        std::printf("AIC     %.6g\nAICc    %s\nBIC     %.6g\n", report.aic,
                    report.aicc_defined ? format_full(report.aicc).c_str() : "n/a", report.bic);
        std::printf("bins: %zu (%s), empty excluded: %zu, boundary clamps: %d\n",
                    report.bin_count, report.binning_method.c_str(), report.excluded_empty_bins,
                    report.boundary_clamps);
    }
    if (!out_path.empty()) write_file(out_path, env.dump(2) + "\n");
    return 0;
}

int cmd_study(const std::string& cmdline, const std::string& config_path,
              const std::string& out_json, const std::string& out_csv, unsigned threads) {
    json cfgj = json::parse(read_file(config_path), nullptr, false);
    if (cfgj.is_discarded()) fail(kExitParse, "cannot parse study config '" + config_path + "'");

    std::vector<ggn::StudyConfig> scenarios;
    auto parse_one = [&](const json& sj) {
        ggn::StudyConfig cfg;
        const auto& tp = sj.at("true_params");
        cfg.true_params = {tp.at("mu").get<double>(), tp.at("sigma").get<double>(),
                           tp.at("s").get<double>(), tp.at("a").get<double>()};
        cfg.sample_sizes = sj.at("sample_sizes").get<std::vector<std::size_t>>();
        cfg.replications = sj.at("replications").get<std::size_t>();
        cfg.base_seed = sj.value("base_seed", 0ull);
        cfg.scenario_label = sj.value("label", std::string("scenario"));
        try {
            cfg.validate();
        } catch (const std::domain_error& e) {
            fail(kExitParse, std::string("study config: ") + e.what());
        }
        scenarios.push_back(std::move(cfg));
    };
    if (cfgj.contains("scenarios"))
        for (const auto& sj : cfgj["scenarios"]) parse_one(sj);
    else
        parse_one(cfgj);

    json rows = json::array();
    std::string csv =
        "scenario,N,mean_a,mse_a,mean_mu,mse_mu,mean_sigma,mse_sigma,mean_s,mse_s,"
        "failures,replications_used\n";
    for (const auto& cfg : scenarios) {
        const auto res = ggn::run_study(cfg, threads);
        for (const auto& row : res.rows) {
            json rj;
            rj["scenario"] = row.scenario_label;
            rj["N"] = row.sample_size;
            rj["mean"] = {{"mu", row.mean_estimate[0]},
                          {"sigma", row.mean_estimate[1]},
                          {"s", row.mean_estimate[2]},
                          {"a", row.mean_estimate[3]}};
            rj["mse"] = {{"mu", row.mse[0]},
                         {"sigma", row.mse[1]},
                         {"s", row.mse[2]},
                         {"a", row.mse[3]}};
            rj["failures"] = row.failures;
            rj["replications_used"] = row.replications_used;
            rj["mse_reliable"] = row.mse_reliable;
            rows.push_back(std::move(rj));
            char line[512];
            std::snprintf(line, sizeof(line), "%s,%zu,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g,%zu,%zu\n",
                          row.scenario_label.c_str(), row.sample_size,
                          row.mean_estimate[3], row.mse[3], row.mean_estimate[0], row.mse[0],
                          row.mean_estimate[1], row.mse[1], row.mean_estimate[2], row.mse[2],
                          row.failures, row.replications_used);
            csv += line;
        }
    }
    json env = envelope(cmdline, read_file(config_path), rows);
    env["rng"] = ggn::kRngName;
    if (!out_json.empty()) write_file(out_json, env.dump(2) + "\n");
    if (!out_csv.empty()) write_file(out_csv, csv);
    std::printf("%s", csv.c_str());
    return 0;
}

int cmd_plotdata(const std::string& cmdline, const std::string& data_path,
                 const std::string& fit_path, int grid_points, double q_lo, double q_hi,
                 std::size_t bins, const std::string& out_path) {
    const auto data = read_data(data_path);
    json env0 = json::parse(read_file(fit_path), nullptr, false);
    if (env0.is_discarded()) fail(kExitParse, "cannot parse fit report '" + fit_path + "'");
    json fj = env0.contains("payload") ? env0["payload"] : env0;
    if (fj.is_array()) fj = fj.at(0);
    if (fj.contains("fit")) fj = fj["fit"];
    const auto fit = fit_from_json(fj);
    const auto fns = model_functions(fit);

    const auto hist = ggn::empirical_density(data, bins);
    auto empirical = [&](double x) {
        if (x < hist.edges.front() || x > hist.edges.back()) return 0.0;
        const double w = hist.edges[1] - hist.edges[0];
        auto idx = static_cast<std::size_t>((x - hist.edges.front()) / w);
        if (idx >= hist.bin_count()) idx = hist.bin_count() - 1;
        return hist.density[idx];
    };

    const double lo = fns.quantile(q_lo);
    const double hi = fns.quantile(q_hi);
    std::string csv = "x,empirical_density,fitted_density\n";
    for (int i = 0; i < grid_points; ++i) {
        const double x = lo + (hi - lo) * i / (grid_points - 1.0);
        char line[128];
        std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g\n", x, empirical(x), fns.pdf(x));
        csv += line;
    }
    write_file(out_path, csv);
    write_file(out_path + ".json",
               envelope(cmdline, read_file(data_path) + fit_path,
                        json{{"grid_points", grid_points},
                             {"quantile_bounds", {q_lo, q_hi}},
                             {"output", out_path}})
                       .dump(2) +
                   "\n");
    std::printf("wrote %d grid rows to %s\n", grid_points, out_path.c_str());
    return 0;
}

int cmd_moments(const std::string& cmdline, double mu, double sigma, double s, double a, int n,
                double tolerance, int max_terms, const std::string& format,
                const std::string& out_path) {
    ggn::GgnParams p{mu, sigma, s, a};
    try {
        p.validate();
    } catch (const std::domain_error& e) {
        fail(kExitDomain, e.what());
    }
    ggn::SeriesConfig cfg;
    cfg.tolerance = tolerance;
    cfg.max_terms = max_terms;
    try {
        cfg.validate();
    } catch (const std::domain_error& e) {
        fail(kExitParse, e.what());
    }

    json payload = json::array();
    for (int k = 1; k <= n; ++k) {
        json row;
        row["n"] = k;
        const auto quad = ggn::ggn_moment_quadrature(k, p);
        row["quadrature"] = {{"value", quad.value},
                             {"converged", quad.converged},
                             {"error_estimate", quad.residual}};
        try {
            const auto ser = ggn::ggn_moment(k, p, cfg);
            row["series"] = {{"value", ser.value},
                             {"converged", ser.converged},
                             {"residual", ser.residual},
                             {"terms_used", ser.terms_used}};
        } catch (const ggn::pole_error& e) {
            row["series"] = {{"pole", e.what()}};
        }
        payload.push_back(std::move(row));
    }
    json env = envelope(cmdline, json(payload).dump(), payload);
    if (format == "json" || format == "csv") {
        std::printf("%s\n", env.dump(2).c_str());
    } else {
        for (const auto& row : payload) {
            std::printf("E[X^%d]: quadrature = %.12g", row["n"].get<int>(),
                        row["quadrature"]["value"].get<double>());
            if (row.contains("series") && row["series"].contains("value")) {
                std::printf("  series = %.12g (%s)", row["series"]["value"].get<double>(),
                            row["series"]["converged"].get<bool>() ? "converged" : "truncated");
            } else if (row.contains("series")) {
                std::printf("  series: integer-a pole; use the quadrature value");
            }
            std::printf("\n");
        }
    }
    if (!out_path.empty()) write_file(out_path, env.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "GGN distribution toolkit: sampling, maximum-likelihood fits, goodness-of-fit "
        "comparison, Monte Carlo parameter studies and moment evaluation.\n"
        "Exit codes: 0 ok, 2 parse error, 3 domain/support error, 4 non-convergence, 5 I/O."};
    app.require_subcommand(1);
    const std::string cmdline = join_args(argc, argv);

    // sample
    double mu = 0.0, sigma = 1.0, s = 2.0, a = 1.0;
    std::size_t count = 100;
    std::uint64_t seed = 0, stream = 0;
    std::string out_path = "sample.txt";
    auto* sample_cmd = app.add_subcommand("sample", "draw GGN variates to a file");
    sample_cmd->add_option("--mu", mu, "location");
    sample_cmd->add_option("--sigma", sigma, "dispersion (> 0)");
    sample_cmd->add_option("--s", s, "shape s (> 0)");
    sample_cmd->add_option("--a", a, "shape a (> 0)");
    sample_cmd->add_option("--count", count, "number of draws")->required();
    sample_cmd->add_option("--seed", seed, "base seed");
    sample_cmd->add_option("--stream", stream, "stream index");
    sample_cmd->add_option("--out", out_path, "output path")->required();

    // fit
    std::string data_path, model = "ggn", fit_out, format = "table";
    std::size_t bins = 0;
    bool with_gof = false;
    auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood fit");
    fit_cmd->add_option("data", data_path, "data file (one value per line / single-column CSV)")
        ->required();
    fit_cmd->add_option("--model", model, "ggn | gamma | beta | all");
    fit_cmd->add_flag("--gof", with_gof, "attach goodness-of-fit statistics");
    fit_cmd->add_option("--bins", bins, "histogram bins for --gof (0 = auto)");
    fit_cmd->add_option("--out", fit_out, "write the JSON report here");
    fit_cmd->add_option("--format", format, "table | json")
        ->check(CLI::IsMember({"table", "json"}));

    // gof
    std::string gof_data, gof_fit, gof_out, gof_format = "table";
    std::size_t gof_bins = 0;
    auto* gof_cmd = app.add_subcommand("gof", "goodness-of-fit statistics for a fit report");
    gof_cmd->add_option("data", gof_data, "data file")->required();
    gof_cmd->add_option("fit", gof_fit, "fit report JSON, or 'ecdf' for the self-test mode")
        ->required();
    gof_cmd->add_option("--bins", gof_bins, "histogram bins (0 = auto)");
    gof_cmd->add_option("--out", gof_out, "write the JSON report here");
    gof_cmd->add_option("--format", gof_format, "table | json")
        ->check(CLI::IsMember({"table", "json"}));

    // study
    std::string study_cfg, study_json, study_csv;
    unsigned study_threads = 0;
    auto* study_cmd = app.add_subcommand("study", "Monte Carlo parameter study from a config");
    study_cmd->add_option("config", study_cfg, "study config JSON")->required();
    study_cmd->add_option("--out", study_json, "write the JSON result here");
    study_cmd->add_option("--csv", study_csv, "write the CSV table here");
    study_cmd->add_option("--threads", study_threads, "worker threads (0 = auto)");

    // plotdata
    std::string plot_data, plot_fit, plot_out = "plot.csv";
    int grid_points = 200;
    double q_lo = 0.001, q_hi = 0.999;
    std::size_t plot_bins = 0;
    auto* plot_cmd = app.add_subcommand("plotdata", "emit (x, empirical, fitted) plot data");
    plot_cmd->add_option("data", plot_data, "data file")->required();
    plot_cmd->add_option("fit", plot_fit, "fit report JSON")->required();
    plot_cmd->add_option("--grid", grid_points, "grid points");
    plot_cmd->add_option("--qlo", q_lo, "lower quantile bound");
    plot_cmd->add_option("--qhi", q_hi, "upper quantile bound");
    plot_cmd->add_option("--bins", plot_bins, "histogram bins (0 = auto)");
    plot_cmd->add_option("--out", plot_out, "output CSV path")->required();

    // moments
    double m_mu = 0.0, m_sigma = 1.0, m_s = 2.0, m_a = 1.5, m_tol = 1e-8;
    int m_n = 3, m_max_terms = 200;
    std::string m_format = "table", m_out;
    auto* mom_cmd = app.add_subcommand("moments", "series and quadrature moments");
    mom_cmd->add_option("--mu", m_mu, "location");
    mom_cmd->add_option("--sigma", m_sigma, "dispersion (> 0)");
    mom_cmd->add_option("--s", m_s, "shape s (> 0)");
    mom_cmd->add_option("--a", m_a, "shape a (> 0)");
    mom_cmd->add_option("--n", m_n, "highest moment order");
    mom_cmd->add_option("--tolerance", m_tol, "series stopping tolerance");
    mom_cmd->add_option("--max-terms", m_max_terms, "series term cap per index");
    mom_cmd->add_option("--format", m_format, "table | json")
        ->check(CLI::IsMember({"table", "json"}));
    mom_cmd->add_option("--out", m_out, "write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParse;
    }

    try {
        if (sample_cmd->parsed())
            return cmd_sample(cmdline, mu, sigma, s, a, count, seed, stream, out_path);
        if (fit_cmd->parsed())
            return cmd_fit(cmdline, data_path, model, with_gof, bins, fit_out, format);
        if (gof_cmd->parsed())
            return cmd_gof(cmdline, gof_data, gof_fit, gof_bins, gof_out, gof_format);
        if (study_cmd->parsed())
            return cmd_study(cmdline, study_cfg, study_json, study_csv, study_threads);
        if (plot_cmd->parsed())
            return cmd_plotdata(cmdline, plot_data, plot_fit, grid_points, q_lo, q_hi, plot_bins,
                                plot_out);
        if (mom_cmd->parsed())
            return cmd_moments(cmdline, m_mu, m_sigma, m_s, m_a, m_n, m_tol, m_max_terms,
                               m_format, m_out);
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.code;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return kExitDomain;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitParse;
}
