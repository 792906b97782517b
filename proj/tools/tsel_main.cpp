// tsel: oblivious threshold selection rules for online sampling, with
// exact offline baselines and a Monte Carlo harness.
//
//   tsel interval --k 1 --schedule power:0.5 --n 64 --trials 10000
//   tsel tree     --p 0.5 --schedule log:2 --n 64 --trials 1000
//   tsel skyline  --space uniform2d --schedule power:0.25 --n 128 --trials 1000
//   tsel verify [--fast]
//
// Run subcommands write <out>/results.csv, <out>/summary.txt and
// <out>/manifest.json. Exit codes: 0 success, 1 check or I/O failure,
// 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "tsel/checks.hpp"
#include "tsel/montecarlo.hpp"
#include "tsel/stats.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tsel;

struct RunFlags {
    std::string schedule;
    std::string space = "uniform2d";
    std::string pool;
    std::string seed;
    std::string out = "out";
    std::int64_t n = 64;
    std::int64_t trials = 1000;
    double k = 1.0;
    double p = 0.5;
    int threads = 0;  // 0: use hardware concurrency
    std::string config_path;
    bool force = false;
};

ScheduleSpec schedule_from_json(const json& j) {
    if (j.is_string()) return ScheduleSpec::parse(j.get<std::string>());
    ScheduleSpec spec;
    spec.kind = j.at("kind").get<std::string>();
    if (spec.kind == "power") spec.alpha = j.at("alpha").get<double>();
    if (spec.kind == "log") spec.offset = j.at("offset").get<double>();
    if (spec.kind == "poly") {
        spec.exponent = j.at("exponent").get<double>();
        spec.scale = j.value("scale", 1.0);
    }
    if (spec.kind == "const") spec.value = j.at("value").get<double>();
    if (spec.kind == "explicit") spec.values = j.at("values").get<std::vector<double>>();
    return spec;
}

void apply_config_file(const std::string& path, mc::ExperimentConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    if (j.contains("model")) cfg.model = mc::parse_model(j["model"].get<std::string>());
    if (j.contains("k")) cfg.k = j["k"].get<double>();
    if (j.contains("p")) cfg.p = j["p"].get<double>();
    if (j.contains("space")) cfg.space = mc::SpaceSpec::parse(j["space"].get<std::string>());
    if (j.contains("schedule")) cfg.schedule = schedule_from_json(j["schedule"]);
    if (j.contains("n")) cfg.n = j["n"].get<std::int64_t>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::int64_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("pool")) cfg.pool = mc::parse_pool(j["pool"].get<std::string>());
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
}

json manifest_json(const mc::ExperimentConfig& cfg, const std::string& out_dir) {
    json j;
    j["model"] = mc::model_name(cfg.model);
    if (cfg.model == mc::Model::Interval) j["k"] = cfg.k;
    if (cfg.model == mc::Model::Tree) j["p"] = cfg.p;
    if (cfg.model == mc::Model::Skyline) j["space"] = cfg.space.text();
    j["schedule"] = cfg.schedule.text();
    j["n"] = cfg.n;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["pool"] = mc::pool_name(cfg.pool);
    j["threads"] = cfg.threads;
    j["out"] = out_dir;
    return j;
}

std::string bound_line(const mc::ExperimentConfig& cfg, const mc::RatioReport& report) {
    char buf[160];
    if (cfg.model == mc::Model::Interval) {
        if (cfg.schedule.kind == "power") {
            std::snprintf(buf, sizeof buf, "theoretical ratio bound: %.6g  (16/(1-alpha))",
                          16.0 / (1.0 - cfg.schedule.alpha));
            return buf;
        }
        return "theoretical ratio bound: n/a (power schedules only)";
    }
    if (cfg.model == mc::Model::Tree) {
        auto schedule = build_schedule(cfg.schedule, ScheduleDomain::Integer);
        double c_n = static_cast<double>(schedule.integer_at(cfg.n));
        double c_half = static_cast<double>(schedule.integer_at(std::max<std::int64_t>(1, cfg.n / 2)));
        double occupancy = 1.0 - 2.0 / std::numbers::e;
        double f_n = c_n - std::log2(static_cast<double>(cfg.n));
        double f_half = c_half - std::log2(static_cast<double>(std::max<std::int64_t>(1, cfg.n / 2)));
        if (f_half > 0.0) {
            std::snprintf(buf, sizeof buf,
                          "theoretical ratio bound: %.6g  (3/2 + 2(2+f(n))/((1-2/e) f(n/2)))",
                          1.5 + 2.0 * (2.0 + f_n) / (occupancy * f_half));
        } else {
            std::snprintf(buf, sizeof buf,
                          "theoretical ratio bound: %.6g  (3/2 + 2^(c_n+1)/(2^c_(n/2) (1-2/e)))",
                          1.5 + std::pow(2.0, c_n + 1.0) / (std::pow(2.0, c_half) * occupancy));
        }
        return buf;
    }
    std::snprintf(buf, sizeof buf, "ratio bound 1 + Pr[E_n]/c_n: %.6g", report.ratio_bound);
    return buf;
}

std::string summary_text(const mc::ExperimentConfig& cfg, const mc::RatioReport& report) {
    std::ostringstream os;
    char buf[256];
    os << "tsel run summary\n";
    os << "model: " << mc::model_name(cfg.model);
    if (cfg.model == mc::Model::Interval) os << "  (k = " << cfg.k << ")";
    if (cfg.model == mc::Model::Tree) os << "  (p = " << cfg.p << ")";
    if (cfg.model == mc::Model::Skyline) os << "  (space = " << cfg.space.text() << ")";
    os << "\n";
    os << "schedule: " << cfg.schedule.text() << "   pool: " << mc::pool_name(cfg.pool) << "\n";
    os << "n: " << cfg.n << "   trials: " << cfg.trials << "   seed: " << cfg.seed
       << "   threads: " << cfg.threads << "\n";
    os << "trials run: " << report.trials_run
       << "   excluded zero-optimum trials: " << report.degenerate_trials << "\n";

    KahanSum t_sum;
    for (const auto& row : report.rows) t_sum.add(static_cast<double>(row.seen_total));
    std::snprintf(buf, sizeof buf, "mean T_n: %.6g\n",
                  t_sum.value() / static_cast<double>(report.rows.size()));
    os << buf;

    const char* ratio_name =
        cfg.model == mc::Model::Tree ? "E[Cover*/Cover]" : "E[Gap/Gap*]";
    const char* roe_name =
        cfg.model == mc::Model::Tree ? "E[Cover*]/E[Cover]" : "E[Gap]/E[Gap*]";
    if (!std::isnan(report.mean_expected_ratio)) {
        double half = 1.959963984540054 * report.mean_expected_ratio_se;
        std::snprintf(buf, sizeof buf, "%s: %.6g  (95%% CI [%.6g, %.6g])\n", ratio_name,
                      report.mean_expected_ratio, report.mean_expected_ratio - half,
                      report.mean_expected_ratio + half);
        os << buf;
    }
    if (!std::isnan(report.ratio_of_expectations)) {
        double half = 1.959963984540054 * report.ratio_of_expectations_se;
        std::snprintf(buf, sizeof buf, "%s: %.6g  (95%% CI [%.6g, %.6g])\n", roe_name,
                      report.ratio_of_expectations, report.ratio_of_expectations - half,
                      report.ratio_of_expectations + half);
        os << buf;
    }
    if (cfg.model == mc::Model::Skyline) {
        std::snprintf(buf, sizeof buf, "event rate Pr[E_n]: %.6g\n", report.event_rate);
        os << buf;
    }
    os << bound_line(cfg, report) << "\n";
    return os.str();
}

int cmd_run(mc::Model model, const RunFlags& flags, const CLI::App& sub) {
    mc::ExperimentConfig cfg;
    cfg.model = model;
    if (!flags.config_path.empty()) apply_config_file(flags.config_path, cfg);
    cfg.model = model;  // the subcommand decides the model

    auto passed = [&sub](const char* name) {
        const CLI::Option* opt = sub.get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };

    // Inline flags override config-file values.
    if (passed("--k")) cfg.k = flags.k;
    if (passed("--p")) cfg.p = flags.p;
    if (passed("--space")) cfg.space = mc::SpaceSpec::parse(flags.space);
    if (passed("--schedule") || cfg.schedule.kind.empty())
        cfg.schedule = ScheduleSpec::parse(flags.schedule.empty() ? "power:0.5" : flags.schedule);
    if (passed("--n")) cfg.n = flags.n;
    if (passed("--trials")) cfg.trials = flags.trials;
    if (passed("--pool")) cfg.pool = mc::parse_pool(flags.pool);
    if (passed("--threads")) cfg.threads = flags.threads;
    if (cfg.threads <= 0)
        cfg.threads = std::max(1u, std::thread::hardware_concurrency());
    if (passed("--seed")) {
        if (flags.seed == "random")
            cfg.seed = std::random_device{}();
        else
            cfg.seed = std::stoull(flags.seed);
    }

    const fs::path out_dir(flags.out);
    const fs::path csv_path = out_dir / "results.csv";
    if (fs::exists(csv_path) && !flags.force) {
        std::cerr << "error: " << csv_path.string() << " exists; pass --force to overwrite\n";
        return 2;
    }

    auto report = mc::run_experiment(cfg);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create " << out_dir.string() << ": " << ec.message() << "\n";
        return 1;
    }
    {
        std::ofstream csv(csv_path);
        mc::write_results_csv(csv, cfg, report);
        if (!csv) {
            std::cerr << "error: failed writing " << csv_path.string() << "\n";
            return 1;
        }
    }
    std::string summary = summary_text(cfg, report);
    {
        std::ofstream txt(out_dir / "summary.txt");
        txt << summary;
        if (!txt) {
            std::cerr << "error: failed writing summary.txt\n";
            return 1;
        }
    }
    {
        std::ofstream mf(out_dir / "manifest.json");
        mf << manifest_json(cfg, flags.out).dump(2) << "\n";
        if (!mf) {
            std::cerr << "error: failed writing manifest.json\n";
            return 1;
        }
    }
    std::cout << summary;
    std::cout << "wrote " << csv_path.string() << "\n";
    return 0;
}

int cmd_verify(bool fast, int /*threads*/) {
    checks::BatteryOptions opt;
    opt.fast = fast;
    auto results = checks::run_verification_battery(opt);
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  --  " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "verification: all checks passed\n"
                           : "verification: FAILURES present\n");
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oblivious threshold selection rules: simulation and verification"};
    app.require_subcommand(1);

    RunFlags flags;
    bool fast = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--schedule", flags.schedule,
                        "threshold sequence, e.g. power:0.5, log:2, poly:0.5,2, const:4, "
                        "explicit:0.5,0.25");
        sub->add_option("--n", flags.n, "number of samples to select");
        sub->add_option("--trials", flags.trials, "Monte Carlo trials");
        sub->add_option("--seed", flags.seed, "RNG seed (integer or 'random')");
        sub->add_option("--pool", flags.pool, "offline pool: adversarial | exact_n");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--threads", flags.threads, "worker threads (default: all cores)");
        sub->add_option("--config", flags.config_path, "JSON config file; flags override it");
        sub->add_flag("--force", flags.force, "overwrite existing result files");
    };

    auto* interval_cmd = app.add_subcommand("interval", "unit-interval quality selection");
    interval_cmd->add_option("--k", flags.k, "power-law shape (gap cdf x^k)");
    add_common(interval_cmd);

    auto* tree_cmd = app.add_subcommand("tree", "random binary-tree coverage selection");
    tree_cmd->add_option("--p", flags.p, "walk stopping probability in (0,1)");
    add_common(tree_cmd);

    auto* sky_cmd = app.add_subcommand("skyline", "partial-order gap selection");
    sky_cmd->add_option("--space", flags.space,
                        "uniform2d | product2d:<m>,<m> (m = uniform|pow<g>) | cube:<d>");
    add_common(sky_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "run the built-in verification battery");
    verify_cmd->add_flag("--fast", fast, "reduced trials, 5-sigma tolerances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (interval_cmd->parsed()) return cmd_run(tsel::mc::Model::Interval, flags, *interval_cmd);
        if (tree_cmd->parsed()) return cmd_run(tsel::mc::Model::Tree, flags, *tree_cmd);
        if (sky_cmd->parsed()) return cmd_run(tsel::mc::Model::Skyline, flags, *sky_cmd);
        if (verify_cmd->parsed()) return cmd_verify(fast, 0);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
