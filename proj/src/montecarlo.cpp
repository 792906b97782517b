#include "tsel/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tsel/interval.hpp"
#include "tsel/stats.hpp"
#include "tsel/tree.hpp"

namespace tsel::mc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ExperimentContext {
    ThresholdSchedule schedule;
    std::int64_t target;  // n, or n+1 for the adversarial pool
    const ExperimentConfig& cfg;
    // model-specific
    std::unique_ptr<interval::PowerLawQuality> quality;
    std::unique_ptr<sky::SkySpace> space;
    double c_n = kNaN;  // skyline threshold at n
};

TrialRow run_interval_trial(const ExperimentContext& ctx, Rng& rng) {
    const auto& cfg = ctx.cfg;
    auto trace = interval::run_interval_selection(ctx.schedule, *ctx.quality, ctx.target, rng);
    TrialRow row;
    std::span<const double> online(trace.qualities.data(), static_cast<std::size_t>(cfg.n));
    row.online_quality = interval::gap_of(online);

    std::vector<double> pool(online.begin(), online.end());
    pool.insert(pool.end(), trace.rejected.begin(), trace.rejected.end());
    row.offline_quality = interval::offline_best_n_gap(pool, cfg.n);

    row.seen_total = trace.seen_total;
    if (ctx.target > cfg.n) row.seen_total -= trace.wait_times.back();
    row.ratio = row.offline_quality > 0.0 ? row.online_quality / row.offline_quality : kNaN;
    return row;
}

TrialRow run_tree_trial(const ExperimentContext& ctx, Rng& rng) {
    const auto& cfg = ctx.cfg;
    auto trace = tree::run_tree_selection(ctx.schedule, cfg.p, ctx.target, rng);
    TrialRow row;
    std::span<const tree::TreeNode> online(trace.selected.data(),
                                           static_cast<std::size_t>(cfg.n));
    row.online_quality = static_cast<double>(tree::coverage(online));

    std::vector<tree::TreeNode> pool(online.begin(), online.end());
    pool.insert(pool.end(), trace.rejected.begin(), trace.rejected.end());
    row.offline_quality = static_cast<double>(tree::offline_optimal_coverage(pool, cfg.n));

    row.seen_total = trace.seen_total;
    if (ctx.target > cfg.n) row.seen_total -= trace.wait_times.back();
    row.ratio = row.offline_quality / row.online_quality;
    return row;
}

TrialRow run_sky_trial(const ExperimentContext& ctx, Rng& rng) {
    const auto& cfg = ctx.cfg;
    auto trace = sky::run_sky_selection(*ctx.space, ctx.schedule, ctx.target, rng);
    TrialRow row;
    std::span<const sky::SkyPoint> online(trace.selected.data(),
                                          static_cast<std::size_t>(cfg.n));
    row.event_en = sky::detect_event_en(online, trace.rejected);
    row.in_xn = sky::count_in_region(online, *ctx.space, ctx.c_n);
    row.seen_total = trace.seen_total;
    if (ctx.target > cfg.n) row.seen_total -= trace.wait_times.back();

    if (ctx.space->dimension() == 2) {
        row.online_quality = sky::staircase_gap(online, *ctx.space);
        std::vector<sky::SkyPoint> pool(online.begin(), online.end());
        pool.insert(pool.end(), trace.rejected.begin(), trace.rejected.end());
        row.offline_quality = sky::offline_optimal_gap_2d(pool, cfg.n, *ctx.space);
        row.ratio = row.offline_quality > 0.0 ? row.online_quality / row.offline_quality : kNaN;
    } else {
        // No exact offline gap beyond 2-d; the event rate drives the
        // reported ratio bound instead.
        row.online_quality = kNaN;
        row.offline_quality = kNaN;
        row.ratio = kNaN;
    }
    return row;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("need n >= 1");
    if (cfg.trials < 1) throw std::invalid_argument("need trials >= 1");
    if (cfg.threads < 1) throw std::invalid_argument("need threads >= 1");
}

}  // namespace

std::string model_name(Model model) {
    switch (model) {
        case Model::Interval: return "interval";
        case Model::Tree: return "tree";
        case Model::Skyline: return "skyline";
    }
    return "?";
}

Model parse_model(const std::string& name) {
    if (name == "interval") return Model::Interval;
    if (name == "tree") return Model::Tree;
    if (name == "skyline") return Model::Skyline;
    throw std::invalid_argument("unknown model: " + name);
}

std::string pool_name(OfflinePool pool) {
    return pool == OfflinePool::ExactN ? "exact_n" : "adversarial";
}

OfflinePool parse_pool(const std::string& name) {
    if (name == "exact_n") return OfflinePool::ExactN;
    if (name == "adversarial") return OfflinePool::Adversarial;
    throw std::invalid_argument("unknown offline pool: " + name);
}

SpaceSpec SpaceSpec::parse(const std::string& text) {
    SpaceSpec spec;
    auto colon = text.find(':');
    spec.kind = text.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto parse_gamma = [](const std::string& m) {
        if (m == "uniform") return 1.0;
        if (m.rfind("pow", 0) == 0) {
            double g = std::stod(m.substr(3));
            if (!(g > 0.0)) throw std::invalid_argument("marginal needs gamma > 0");
            return g;
        }
        throw std::invalid_argument("unknown marginal: " + m + " (want uniform or pow<gamma>)");
    };
    if (spec.kind == "uniform2d") {
        if (!args.empty()) throw std::invalid_argument("uniform2d takes no parameters");
    } else if (spec.kind == "product2d") {
        auto comma = args.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("product2d:<marginal>,<marginal>");
        spec.gamma_x = parse_gamma(args.substr(0, comma));
        spec.gamma_y = parse_gamma(args.substr(comma + 1));
    } else if (spec.kind == "cube") {
        spec.dim = std::stoi(args);
        if (spec.dim < 2) throw std::invalid_argument("cube dimension must be >= 2");
    } else {
        throw std::invalid_argument("unknown space kind: " + spec.kind);
    }
    return spec;
}

std::string SpaceSpec::text() const { return build().describe(); }

sky::SkySpace SpaceSpec::build() const {
    if (kind == "uniform2d") return sky::SkySpace::uniform2d();
    if (kind == "product2d") {
        auto marginal = [](double g) {
            return g == 1.0 ? sky::uniform_marginal() : sky::power_marginal(g);
        };
        return sky::SkySpace::product2d(marginal(gamma_x), marginal(gamma_y));
    }
    if (kind == "cube") return sky::SkySpace::uniform_cube(dim);
    throw std::invalid_argument("unknown space kind: " + kind);
}

RatioReport run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    ExperimentContext ctx{
        build_schedule(cfg.schedule, cfg.model == Model::Tree ? ScheduleDomain::Integer
                                                              : ScheduleDomain::Real),
        cfg.pool == OfflinePool::Adversarial ? cfg.n + 1 : cfg.n, cfg, nullptr, nullptr, kNaN};
    if (cfg.model == Model::Interval)
        ctx.quality = std::make_unique<interval::PowerLawQuality>(cfg.k);
    if (cfg.model == Model::Skyline) {
        ctx.space = std::make_unique<sky::SkySpace>(cfg.space.build());
        ctx.c_n = ctx.schedule.value_at(cfg.n);
    }
    if (cfg.model == Model::Tree && !(cfg.p > 0.0 && cfg.p < 1.0))
        throw std::invalid_argument("need p in (0, 1)");

    RatioReport report;
    report.rows.resize(static_cast<std::size_t>(cfg.trials));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        try {
            for (;;) {
                std::int64_t t = next.fetch_add(1, std::memory_order_relaxed);
                if (t >= cfg.trials) return;
                Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(t));
                TrialRow row;
                switch (cfg.model) {
                    case Model::Interval: row = run_interval_trial(ctx, rng); break;
                    case Model::Tree: row = run_tree_trial(ctx, rng); break;
                    case Model::Skyline: row = run_sky_trial(ctx, rng); break;
                }
                report.rows[static_cast<std::size_t>(t)] = row;
            }
        } catch (...) {
            std::scoped_lock lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(cfg.trials);  // drain remaining work
        }
    };

    if (cfg.threads == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(cfg.threads));
        for (int i = 0; i < cfg.threads; ++i) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    // Aggregation in trial order, independent of scheduling.
    report.trials_run = cfg.trials;
    RunningStats ratio_stats;
    KahanSum online_sum, offline_sum;
    double online_mean_sq = 0, offline_mean_sq = 0, cross = 0;  // for the delta-method SE
    std::int64_t events = 0;
    std::int64_t quality_rows = 0;
    for (const auto& row : report.rows) {
        if (row.event_en) ++events;
        if (std::isnan(row.offline_quality)) continue;  // beyond-2d skyline rows
        ++quality_rows;
        if (row.offline_quality > 0.0)
            ratio_stats.add(row.ratio);
        else
            ++report.degenerate_trials;
        online_sum.add(row.online_quality);
        offline_sum.add(row.offline_quality);
        online_mean_sq += row.online_quality * row.online_quality;
        offline_mean_sq += row.offline_quality * row.offline_quality;
        cross += row.online_quality * row.offline_quality;
    }
    report.event_rate = static_cast<double>(events) / static_cast<double>(cfg.trials);
    report.mean_expected_ratio = ratio_stats.count() > 0 ? ratio_stats.mean() : kNaN;
    report.mean_expected_ratio_se = ratio_stats.count() > 1 ? ratio_stats.std_error() : kNaN;

    if (quality_rows > 0) {
        const double tn = static_cast<double>(quality_rows);
        double on_mean = online_sum.value() / tn;
        double off_mean = offline_sum.value() / tn;
        double num_mean = cfg.model == Model::Tree ? off_mean : on_mean;
        double den_mean = cfg.model == Model::Tree ? on_mean : off_mean;
        report.ratio_of_expectations = num_mean / den_mean;
        if (quality_rows > 1) {
            double var_on = (online_mean_sq - tn * on_mean * on_mean) / (tn - 1.0);
            double var_off = (offline_mean_sq - tn * off_mean * off_mean) / (tn - 1.0);
            double cov = (cross - tn * on_mean * off_mean) / (tn - 1.0);
            double var_num = cfg.model == Model::Tree ? var_off : var_on;
            double var_den = cfg.model == Model::Tree ? var_on : var_off;
            // First-order variance of a ratio of sample means.
            double r = report.ratio_of_expectations;
            double var_ratio = (var_num - 2.0 * r * cov + r * r * var_den) /
                               (den_mean * den_mean * tn);
            report.ratio_of_expectations_se = var_ratio > 0.0 ? std::sqrt(var_ratio) : 0.0;
        }
    } else {
        report.ratio_of_expectations = kNaN;
        report.ratio_of_expectations_se = kNaN;
    }
    if (cfg.model == Model::Skyline)
        report.ratio_bound = sky::ratio_bound_from_event_rate(report.event_rate, ctx.c_n);
    else
        report.ratio_bound = kNaN;
    return report;
}

std::pair<double, double> confidence_interval(std::span<const double> values, double level) {
    if (values.size() < 2) throw std::invalid_argument("need at least 2 values");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("need level in (0, 1)");
    double m = mean(values);
    double half = normal_quantile(0.5 + level / 2.0) * std_error(values);
    return {m - half, m + half};
}

void write_results_csv(std::ostream& os, const ExperimentConfig& cfg, const RatioReport& report) {
    os << "model,n,trial,online_quality,offline_quality,ratio,T_n,event_En\n";
    const std::string model = model_name(cfg.model);
    char buf[128];
    for (std::size_t t = 0; t < report.rows.size(); ++t) {
        const auto& row = report.rows[t];
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g", row.online_quality,
                      row.offline_quality, row.ratio);
        os << model << ',' << cfg.n << ',' << t << ',' << buf << ',' << row.seen_total << ','
           << (row.event_en ? 1 : 0) << '\n';
    }
}

std::string results_csv(const ExperimentConfig& cfg, const RatioReport& report) {
    std::ostringstream os;
    write_results_csv(os, cfg, report);
    return os.str();
}

}  // namespace tsel::mc
