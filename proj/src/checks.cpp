#include "tsel/checks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

#include "tsel/interval.hpp"
#include "tsel/montecarlo.hpp"
#include "tsel/skyline.hpp"
#include "tsel/stats.hpp"
#include "tsel/tree.hpp"

namespace tsel::checks {

namespace {

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return std::string(buf);
}

// Tracks the worst deviation (in standard errors) across sub-checks.
struct WorstZ {
    double z = 0.0;
    std::string where;

    void observe(double diff, double se, const std::string& label) {
        double score = se > 0.0 ? diff / se : (diff > 0.0 ? 1e30 : 0.0);
        if (score >= z) {
            z = score;
            where = label;
        }
    }
};

std::uint64_t sub_seed(const BatteryOptions& opt, std::uint64_t tag) {
    std::uint64_t x = opt.seed ^ (0xD1B54A32D192ED03ull * (tag + 1));
    return splitmix64_next(x);
}

constexpr double kOccupancyRatio = 1.0 - 2.0 / std::numbers::e;  // 1 - 2/e

}  // namespace

CheckResult check_gamma_identity() {
    double worst = 0.0;
    for (double k : {0.5, 1.0, 2.0, 3.0})
        for (std::int64_t n = 1; n <= 200; ++n) {
            auto [lhs, rhs] = interval::gamma_sum_identity(k, n);
            worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        }
    return {"gamma-sum-identity", worst < 1e-9,
            fmt("max rel err %.3g over k in {0.5,1,2,3}, n <= 200 (tol 1e-9)", worst)};
}

CheckResult check_order_statistics(const BatteryOptions& opt) {
    const std::int64_t trials = opt.fast ? 2000 : 100000;
    const double tol = opt.fast ? 5.0 : 3.0;
    struct Case { double k; std::int64_t t, m; };
    const Case cases[] = {{1, 3, 2}, {1, 9, 9}, {2, 20, 10}, {4, 50, 25}};

    bool pass = true;
    WorstZ worst;
    double worst_exact = 0.0;
    std::vector<double> draws;
    for (std::size_t ci = 0; ci < std::size(cases); ++ci) {
        const auto& c = cases[ci];
        const double target = interval::order_statistic_expectation(c.k, c.t, c.m);
        interval::PowerLawQuality q(c.k);
        Rng rng(sub_seed(opt, 100 + ci));
        RunningStats stats;
        draws.resize(static_cast<std::size_t>(c.t));
        for (std::int64_t trial = 0; trial < trials; ++trial) {
            for (auto& d : draws) d = q.draw_gap(rng);
            auto mth = draws.begin() + (c.m - 1);
            std::nth_element(draws.begin(), mth, draws.end());
            stats.add(*mth);
        }
        double diff = std::abs(stats.mean() - target);
        worst.observe(diff, stats.std_error(), fmt("k=%g t=%lld m=%lld", c.k, (long long)c.t,
                                                   (long long)c.m));
        if (diff > tol * stats.std_error()) pass = false;
    }
    // k = 1 collapses to m/(t+1); require 12-digit agreement.
    for (std::int64_t t : {3, 9})
        for (std::int64_t m = 1; m <= t; ++m) {
            double err = std::abs(interval::order_statistic_expectation(1.0, t, m) -
                                  static_cast<double>(m) / static_cast<double>(t + 1));
            worst_exact = std::max(worst_exact, err);
        }
    if (worst_exact > 1e-12) pass = false;
    return {"order-statistic-formula", pass,
            fmt("worst |z| = %.2f (%s) at %lld trials; k=1 exact err %.2g", worst.z,
                worst.where.c_str(), (long long)trials, worst_exact)};
}

CheckResult check_interval_closed_forms(const BatteryOptions& opt) {
    const std::int64_t trials = opt.fast ? 1000 : 100000;
    const double tol = opt.fast ? 5.0 : 3.0;
    bool pass = true;
    WorstZ worst;
    std::size_t cfg_index = 0;
    for (double k : {1.0, 2.0, 4.0})
        for (double alpha : {0.0, 0.25, 0.5})
            for (std::int64_t n : {16, 64}) {
                interval::PowerLawQuality q(k);
                auto schedule = ThresholdSchedule::power_decay(alpha);
                auto rule = interval::prepare_interval_rule(schedule, q, n);
                const double mean_for_target =
                    std::isnan(opt.mean_gap_override) ? q.mean_gap() : opt.mean_gap_override;
                const double gap_target =
                    interval::expected_gap_given_mean(schedule, mean_for_target, n);
                const double overhead_target =
                    interval::expected_overhead_closed_form(schedule, q, n);

                const std::uint64_t seed = sub_seed(opt, 200 + cfg_index++);
                RunningStats gap_stats, t_stats;
                for (std::int64_t t = 0; t < trials; ++t) {
                    Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(t));
                    auto st = interval::simulate_selection_stats(rule, q, rng);
                    gap_stats.add(st.gap_sum / static_cast<double>(n));
                    t_stats.add(static_cast<double>(st.seen_total));
                }
                auto label = fmt("k=%g a=%g n=%lld", k, alpha, (long long)n);
                double gap_diff = std::abs(gap_stats.mean() - gap_target);
                double t_diff = std::abs(t_stats.mean() - overhead_target);
                worst.observe(gap_diff, gap_stats.std_error(), label + " gap");
                worst.observe(t_diff, t_stats.std_error(), label + " T_n");
                if (gap_diff > tol * gap_stats.std_error() + 1e-15) pass = false;
                if (t_diff > tol * t_stats.std_error() + 1e-15) pass = false;
            }
    return {"interval-closed-forms", pass,
            fmt("worst |z| = %.2f (%s) over 18 configs at %lld trials", worst.z,
                worst.where.c_str(), (long long)trials)};
}

CheckResult check_interval_ratio_bound(const BatteryOptions& opt) {
    const std::int64_t trials = opt.fast ? 1000 : 10000;
    bool pass = true;
    std::ostringstream detail;
    std::size_t cfg_index = 0;
    for (double k : {1.0, 2.0})
        for (double alpha : {0.0, 0.5}) {
            mc::ExperimentConfig cfg;
            cfg.model = mc::Model::Interval;
            cfg.k = k;
            cfg.schedule = ScheduleSpec::parse(fmt("power:%g", alpha));
            cfg.n = 64;
            cfg.trials = trials;
            cfg.seed = sub_seed(opt, 300 + cfg_index++);
            cfg.pool = mc::OfflinePool::Adversarial;
            auto report = mc::run_experiment(cfg);
            const double bound = 16.0 / (1.0 - alpha);
            if (!(report.ratio_of_expectations <= bound)) pass = false;
            if (!(report.mean_expected_ratio <= bound)) pass = false;
            detail << fmt("k=%g a=%g: E[Gap]/E[Gap*]=%.3f<=%.0f ", k, alpha,
                          report.ratio_of_expectations, bound);
        }
    // The integral-estimate bound must dominate the exact closed form.
    for (double k : {0.5, 1.0, 2.0, 4.0})
        for (double alpha : {0.0, 0.25, 0.5, 0.9})
            for (std::int64_t n : {16, 64, 256, 1024}) {
                interval::PowerLawQuality q(k);
                auto schedule = ThresholdSchedule::power_decay(alpha);
                double closed = interval::expected_gap_closed_form(schedule, q, n);
                double bound = interval::euler_maclaurin_bound(k, alpha, n);
                if (!(closed <= bound)) {
                    pass = false;
                    detail << fmt("bound violated at k=%g a=%g n=%lld ", k, alpha, (long long)n);
                }
            }
    return {"interval-ratio-bound", pass, detail.str() + "+ gap bound inequality grid"};
}

CheckResult check_tree_oracle_equivalence(const BatteryOptions& opt) {
    Rng rng(sub_seed(opt, 400));
    const double ps[] = {0.3, 0.5, 0.7};
    std::int64_t mismatches = 0;
    for (int instance = 0; instance < 500; ++instance) {
        double p = ps[instance % 3];
        std::int64_t size = 1 + static_cast<std::int64_t>(rng.below(12));
        std::vector<tree::TreeNode> candidates;
        candidates.reserve(static_cast<std::size_t>(size));
        for (std::int64_t i = 0; i < size; ++i)
            candidates.push_back(tree::sample_tree_node(p, rng));
        if (instance % 7 == 0 && size >= 2)
            candidates[1] = candidates[0];  // force duplicates now and then
        std::int64_t n = 1 + static_cast<std::int64_t>(rng.below(
                                 static_cast<std::uint64_t>(std::min<std::int64_t>(6, size))));
        if (tree::offline_optimal_coverage(candidates, n) !=
            tree::brute_force_optimal_coverage(candidates, n))
            ++mismatches;
    }
    return {"tree-oracle-equivalence", mismatches == 0,
            fmt("%lld mismatches over 500 random instances (|candidates|<=12, n<=6)",
                (long long)mismatches)};
}

CheckResult check_tree_ratio_bound(const BatteryOptions& opt) {
    const std::int64_t trials = opt.fast ? 200 : 1000;
    bool pass = true;
    std::ostringstream detail;

    auto run = [&](const std::string& schedule_text, double bound, const char* label) {
        mc::ExperimentConfig cfg;
        cfg.model = mc::Model::Tree;
        cfg.p = 0.5;
        cfg.schedule = ScheduleSpec::parse(schedule_text);
        cfg.n = 64;
        cfg.trials = trials;
        cfg.seed = sub_seed(opt, 500 + std::hash<std::string>{}(schedule_text) % 97);
        cfg.pool = mc::OfflinePool::Adversarial;
        auto report = mc::run_experiment(cfg);
        if (!(report.mean_expected_ratio <= bound)) pass = false;
        if (!(report.ratio_of_expectations <= bound)) pass = false;
        detail << fmt("%s: E[C*/C]=%.3f E[C*]/E[C]=%.3f <= %.2f; ", label,
                      report.mean_expected_ratio, report.ratio_of_expectations, bound);
    };

    {
        // c_i = ceil(log2 i) + 2; f(i) = c_i - log2(i).
        auto schedule = ThresholdSchedule::log_growth(2.0);
        double f_n = static_cast<double>(schedule.integer_at(64)) - std::log2(64.0);
        double f_half = static_cast<double>(schedule.integer_at(32)) - std::log2(32.0);
        double bound = 1.5 + 2.0 * (2.0 + f_n) / (kOccupancyRatio * f_half);
        run("log:2", bound, "log-growing");
    }
    {
        // Constant c: at most 2^(c+1) vertices live in the first c levels.
        double c = 4.0;
        double bound = 1.5 + std::pow(2.0, c + 1.0) / (std::pow(2.0, c) * kOccupancyRatio);
        run("const:4", bound, "constant");
    }
    return {"tree-ratio-bound", pass, detail.str()};
}

CheckResult check_level_occupancy(const BatteryOptions& opt) {
    const std::int64_t trials = opt.fast ? 2000 : 10000;
    const double tol = opt.fast ? 5.0 : 3.0;
    const std::int64_t n = 64;
    const std::int64_t balls = n / 2;
    const int level = 5;  // log2(n/2)
    const double bins = static_cast<double>(std::int64_t{1} << level);

    Rng rng(sub_seed(opt, 600));
    RunningStats stats;
    std::vector<tree::TreeNode> nodes(static_cast<std::size_t>(balls));
    for (std::int64_t t = 0; t < trials; ++t) {
        for (auto& node : nodes) {
            node.path.clear();
            for (int b = 0; b < level; ++b) node.path.push_back(rng.coin() ? 'R' : 'L');
        }
        stats.add(static_cast<double>(tree::independence_diagnostic(nodes, level)));
    }
    // Exact occupancy mean for `balls` balls in `bins` bins; the 1 - 1/e
    // constant is its large-n limit and must sit within 1% of it.
    const double exact = bins * (1.0 - std::pow(1.0 - 1.0 / bins, static_cast<double>(balls)));
    const double asymptotic = static_cast<double>(balls) * (1.0 - 1.0 / std::numbers::e);
    double diff = std::abs(stats.mean() - exact);
    bool pass = diff <= tol * stats.std_error() &&
                std::abs(asymptotic - exact) / exact <= 0.01;
    return {"level-occupancy", pass,
            fmt("mean N = %.3f vs exact %.3f (|z| = %.2f), asymptote %.3f within 1%%",
                stats.mean(), exact, diff / stats.std_error(), asymptotic)};
}

namespace {

double brute_force_best_gap(std::span<const sky::SkyPoint> points, std::int64_t n,
                            const sky::SkySpace& space) {
    const int m = static_cast<int>(points.size());
    if (n >= m) return sky::staircase_gap(points, space);
    double best = 1.0;
    std::vector<sky::SkyPoint> subset;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        if (std::popcount(mask) != static_cast<int>(n)) continue;
        subset.clear();
        for (int j = 0; j < m; ++j)
            if (mask & (1u << j)) subset.push_back(points[static_cast<std::size_t>(j)]);
        best = std::min(best, sky::staircase_gap(subset, space));
    }
    return best;
}

std::vector<sky::SkyPoint> brute_force_maximal(std::vector<sky::SkyPoint> points) {
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.coords < b.coords; });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    std::vector<sky::SkyPoint> keep;
    for (const auto& p : points) {
        bool dominated = false;
        for (const auto& q : points)
            if (!(q == p) && sky::dominates(q, p)) dominated = true;
        if (!dominated) keep.push_back(p);
    }
    std::sort(keep.begin(), keep.end(),
              [](const auto& a, const auto& b) { return a.coords[0] < b.coords[0]; });
    return keep;
}

}  // namespace

CheckResult check_sky_oracle_equivalence(const BatteryOptions& opt) {
    Rng rng(sub_seed(opt, 700));
    auto uniform = sky::SkySpace::uniform2d();
    auto product = sky::SkySpace::product2d(sky::power_marginal(2.0), sky::power_marginal(0.5));

    std::int64_t gap_mismatches = 0;
    double worst_gap = 0.0;
    for (int instance = 0; instance < 500; ++instance) {
        const auto& space = instance % 4 == 3 ? product : uniform;
        std::int64_t size = 1 + static_cast<std::int64_t>(rng.below(12));
        std::vector<sky::SkyPoint> points;
        for (std::int64_t i = 0; i < size; ++i) points.push_back(space.sample(rng));
        if (instance % 9 == 0 && size >= 2) points[1] = points[0];
        std::int64_t n = 1 + static_cast<std::int64_t>(rng.below(5));
        double dp = sky::offline_optimal_gap_2d(points, n, space);
        double brute = brute_force_best_gap(points, n, space);
        worst_gap = std::max(worst_gap, std::abs(dp - brute));
        if (std::abs(dp - brute) > 1e-12) ++gap_mismatches;
    }

    std::int64_t maximal_mismatches = 0;
    for (int instance = 0; instance < 200; ++instance) {
        std::int64_t size = 1 + static_cast<std::int64_t>(rng.below(30));
        std::vector<sky::SkyPoint> points;
        for (std::int64_t i = 0; i < size; ++i)
            points.push_back(sky::SkyPoint{{rng.uniform01(), rng.uniform01()}});
        if (size >= 3) {
            points[1] = points[0];                                      // duplicate
            points[2] = sky::SkyPoint{{points[0].coords[0] * 0.5,       // dominated
                                       points[0].coords[1] * 0.5}};
        }
        if (sky::maximal_points(points) != brute_force_maximal(points)) ++maximal_mismatches;
    }

    return {"skyline-oracle-equivalence", gap_mismatches == 0 && maximal_mismatches == 0,
            fmt("gap oracle: %lld mismatches (worst diff %.2g); maximal: %lld mismatches",
                (long long)gap_mismatches, worst_gap, (long long)maximal_mismatches)};
}

CheckResult check_threshold_region_measure(const BatteryOptions& opt) {
    const std::int64_t samples = opt.fast ? 100000 : 1000000;
    const double tol = opt.fast ? 5.0 : 3.0;
    auto space = sky::SkySpace::uniform2d();
    bool pass = true;
    WorstZ worst;
    std::size_t ci = 0;
    for (double c : {0.05, 0.1, 0.3}) {
        double exact = sky::threshold_region_measure(space, c).value;
        Rng rng(sub_seed(opt, 800 + ci++));
        std::int64_t hits = 0;
        for (std::int64_t i = 0; i < samples; ++i)
            if (space.upper_measure(space.sample(rng)) <= c) ++hits;
        double f = static_cast<double>(hits) / static_cast<double>(samples);
        double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(samples));
        double diff = std::abs(f - exact);
        worst.observe(diff, se, fmt("c=%g", c));
        if (diff > tol * se) pass = false;
    }
    // Cube path: the Monte Carlo estimate must agree with the Erlang tail
    // closed form c * sum_{j<d} ln(1/c)^j / j!.
    {
        auto cube = sky::SkySpace::uniform_cube(3);
        double c = 0.1;
        double t = std::log(1.0 / c);
        double exact = c * (1.0 + t + t * t / 2.0);
        auto est = sky::threshold_region_measure(cube, c, samples, sub_seed(opt, 850));
        double diff = std::abs(est.value - exact);
        worst.observe(diff, est.std_error, "cube3 c=0.1");
        if (diff > tol * est.std_error) pass = false;
        if (!(est.std_error < 0.005)) pass = false;
    }
    return {"threshold-region-measure", pass,
            fmt("worst |z| = %.2f (%s) at %lld samples", worst.z, worst.where.c_str(),
                (long long)samples)};
}

CheckResult check_sky_ratio_2d(const BatteryOptions& opt) {
    const std::int64_t trials = opt.fast ? 200 : 1000;
    bool pass = true;
    std::ostringstream detail;
    const std::int64_t n = 128;
    const double c_n = std::pow(static_cast<double>(n), -0.25);
    std::size_t si = 0;
    for (const std::string space_text : {"uniform2d", "product2d:pow2,pow0.5"}) {
        mc::ExperimentConfig cfg;
        cfg.model = mc::Model::Skyline;
        cfg.space = mc::SpaceSpec::parse(space_text);
        cfg.schedule = ScheduleSpec::parse("power:0.25");
        cfg.n = n;
        cfg.trials = trials;
        cfg.seed = sub_seed(opt, 900 + si++);
        cfg.pool = mc::OfflinePool::Adversarial;
        auto report = mc::run_experiment(cfg);

        // z must rarely fall below n*c_n/2, or below alpha*n/4 for the
        // threshold-ratio constant alpha = c_n/c_(n/2).
        const double alpha_ratio = c_n / std::pow(static_cast<double>(n / 2), -0.25);
        std::int64_t low_z = 0, low_z_alpha = 0;
        for (const auto& row : report.rows) {
            if (static_cast<double>(row.in_xn) < static_cast<double>(n) * c_n / 2.0) ++low_z;
            if (static_cast<double>(row.in_xn) < alpha_ratio * static_cast<double>(n) / 4.0)
                ++low_z_alpha;
        }
        double low_z_rate = static_cast<double>(low_z) / static_cast<double>(trials);
        double low_z_alpha_rate = static_cast<double>(low_z_alpha) / static_cast<double>(trials);

        if (!(report.ratio_bound <= 1.05)) pass = false;
        if (!(report.mean_expected_ratio <= 1.05)) pass = false;
        if (!(low_z_rate <= 0.01)) pass = false;
        if (!(low_z_alpha_rate <= 0.01)) pass = false;
        detail << fmt("%s: bound=%.4f E[Gap/Gap*]=%.4f Pr[z<nc/2]=%.3f; ", space_text.c_str(),
                      report.ratio_bound, report.mean_expected_ratio, low_z_rate);
    }
    return {"skyline-ratio-2d", pass, detail.str() + "(limits 1.05, 1.05, 0.01)"};
}

CheckResult check_cube_event_rate(const BatteryOptions& opt) {
    const std::int64_t trials = opt.fast ? 200 : 1000;
    const std::int64_t n = 128;
    const double c_n = std::pow(static_cast<double>(n), -0.25);
    mc::ExperimentConfig cfg;
    cfg.model = mc::Model::Skyline;
    cfg.space = mc::SpaceSpec::parse("cube:3");
    cfg.schedule = ScheduleSpec::parse("power:0.25");
    cfg.n = n;
    cfg.trials = trials;
    cfg.seed = sub_seed(opt, 1000);
    cfg.pool = mc::OfflinePool::Adversarial;
    auto report = mc::run_experiment(cfg);
    bool pass = report.event_rate <= c_n / 10.0 && report.ratio_bound <= 1.1;
    return {"cube-event-rate", pass,
            fmt("Pr[E_n] = %.4f <= %.4f; ratio bound %.4f <= 1.1", report.event_rate, c_n / 10.0,
                report.ratio_bound)};
}

CheckResult check_determinism(const BatteryOptions& opt) {
    bool pass = true;
    std::ostringstream detail;
    const char* schedules[] = {"power:0.5", "log:2", "power:0.25"};
    const mc::Model models[] = {mc::Model::Interval, mc::Model::Tree, mc::Model::Skyline};
    for (int mi = 0; mi < 3; ++mi) {
        mc::ExperimentConfig cfg;
        cfg.model = models[mi];
        cfg.k = 1.0;
        cfg.p = 0.5;
        cfg.schedule = ScheduleSpec::parse(schedules[mi]);
        cfg.n = 16;
        cfg.trials = 200;
        cfg.seed = sub_seed(opt, 1100 + static_cast<std::uint64_t>(mi));
        std::string reference;
        bool model_ok = true;
        for (int threads : {1, 2, 8, 2}) {
            cfg.threads = threads;
            std::string csv = mc::results_csv(cfg, mc::run_experiment(cfg));
            if (reference.empty())
                reference = csv;
            else if (csv != reference)
                model_ok = false;
        }
        pass = pass && model_ok;
        detail << mc::model_name(cfg.model) << (model_ok ? " ok; " : " MISMATCH; ");
    }
    return {"determinism", pass, detail.str() + "csv byte-compared across 1/2/8 threads"};
}

std::vector<CheckResult> run_verification_battery(const BatteryOptions& opt) {
    return {
        check_gamma_identity(),
        check_order_statistics(opt),
        check_interval_closed_forms(opt),
        check_threshold_region_measure(opt),
        check_tree_oracle_equivalence(opt),
        check_sky_oracle_equivalence(opt),
    };
}

std::vector<CheckResult> run_acceptance_suite(const BatteryOptions& opt) {
    return {
        check_gamma_identity(),
        check_order_statistics(opt),
        check_interval_closed_forms(opt),
        check_interval_ratio_bound(opt),
        check_tree_oracle_equivalence(opt),
        check_tree_ratio_bound(opt),
        check_level_occupancy(opt),
        check_sky_oracle_equivalence(opt),
        check_threshold_region_measure(opt),
        check_sky_ratio_2d(opt),
        check_cube_event_rate(opt),
        check_determinism(opt),
    };
}

}  // namespace tsel::checks
