#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsel/schedule.hpp"
#include "tsel/skyline.hpp"

namespace tsel::mc {

enum class Model { Interval, Tree, Skyline };

/// Which pool the offline optimum may pick from: exactly the T_n samples
/// seen, or the adversarial T_{n+1}-1 prefix that includes everything
/// rejected while waiting for the (n+1)-th acceptance.
enum class OfflinePool { ExactN, Adversarial };

std::string model_name(Model model);
Model parse_model(const std::string& name);
std::string pool_name(OfflinePool pool);
OfflinePool parse_pool(const std::string& name);

/// Parseable skyline-space description:
///   uniform2d | product2d:<marginal>,<marginal> | cube:<d>
/// where a marginal is "uniform" or "pow<gamma>".
struct SpaceSpec {
    std::string kind = "uniform2d";
    double gamma_x = 1.0;
    double gamma_y = 1.0;
    int dim = 3;

    static SpaceSpec parse(const std::string& text);
    std::string text() const;
    sky::SkySpace build() const;
};

struct ExperimentConfig {
    Model model = Model::Interval;
    double k = 1.0;      // interval shape
    double p = 0.5;      // tree stopping probability
    SpaceSpec space;     // skyline domain
    ScheduleSpec schedule;
    std::int64_t n = 64;
    std::int64_t trials = 1000;
    std::uint64_t seed = 0x5EEDBA5Eull;
    OfflinePool pool = OfflinePool::Adversarial;
    int threads = 1;
};

struct TrialRow {
    double online_quality = 0.0;   // gap (interval/skyline) or coverage (tree)
    double offline_quality = 0.0;
    double ratio = 0.0;            // oriented so that >= 1 per trial
    std::int64_t seen_total = 0;   // T_n
    bool event_en = false;
    std::int64_t in_xn = 0;        // skyline diagnostic z
};

struct RatioReport {
    double mean_expected_ratio = 0.0;      // E[Q*/Q] or E[Q/Q*] per orientation
    double mean_expected_ratio_se = 0.0;
    double ratio_of_expectations = 0.0;    // E[Q*]/E[Q] or E[Q]/E[Q*]
    double ratio_of_expectations_se = 0.0;
    double event_rate = 0.0;
    double ratio_bound = 0.0;              // skyline: 1 + event_rate / c_n
    std::int64_t trials_run = 0;
    std::int64_t degenerate_trials = 0;    // offline optimum was zero; excluded from ratios
    std::vector<TrialRow> rows;
};

/// Runs cfg.trials independent trials with per-trial streams derived from
/// (seed, trial); results are bit-identical for any thread count.
RatioReport run_experiment(const ExperimentConfig& cfg);

/// Normal-approximation interval: mean +- z(level) * stderr.
std::pair<double, double> confidence_interval(std::span<const double> values, double level);

/// Stable per-trial CSV:
///   model,n,trial,online_quality,offline_quality,ratio,T_n,event_En
/// with floats at 12 significant digits.
void write_results_csv(std::ostream& os, const ExperimentConfig& cfg, const RatioReport& report);
std::string results_csv(const ExperimentConfig& cfg, const RatioReport& report);

}  // namespace tsel::mc
