#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace tsel::checks {

struct CheckResult {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct BatteryOptions {
    /// Reduced trial counts with tolerances widened to 5 standard errors.
    bool fast = false;
    std::uint64_t seed = 2;
    /// Test hook: overrides the mean complement gap fed to the closed-form
    /// gap target, so a deliberately wrong constant makes the check fail.
    double mean_gap_override = std::numeric_limits<double>::quiet_NaN();
};

CheckResult check_gamma_identity();
CheckResult check_order_statistics(const BatteryOptions& opt);
CheckResult check_interval_closed_forms(const BatteryOptions& opt);
CheckResult check_interval_ratio_bound(const BatteryOptions& opt);
CheckResult check_tree_oracle_equivalence(const BatteryOptions& opt);
CheckResult check_tree_ratio_bound(const BatteryOptions& opt);
CheckResult check_level_occupancy(const BatteryOptions& opt);
CheckResult check_sky_oracle_equivalence(const BatteryOptions& opt);
CheckResult check_threshold_region_measure(const BatteryOptions& opt);
CheckResult check_sky_ratio_2d(const BatteryOptions& opt);
CheckResult check_cube_event_rate(const BatteryOptions& opt);
CheckResult check_determinism(const BatteryOptions& opt);

/// The `verify` subcommand's battery: identities, Monte Carlo consistency
/// of the closed forms, the region-measure formula, and both offline
/// oracle cross-equivalence suites.
std::vector<CheckResult> run_verification_battery(const BatteryOptions& opt);

/// Full acceptance suite, one result per criterion.
std::vector<CheckResult> run_acceptance_suite(const BatteryOptions& opt);

}  // namespace tsel::checks
