#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tsel {

/// Where a schedule's values live: real thresholds in (0,1] that never
/// increase, or positive integer thresholds that never decrease.
enum class ScheduleDomain { Real, Integer };

/// Parseable description of a threshold sequence. Text forms:
///   power:<alpha>   log:<offset>   poly:<exponent>[,<scale>]
///   const:<value>   explicit:<v1>,<v2>,...
struct ScheduleSpec {
    std::string kind;  // "power", "log", "poly", "const", "explicit"
    double alpha = 0.0;
    double offset = 0.0;
    double exponent = 0.0;
    double scale = 1.0;
    double value = 1.0;
    std::vector<double> values;

    static ScheduleSpec parse(const std::string& text);
    std::string text() const;
};

/// The sequence {c_i} driving an oblivious selection rule. c_i is the
/// criterion applied while picking the i-th sample, i.e. after i-1
/// acceptances; indices are 1-based. Immutable after construction.
class ThresholdSchedule {
public:
    enum class Kind { PowerDecay, LogGrowth, PolyGrowth, Constant, Explicit };

    static ThresholdSchedule power_decay(double alpha);
    static ThresholdSchedule log_growth(double offset);
    static ThresholdSchedule poly_growth(double exponent, double scale);
    static ThresholdSchedule constant(double value, ScheduleDomain domain);
    static ThresholdSchedule explicit_values(std::vector<double> values, ScheduleDomain domain);

    Kind kind() const { return kind_; }
    ScheduleDomain domain() const { return domain_; }

    /// c_i for i >= 1. Integer-domain schedules return an exact integer
    /// stored in a double.
    double value_at(std::int64_t i) const;

    /// c_i as an integer; only valid for Integer-domain schedules.
    std::int64_t integer_at(std::int64_t i) const;

    /// Decay exponent; only valid for PowerDecay schedules.
    double power_alpha() const;

    std::string spec_text() const { return spec_.text(); }
    const ScheduleSpec& spec() const { return spec_; }

private:
    friend ThresholdSchedule build_schedule(const ScheduleSpec& spec, ScheduleDomain domain);

    ThresholdSchedule(Kind kind, ScheduleDomain domain, ScheduleSpec spec)
        : kind_(kind), domain_(domain), spec_(std::move(spec)) {}

    Kind kind_;
    ScheduleDomain domain_;
    ScheduleSpec spec_;
};

/// Validates a spec against the target domain and constructs the schedule.
/// Throws std::invalid_argument on out-of-range parameters, empty explicit
/// sequences, or explicit sequences with the wrong monotonicity.
ThresholdSchedule build_schedule(const ScheduleSpec& spec, ScheduleDomain domain);

}  // namespace tsel
