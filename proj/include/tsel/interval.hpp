#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tsel/rng.hpp"
#include "tsel/schedule.hpp"

namespace tsel::interval {

/// Quality distribution on [0,1] whose complement gap Y = 1 - quality has
/// cdf G(y) = y^k. Larger k pushes qualities toward 1.
class PowerLawQuality {
public:
    explicit PowerLawQuality(double k);

    double k() const { return k_; }

    /// E[Y] for the gap variable: k / (k + 1).
    double mean_gap() const { return k_ / (k_ + 1.0); }

    /// Inverse-transform draw of the gap Y = U^(1/k).
    double draw_gap(Rng& rng) const { return gap_from_uniform(rng.uniform01()); }

    double gap_from_uniform(double u) const;

private:
    double k_;
    double inv_k_;
    int root_shape_;  // 1: identity, 2: sqrt, 4: sqrt(sqrt), 0: pow
};

struct IntervalTrace {
    std::vector<double> qualities;          // selected, in selection order
    std::vector<double> rejected;           // rejected, in stream order
    std::int64_t seen_total = 0;            // T_n
    std::vector<std::int64_t> wait_times;   // samples examined per selection
};

/// Runs the threshold rule: the i-th selection accepts the first sample x
/// with 1 - x <= c_i. Draws until n samples are selected.
IntervalTrace run_interval_selection(const ThresholdSchedule& s, const PowerLawQuality& q,
                                     std::int64_t n, Rng& rng);

/// 1 - average selected quality.
double mean_gap(const IntervalTrace& trace);
double gap_of(std::span<const double> qualities);

/// Closed form for E[mean gap of the first n selections] with a general
/// mean complement gap; the power-law case plugs in k/(k+1).
double expected_gap_given_mean(const ThresholdSchedule& s, double mean_complement_gap,
                               std::int64_t n);
double expected_gap_closed_form(const ThresholdSchedule& s, const PowerLawQuality& q,
                                std::int64_t n);

/// E[T_n] = sum of 1/c_i^k.
double expected_overhead_closed_form(const ThresholdSchedule& s, const PowerLawQuality& q,
                                     std::int64_t n);

/// Expectation of the m-th smallest of t draws with cdf x^k:
/// Gamma(t+1) Gamma(m+1/k) / (Gamma(t+1+1/k) Gamma(m)), via log-gamma.
double order_statistic_expectation(double k, std::int64_t t, std::int64_t m);

/// Both sides of sum_{m=1..n} Gamma(m+1/k)/Gamma(m)
///   = n Gamma(n+1+1/k) / ((1+1/k) Gamma(n+1)); exposed as a self-test.
std::pair<double, double> gamma_sum_identity(double k, std::int64_t n);

/// Asymptotic mean gap of the best n out of t samples:
/// (1/(1+1/k)) (n/(t+1))^(1/k).
double optimal_mean_gap_closed_form(double k, std::int64_t n, double t);

/// Euler-Maclaurin upper bound for the power-decay schedule:
/// (1/(1-alpha)) (n/E[T_n])^(1/k).
double euler_maclaurin_bound(double k, double alpha, std::int64_t n);

/// 1 - mean of the n largest samples.
double offline_best_n_gap(std::span<const double> samples, std::int64_t n);

enum class AdaptiveMode { AboveMean, AboveMedian };

/// Adaptive baselines for comparison: accept the first sample
/// unconditionally, then accept anything above the running mean (resp.
/// median) of the accepted set.
IntervalTrace run_adaptive_baseline(AdaptiveMode mode, const PowerLawQuality& q, std::int64_t n,
                                    Rng& rng);

/// Same rule on a fixed quality stream (test fixture entry). Throws if the
/// stream ends before n samples are accepted.
IntervalTrace run_adaptive_baseline_on(AdaptiveMode mode, std::span<const double> stream,
                                       std::int64_t n);

struct SelectionStats {
    double gap_sum = 0.0;         // sum of selected complement gaps
    std::int64_t seen_total = 0;  // T_n
};

/// Thresholds precomputed for a fixed (schedule, k, n): c_i alongside the
/// uniform-space acceptance cutoffs c_i^k.
struct PreparedIntervalRule {
    std::vector<double> thresholds;
    std::vector<double> accept_u;
};
PreparedIntervalRule prepare_interval_rule(const ThresholdSchedule& s, const PowerLawQuality& q,
                                           std::int64_t n);

/// Storage-free variant of run_interval_selection for large Monte Carlo
/// sweeps; same selection process, gaps accumulated instead of stored.
SelectionStats simulate_selection_stats(const PreparedIntervalRule& rule,
                                        const PowerLawQuality& q, Rng& rng);
SelectionStats simulate_selection_stats(const ThresholdSchedule& s, const PowerLawQuality& q,
                                        std::int64_t n, Rng& rng);

}  // namespace tsel::interval
