#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tsel/rng.hpp"
#include "tsel/schedule.hpp"

namespace tsel::sky {

struct SkyPoint {
    std::vector<double> coords;

    bool operator==(const SkyPoint&) const = default;
};

/// Weak componentwise dominance: every coordinate of b is <= the matching
/// coordinate of a (equal points dominate each other).
bool dominates(const SkyPoint& a, const SkyPoint& b);

/// Invertible marginal cdf on [0,1].
struct Marginal {
    std::function<double(double)> cdf;
    std::function<double(double)> inverse;
    std::string name;
};

Marginal uniform_marginal();
/// F(x) = x^gamma, gamma > 0.
Marginal power_marginal(double gamma);

/// A measured, partially ordered domain: the unit square under the
/// uniform or a product measure, or the uniform unit cube in d >= 2
/// dimensions. Immutable descriptor; safe to share across threads.
class SkySpace {
public:
    enum class Kind { Uniform2D, Product2D, UniformCube };

    static SkySpace uniform2d();
    static SkySpace product2d(Marginal x, Marginal y);
    static SkySpace uniform_cube(int dimension);

    Kind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    const std::string& describe() const { return description_; }

    /// mu(U(p)): probability that a fresh sample dominates p.
    double upper_measure(const SkyPoint& p) const;

    SkyPoint sample(Rng& rng) const;

    /// Maps through the marginal cdfs; the identity except for Product2D.
    /// Preserves dominance, upper measures, and acceptance decisions.
    SkyPoint to_uniform(const SkyPoint& p) const;
    SkyPoint from_uniform(const SkyPoint& p) const;

private:
    SkySpace(Kind kind, int dimension, std::string description)
        : kind_(kind), dimension_(dimension), description_(std::move(description)) {}

    Kind kind_;
    int dimension_;
    std::string description_;
    Marginal mx_, my_;  // Product2D only
};

struct SkyTrace {
    std::vector<SkyPoint> selected;
    std::vector<SkyPoint> rejected;
    std::int64_t seen_total = 0;
    std::vector<std::int64_t> wait_times;
    std::int64_t in_xn_count = 0;  // z = |S_n intersect X_n|
};

/// Threshold rule on the upper-set measure: the i-th selection accepts
/// the first point p with mu(U(p)) <= c_i.
SkyTrace run_sky_selection(const SkySpace& space, const ThresholdSchedule& s, std::int64_t n,
                           Rng& rng);

/// Gap(S) = 1 - mu(D(S)), exact for 2-d spaces via the maximal-point
/// staircase in uniform coordinates. Empty sets have gap 1.
double staircase_gap(std::span<const SkyPoint> points, const SkySpace& space);

/// Antichain of points not dominated by any other input point; exact
/// duplicates are collapsed. Sorted by first coordinate ascending.
std::vector<SkyPoint> maximal_points(std::vector<SkyPoint> points);

/// Exact min gap over n-subsets of points (2-d only): dynamic program
/// over the maximal points sorted by x.
double offline_optimal_gap_2d(std::span<const SkyPoint> points, std::int64_t n,
                              const SkySpace& space);

/// True iff some rejected point is neither dominated by nor equal to any
/// selected point. Works in any dimension.
bool detect_event_en(std::span<const SkyPoint> selected, std::span<const SkyPoint> rejected);
bool detect_event_en(const SkyTrace& trace);

/// 1 + Pr[event]/c_n: upper bound on the expected competitive ratio.
double ratio_bound_from_event_rate(double event_rate, double c_n);
double ratio_bound_estimate(std::span<const SkyTrace> traces, const ThresholdSchedule& s,
                            std::int64_t n);

struct MeasureEstimate {
    double value = 0.0;
    double std_error = 0.0;  // zero when the value is exact
};

/// mu(X_c) for X_c = {p : mu(U(p)) <= c}. Exact c(1 + ln(1/c)) for the
/// 2-d spaces; Monte Carlo with reported standard error for cubes.
MeasureEstimate threshold_region_measure(const SkySpace& space, double c,
                                         std::int64_t mc_samples = 1'000'000,
                                         std::uint64_t mc_seed = 0x7A11E5);

/// Point z dominating y with mu(U(z)) = c, for c <= mu(U(y)): complement
/// coordinates are scaled toward the top corner, with a bisection fallback
/// if the direct solve drifts.
SkyPoint continuity_witness(const SkySpace& space, const SkyPoint& y, double c);

/// Randomized check of measure continuity: samples y and c in
/// [0, mu(U(y))] and requires a witness within 1e-9 every time.
bool measure_continuity_probe(const SkySpace& space, std::int64_t trials, Rng& rng);

/// Number of points with upper measure <= c.
std::int64_t count_in_region(std::span<const SkyPoint> points, const SkySpace& space, double c);

}  // namespace tsel::sky
