#include "tsel/skyline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsel/stats.hpp"

namespace tsel::sky {

bool dominates(const SkyPoint& a, const SkyPoint& b) {
    if (a.coords.size() != b.coords.size())
        throw std::invalid_argument("dominance between points of different dimension");
    for (std::size_t j = 0; j < a.coords.size(); ++j)
        if (b.coords[j] > a.coords[j]) return false;
    return true;
}

Marginal uniform_marginal() {
    auto id = [](double v) { return v; };
    return Marginal{id, id, "uniform"};
}

Marginal power_marginal(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("power marginal needs gamma > 0");
    std::string name = "pow" + [&] {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", gamma);
        return std::string(buf);
    }();
    return Marginal{[gamma](double x) { return std::pow(x, gamma); },
                    [gamma](double u) { return std::pow(u, 1.0 / gamma); }, name};
}

SkySpace SkySpace::uniform2d() { return SkySpace(Kind::Uniform2D, 2, "uniform2d"); }

SkySpace SkySpace::product2d(Marginal x, Marginal y) {
    if (!x.cdf || !x.inverse || !y.cdf || !y.inverse)
        throw std::invalid_argument("product marginals need cdf and inverse");
    SkySpace space(Kind::Product2D, 2, "product2d:" + x.name + "," + y.name);
    space.mx_ = std::move(x);
    space.my_ = std::move(y);
    return space;
}

SkySpace SkySpace::uniform_cube(int dimension) {
    if (dimension < 2) throw std::invalid_argument("cube dimension must be >= 2");
    return SkySpace(Kind::UniformCube, dimension, "cube:" + std::to_string(dimension));
}

double SkySpace::upper_measure(const SkyPoint& p) const {
    if (static_cast<int>(p.coords.size()) != dimension_)
        throw std::invalid_argument("point dimension does not match the space");
    if (kind_ == Kind::Product2D)
        return (1.0 - mx_.cdf(p.coords[0])) * (1.0 - my_.cdf(p.coords[1]));
    double m = 1.0;
    for (double v : p.coords) m *= 1.0 - v;
    return m;
}

SkyPoint SkySpace::sample(Rng& rng) const {
    SkyPoint p;
    p.coords.resize(static_cast<std::size_t>(dimension_));
    for (auto& v : p.coords) v = rng.uniform01();
    if (kind_ == Kind::Product2D) {
        p.coords[0] = mx_.inverse(p.coords[0]);
        p.coords[1] = my_.inverse(p.coords[1]);
    }
    return p;
}

SkyPoint SkySpace::to_uniform(const SkyPoint& p) const {
    if (kind_ != Kind::Product2D) return p;
    return SkyPoint{{mx_.cdf(p.coords[0]), my_.cdf(p.coords[1])}};
}

SkyPoint SkySpace::from_uniform(const SkyPoint& p) const {
    if (kind_ != Kind::Product2D) return p;
    return SkyPoint{{mx_.inverse(p.coords[0]), my_.inverse(p.coords[1])}};
}

SkyTrace run_sky_selection(const SkySpace& space, const ThresholdSchedule& s, std::int64_t n,
                           Rng& rng) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    if (s.domain() != ScheduleDomain::Real)
        throw std::invalid_argument("skyline model needs a real-valued schedule");
    SkyTrace trace;
    trace.selected.reserve(static_cast<std::size_t>(n));
    trace.wait_times.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 1; i <= n; ++i) {
        const double c = s.value_at(i);
        std::int64_t wait = 0;
        for (;;) {
            SkyPoint p = space.sample(rng);
            ++trace.seen_total;
            ++wait;
            if (space.upper_measure(p) <= c) {
                trace.selected.push_back(std::move(p));
                break;
            }
            trace.rejected.push_back(std::move(p));
        }
        trace.wait_times.push_back(wait);
    }
    trace.in_xn_count = count_in_region(trace.selected, space, s.value_at(n));
    return trace;
}

namespace {

// Points must be maximal, sorted by x ascending (y strictly descending).
double staircase_area(std::span<const SkyPoint> maximal) {
    KahanSum area;
    double prev_x = 0.0;
    for (const auto& p : maximal) {
        area.add((p.coords[0] - prev_x) * p.coords[1]);
        prev_x = p.coords[0];
    }
    return area.value();
}

std::vector<SkyPoint> uniform_maximal(std::span<const SkyPoint> points, const SkySpace& space) {
    std::vector<SkyPoint> mapped;
    mapped.reserve(points.size());
    for (const auto& p : points) mapped.push_back(space.to_uniform(p));
    return maximal_points(std::move(mapped));
}

}  // namespace

std::vector<SkyPoint> maximal_points(std::vector<SkyPoint> points) {
    if (points.empty()) return points;
    if (points[0].coords.size() == 2) {
        std::sort(points.begin(), points.end(), [](const SkyPoint& a, const SkyPoint& b) {
            if (a.coords[0] != b.coords[0]) return a.coords[0] > b.coords[0];
            return a.coords[1] > b.coords[1];
        });
        std::vector<SkyPoint> keep;
        double best_y = -1.0;
        for (auto& p : points) {
            if (p.coords[1] > best_y) {
                best_y = p.coords[1];
                keep.push_back(std::move(p));
            }
        }
        std::reverse(keep.begin(), keep.end());
        return keep;
    }
    // General dimension: quadratic filter, fine at test scales.
    std::sort(points.begin(), points.end(),
              [](const SkyPoint& a, const SkyPoint& b) { return a.coords < b.coords; });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    std::vector<SkyPoint> keep;
    for (const auto& p : points) {
        bool dominated = false;
        for (const auto& q : points) {
            if (&q == &p || q == p) continue;
            if (dominates(q, p)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) keep.push_back(p);
    }
    return keep;
}

double staircase_gap(std::span<const SkyPoint> points, const SkySpace& space) {
    if (space.dimension() != 2)
        throw std::invalid_argument("staircase_gap is exact only for 2-d spaces");
    if (points.empty()) return 1.0;
    double gap = 1.0 - staircase_area(uniform_maximal(points, space));
    return std::clamp(gap, 0.0, 1.0);
}

double offline_optimal_gap_2d(std::span<const SkyPoint> points, std::int64_t n,
                              const SkySpace& space) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    if (space.dimension() != 2)
        throw std::invalid_argument("offline_optimal_gap_2d needs a 2-d space");
    if (points.empty()) throw std::invalid_argument("need at least one point");

    auto maximal = uniform_maximal(points, space);
    const std::int64_t m = static_cast<std::int64_t>(maximal.size());
    if (m <= n) {
        double gap = 1.0 - staircase_area(maximal);
        return std::clamp(gap, 0.0, 1.0);
    }

    // best[i]: max area of a chain of j picks ending at maximal point i,
    // rolled over j. Predecessor x_0 = 0 models the left edge.
    const auto mu = static_cast<std::size_t>(m);
    std::vector<double> prev(mu), cur(mu);
    for (std::size_t i = 0; i < mu; ++i)
        prev[i] = maximal[i].coords[0] * maximal[i].coords[1];
    double best = *std::max_element(prev.begin(), prev.end());
    for (std::int64_t j = 2; j <= n; ++j) {
        for (std::size_t i = 0; i < mu; ++i) {
            double value = -1.0;
            for (std::size_t p = 0; p < i; ++p) {
                double extended =
                    prev[p] + (maximal[i].coords[0] - maximal[p].coords[0]) * maximal[i].coords[1];
                value = std::max(value, extended);
            }
            cur[i] = value;
        }
        std::swap(prev, cur);
        for (double v : prev) best = std::max(best, v);
    }
    return std::clamp(1.0 - best, 0.0, 1.0);
}

bool detect_event_en(std::span<const SkyPoint> selected, std::span<const SkyPoint> rejected) {
    for (const auto& r : rejected) {
        bool covered = false;
        for (const auto& s : selected) {
            if (dominates(s, r)) {
                covered = true;
                break;
            }
        }
        if (!covered) return true;
    }
    return false;
}

bool detect_event_en(const SkyTrace& trace) {
    return detect_event_en(trace.selected, trace.rejected);
}

double ratio_bound_from_event_rate(double event_rate, double c_n) {
    return 1.0 + event_rate / c_n;
}

double ratio_bound_estimate(std::span<const SkyTrace> traces, const ThresholdSchedule& s,
                            std::int64_t n) {
    if (traces.empty()) throw std::invalid_argument("need at least one trace");
    std::int64_t hits = 0;
    for (const auto& trace : traces) hits += detect_event_en(trace) ? 1 : 0;
    double rate = static_cast<double>(hits) / static_cast<double>(traces.size());
    return ratio_bound_from_event_rate(rate, s.value_at(n));
}

MeasureEstimate threshold_region_measure(const SkySpace& space, double c,
                                         std::int64_t mc_samples, std::uint64_t mc_seed) {
    if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("need c in (0, 1]");
    if (space.dimension() == 2)
        return MeasureEstimate{c * (1.0 + std::log(1.0 / c)), 0.0};
    if (mc_samples < 1) throw std::invalid_argument("need mc_samples >= 1");
    Rng rng(mc_seed);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < mc_samples; ++i)
        if (space.upper_measure(space.sample(rng)) <= c) ++hits;
    double f = static_cast<double>(hits) / static_cast<double>(mc_samples);
    double se = std::sqrt(f * (1.0 - f) / static_cast<double>(mc_samples));
    return MeasureEstimate{f, se};
}

SkyPoint continuity_witness(const SkySpace& space, const SkyPoint& y, double c) {
    const double m0 = space.upper_measure(y);
    if (!(c >= 0.0 && c <= m0))
        throw std::invalid_argument("witness target must lie in [0, upper_measure(y)]");
    if (m0 == 0.0) return y;

    const int d = space.dimension();
    SkyPoint yu = space.to_uniform(y);
    auto at_scale = [&](double t) {
        SkyPoint zu;
        zu.coords.resize(yu.coords.size());
        for (std::size_t j = 0; j < yu.coords.size(); ++j)
            zu.coords[j] = 1.0 - t * (1.0 - yu.coords[j]);
        SkyPoint z = space.from_uniform(zu);
        for (std::size_t j = 0; j < z.coords.size(); ++j)
            z.coords[j] = std::max(z.coords[j], y.coords[j]);
        return z;
    };

    double t = std::pow(c / m0, 1.0 / static_cast<double>(d));
    SkyPoint z = at_scale(t);
    if (std::abs(space.upper_measure(z) - c) <= 1e-9) return z;

    // upper_measure(at_scale(t)) grows monotonically from 0 to m0.
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        t = 0.5 * (lo + hi);
        z = at_scale(t);
        double m = space.upper_measure(z);
        if (std::abs(m - c) <= 1e-12) break;
        (m < c ? lo : hi) = t;
    }
    return z;
}

bool measure_continuity_probe(const SkySpace& space, std::int64_t trials, Rng& rng) {
    if (trials < 1) throw std::invalid_argument("need trials >= 1");
    for (std::int64_t i = 0; i < trials; ++i) {
        SkyPoint y = space.sample(rng);
        double c = rng.uniform01() * space.upper_measure(y);
        SkyPoint z = continuity_witness(space, y, c);
        if (std::abs(space.upper_measure(z) - c) > 1e-9) return false;
        if (!dominates(z, y)) return false;
    }
    return true;
}

std::int64_t count_in_region(std::span<const SkyPoint> points, const SkySpace& space, double c) {
    std::int64_t count = 0;
    for (const auto& p : points)
        if (space.upper_measure(p) <= c) ++count;
    return count;
}

}  // namespace tsel::sky
