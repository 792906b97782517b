#include "tsel/interval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsel/stats.hpp"

namespace tsel::interval {

namespace {

void require_real_schedule(const ThresholdSchedule& s) {
    if (s.domain() != ScheduleDomain::Real)
        throw std::invalid_argument("interval model needs a real-valued schedule");
}

// Shared by mean_gap and offline_best_n_gap so that identical multisets
// produce bitwise-identical means.
double gap_of_sorted_desc(std::vector<double>& qualities) {
    std::sort(qualities.begin(), qualities.end(), std::greater<>());
    KahanSum sum;
    for (double q : qualities) sum.add(q);
    return 1.0 - sum.value() / static_cast<double>(qualities.size());
}

template <typename NextQuality>
IntervalTrace run_adaptive(AdaptiveMode mode, std::int64_t n, NextQuality&& next) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    IntervalTrace trace;
    trace.qualities.reserve(static_cast<std::size_t>(n));
    trace.wait_times.reserve(static_cast<std::size_t>(n));
    std::vector<double> sorted_accepted;  // for the median rule
    double accepted_sum = 0.0;

    auto accepts = [&](double x) {
        if (trace.qualities.empty()) return true;  // bootstrap: first sample always in
        if (mode == AdaptiveMode::AboveMean)
            return x > accepted_sum / static_cast<double>(trace.qualities.size());
        std::size_t m = sorted_accepted.size();
        double median = (m % 2 == 1) ? sorted_accepted[m / 2]
                                     : 0.5 * (sorted_accepted[m / 2 - 1] + sorted_accepted[m / 2]);
        return x > median;
    };

    std::int64_t wait = 0;
    while (static_cast<std::int64_t>(trace.qualities.size()) < n) {
        double x = next();
        ++trace.seen_total;
        ++wait;
        if (accepts(x)) {
            trace.qualities.push_back(x);
            trace.wait_times.push_back(wait);
            wait = 0;
            accepted_sum += x;
            if (mode == AdaptiveMode::AboveMedian)
                sorted_accepted.insert(
                    std::upper_bound(sorted_accepted.begin(), sorted_accepted.end(), x), x);
        } else {
            trace.rejected.push_back(x);
        }
    }
    return trace;
}

}  // namespace

PowerLawQuality::PowerLawQuality(double k) : k_(k) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument("power-law shape k must be positive and finite");
    inv_k_ = 1.0 / k;
    root_shape_ = (k == 1.0) ? 1 : (k == 2.0) ? 2 : (k == 4.0) ? 4 : 0;
}

double PowerLawQuality::gap_from_uniform(double u) const {
    switch (root_shape_) {
        case 1: return u;
        case 2: return std::sqrt(u);
        case 4: return std::sqrt(std::sqrt(u));
        default: return std::pow(u, inv_k_);
    }
}

IntervalTrace run_interval_selection(const ThresholdSchedule& s, const PowerLawQuality& q,
                                     std::int64_t n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    require_real_schedule(s);
    IntervalTrace trace;
    trace.qualities.reserve(static_cast<std::size_t>(n));
    trace.wait_times.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 1; i <= n; ++i) {
        const double c = s.value_at(i);
        std::int64_t wait = 0;
        for (;;) {
            double gap = q.draw_gap(rng);
            ++trace.seen_total;
            ++wait;
            if (gap <= c) {
                trace.qualities.push_back(1.0 - gap);
                break;
            }
            trace.rejected.push_back(1.0 - gap);
        }
        trace.wait_times.push_back(wait);
    }
    return trace;
}

double gap_of(std::span<const double> qualities) {
    if (qualities.empty()) throw std::invalid_argument("mean gap of an empty selection");
    std::vector<double> copy(qualities.begin(), qualities.end());
    return gap_of_sorted_desc(copy);
}

double mean_gap(const IntervalTrace& trace) { return gap_of(trace.qualities); }

double expected_gap_given_mean(const ThresholdSchedule& s, double mean_complement_gap,
                               std::int64_t n) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    require_real_schedule(s);
    KahanSum sum;
    for (std::int64_t i = 1; i <= n; ++i) sum.add(s.value_at(i));
    return mean_complement_gap / static_cast<double>(n) * sum.value();
}

double expected_gap_closed_form(const ThresholdSchedule& s, const PowerLawQuality& q,
                                std::int64_t n) {
    return expected_gap_given_mean(s, q.mean_gap(), n);
}

double expected_overhead_closed_form(const ThresholdSchedule& s, const PowerLawQuality& q,
                                     std::int64_t n) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    require_real_schedule(s);
    KahanSum sum;
    for (std::int64_t i = 1; i <= n; ++i) sum.add(std::pow(s.value_at(i), -q.k()));
    return sum.value();
}

double order_statistic_expectation(double k, std::int64_t t, std::int64_t m) {
    if (!(k > 0.0)) throw std::invalid_argument("need k > 0");
    if (m < 1 || m > t) throw std::invalid_argument("need 1 <= m <= t");
    const double tk = static_cast<double>(t);
    const double mk = static_cast<double>(m);
    const double r = 1.0 / k;
    return std::exp(std::lgamma(tk + 1.0) + std::lgamma(mk + r) - std::lgamma(tk + 1.0 + r) -
                    std::lgamma(mk));
}

std::pair<double, double> gamma_sum_identity(double k, std::int64_t n) {
    if (!(k > 0.0)) throw std::invalid_argument("need k > 0");
    if (n < 1) throw std::invalid_argument("need n >= 1");
    const double r = 1.0 / k;
    KahanSum lhs;
    for (std::int64_t m = 1; m <= n; ++m) {
        const double md = static_cast<double>(m);
        lhs.add(std::exp(std::lgamma(md + r) - std::lgamma(md)));
    }
    const double nd = static_cast<double>(n);
    const double rhs =
        nd * std::exp(std::lgamma(nd + 1.0 + r) - std::lgamma(nd + 1.0)) / (1.0 + r);
    return {lhs.value(), rhs};
}

double optimal_mean_gap_closed_form(double k, std::int64_t n, double t) {
    if (!(k > 0.0)) throw std::invalid_argument("need k > 0");
    if (n < 1) throw std::invalid_argument("need n >= 1");
    if (t < static_cast<double>(n)) throw std::invalid_argument("need t >= n");
    return 1.0 / (1.0 + 1.0 / k) * std::pow(static_cast<double>(n) / (t + 1.0), 1.0 / k);
}

double euler_maclaurin_bound(double k, double alpha, std::int64_t n) {
    if (!(k > 0.0)) throw std::invalid_argument("need k > 0");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("need alpha in [0, 1)");
    if (n < 1) throw std::invalid_argument("need n >= 1");
    KahanSum overhead;  // E[T_n] = sum i^(alpha k)
    for (std::int64_t i = 1; i <= n; ++i)
        overhead.add(std::pow(static_cast<double>(i), alpha * k));
    return 1.0 / (1.0 - alpha) * std::pow(static_cast<double>(n) / overhead.value(), 1.0 / k);
}

double offline_best_n_gap(std::span<const double> samples, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    if (static_cast<std::int64_t>(samples.size()) < n)
        throw std::invalid_argument("fewer samples than the requested subset size");
    std::vector<double> copy(samples.begin(), samples.end());
    auto mid = copy.begin() + static_cast<std::ptrdiff_t>(n);
    std::nth_element(copy.begin(), mid - 1, copy.end(), std::greater<>());
    copy.resize(static_cast<std::size_t>(n));
    return gap_of_sorted_desc(copy);
}

IntervalTrace run_adaptive_baseline(AdaptiveMode mode, const PowerLawQuality& q, std::int64_t n,
                                    Rng& rng) {
    return run_adaptive(mode, n, [&] { return 1.0 - q.draw_gap(rng); });
}

IntervalTrace run_adaptive_baseline_on(AdaptiveMode mode, std::span<const double> stream,
                                       std::int64_t n) {
    std::size_t pos = 0;
    return run_adaptive(mode, n, [&] {
        if (pos >= stream.size())
            throw std::invalid_argument("quality stream exhausted before n acceptances");
        return stream[pos++];
    });
}

PreparedIntervalRule prepare_interval_rule(const ThresholdSchedule& s, const PowerLawQuality& q,
                                           std::int64_t n) {
    require_real_schedule(s);
    PreparedIntervalRule rule;
    rule.thresholds.resize(static_cast<std::size_t>(n));
    rule.accept_u.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 1; i <= n; ++i) {
        double c = s.value_at(i);
        rule.thresholds[static_cast<std::size_t>(i - 1)] = c;
        rule.accept_u[static_cast<std::size_t>(i - 1)] = std::pow(c, q.k());
    }
    return rule;
}

SelectionStats simulate_selection_stats(const PreparedIntervalRule& rule,
                                        const PowerLawQuality& q, Rng& rng) {
    SelectionStats stats;
    for (double cu : rule.accept_u) {
        // Accept on u <= c^k, equivalent to gap = u^(1/k) <= c; the gap
        // transform is only evaluated for accepted samples.
        for (;;) {
            double u = rng.uniform01();
            ++stats.seen_total;
            if (u <= cu) {
                stats.gap_sum += q.gap_from_uniform(u);
                break;
            }
        }
    }
    return stats;
}

SelectionStats simulate_selection_stats(const ThresholdSchedule& s, const PowerLawQuality& q,
                                        std::int64_t n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    return simulate_selection_stats(prepare_interval_rule(s, q, n), q, rng);
}

}  // namespace tsel::interval
