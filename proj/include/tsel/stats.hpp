#pragma once

#include <cstdint>
#include <span>

namespace tsel {

/// Compensated (Kahan) accumulator for long sums of small terms.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        double y = v - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

/// Streaming mean/variance (Welford).
class RunningStats {
public:
    void add(double x) {
        ++n_;
        double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::int64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const;
    double std_error() const;

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

double mean(std::span<const double> xs);
double sample_stddev(std::span<const double> xs);
double std_error(std::span<const double> xs);

/// Inverse of the standard normal cdf (Acklam's rational approximation,
/// relative error below 1.2e-9 on (0, 1)).
double normal_quantile(double p);

/// Two-sample Kolmogorov-Smirnov statistic D.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Rejection threshold for D at significance alpha.
double ks_critical(double alpha, std::size_t n, std::size_t m);

}  // namespace tsel
