#pragma once

#include <vector>

namespace rslab {

// standard normal CDF
double normal_cdf(double x);

// two-sided 95% z taken at full double precision
inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(long successes, long trials, double z = kZ95);

// Kolmogorov-Smirnov distance between the sample and the standard normal CDF.
double ks_distance_normal(std::vector<double> samples);

// Critical KS distance sqrt(-ln(alpha/2) / (2 M)).
double ks_critical(double alpha, long samples);

struct MeanVar {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation (n-1)
};
MeanVar mean_sd(const std::vector<double>& xs);

// binomial standard error sqrt(p(1-p)/n)
double binomial_se(double p_hat, long n);

// C(m+j-1, j) * t^j summed over j >= 0 equals (1-t)^{-m}; helpers for the
// truncated series use the running-ratio recurrence.
double negative_binomial_coeff_ratio(long m, long j);  // C(m+j,j+1)/C(m+j-1,j) = (m+j)/(j+1)

}  // namespace rslab
