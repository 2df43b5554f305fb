#include "rslab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rslab/errors.hpp"

namespace rslab {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Interval wilson_interval(long successes, long trials, double z) {
    if (trials <= 0) throw PreconditionError("wilson_interval: needs at least one trial");
    if (successes < 0 || successes > trials)
        throw PreconditionError("wilson_interval: success count out of range");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double ks_distance_normal(std::vector<double> samples) {
    if (samples.empty()) throw PreconditionError("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double f = normal_cdf(samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(f - lo, hi - f));
    }
    return d;
}

double ks_critical(double alpha, long samples) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw PreconditionError("ks_critical: alpha must lie in (0,1)");
    if (samples <= 0) throw PreconditionError("ks_critical: needs at least one sample");
    return std::sqrt(-std::log(alpha / 2.0) / (2.0 * static_cast<double>(samples)));
}

MeanVar mean_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) throw PreconditionError("mean_sd: needs at least two values");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

double binomial_se(double p_hat, long n) {
    if (n <= 0) throw PreconditionError("binomial_se: needs at least one trial");
    return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(n));
}

double negative_binomial_coeff_ratio(long m, long j) {
    return static_cast<double>(m + j) / static_cast<double>(j + 1);
}

}  // namespace rslab
