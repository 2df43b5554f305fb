#include "rslab/measure_model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace rslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// P(integer N < t) given the CDF on integers.
template <class CdfLeq>
double integer_cdf_left(double t, CdfLeq cdf_leq) {
    if (t <= 0.0) return 0.0;
    const double f = std::floor(t);
    const long k = (f == t) ? static_cast<long>(f) - 1 : static_cast<long>(f);
    if (k < 0) return 0.0;
    return cdf_leq(k);
}

}  // namespace

// ---- scalar distributions ----------------------------------------------------

double sample_scalar(const ScalarDist& d, Rng& rng) {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DeterministicDist>) {
                return v.value;
            } else if constexpr (std::is_same_v<T, UniformDist>) {
                return rng.uniform(v.lo, v.hi);
            } else {
                return rng.bernoulli(v.prob) ? v.value : 0.0;
            }
        },
        d);
}

double scalar_abs_bound(const ScalarDist& d) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DeterministicDist>) {
                return std::abs(v.value);
            } else if constexpr (std::is_same_v<T, UniformDist>) {
                return std::max(std::abs(v.lo), std::abs(v.hi));
            } else {
                return std::abs(v.value);
            }
        },
        d);
}

std::optional<double> scalar_cdf_left(const ScalarDist& d, double t) {
    return std::visit(
        [&](const auto& v) -> std::optional<double> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DeterministicDist>) {
                return v.value < t ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, UniformDist>) {
                if (t <= v.lo) return 0.0;
                if (t > v.hi) return 1.0;
                if (v.hi == v.lo) return t > v.lo ? 1.0 : 0.0;
                return std::min(1.0, (t - v.lo) / (v.hi - v.lo));
            } else {
                double p_zero_below = (0.0 < t) ? 1.0 - v.prob : 0.0;
                double p_val_below = (v.value < t) ? v.prob : 0.0;
                return p_zero_below + p_val_below;
            }
        },
        d);
}

// ---- count distributions ------------------------------------------------------

long sample_count(const CountDist& d, Rng& rng) {
    return std::visit(
        [&](const auto& v) -> long {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DeterministicCount>) {
                return v.value;
            } else if constexpr (std::is_same_v<T, UniformIntCount>) {
                return rng.uniform_int(v.lo, v.hi);
            } else {
                return rng.poisson(v.mean);
            }
        },
        d);
}

double count_abs_bound(const CountDist& d) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DeterministicCount>) {
                return static_cast<double>(v.value);
            } else if constexpr (std::is_same_v<T, UniformIntCount>) {
                return static_cast<double>(v.hi);
            } else {
                return v.mean == 0.0 ? 0.0 : kInf;
            }
        },
        d);
}

std::optional<double> count_cdf_left(const CountDist& d, double t) {
    return std::visit(
        [&](const auto& v) -> std::optional<double> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DeterministicCount>) {
                return v.value < t ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, UniformIntCount>) {
                return integer_cdf_left(t, [&](long k) {
                    if (k < v.lo) return 0.0;
                    if (k >= v.hi) return 1.0;
                    return static_cast<double>(k - v.lo + 1) / static_cast<double>(v.hi - v.lo + 1);
                });
            } else {
                return integer_cdf_left(t, [&](long k) {
                    double term = std::exp(-v.mean);
                    double acc = term;
                    for (long j = 1; j <= k; ++j) {
                        term *= v.mean / static_cast<double>(j);
                        acc += term;
                    }
                    return std::min(1.0, acc);
                });
            }
        },
        d);
}

// ---- lattice and sampling -----------------------------------------------------

std::vector<Point> lattice_sites(const BallDomain& domain, double spacing) {
    if (!(spacing > 0.0)) throw PreconditionError("lattice_sites: spacing must be positive");
    const int n = domain.dim();
    const Point& c = domain.center();
    const double R = domain.radius();

    std::vector<long> lo(n), hi(n);
    for (int d = 0; d < n; ++d) {
        lo[d] = static_cast<long>(std::ceil((c[d] - R) / spacing - 1e-12));
        hi[d] = static_cast<long>(std::floor((c[d] + R) / spacing + 1e-12));
    }

    std::vector<Point> sites;
    std::vector<long> idx(lo);
    Point x(n);
    while (true) {
        for (int d = 0; d < n; ++d) x[d] = spacing * static_cast<double>(idx[d]);
        if (domain.contains(x.data())) sites.push_back(x);
        int d = n - 1;
        while (d >= 0) {
            if (++idx[d] <= hi[d]) break;
            idx[d] = lo[d];
            --d;
        }
        if (d < 0) break;
    }
    return sites;
}

namespace {

Point uniform_point_in_ball(const BallDomain& domain, Rng& rng) {
    const int n = domain.dim();
    Point x(n);
    while (true) {
        for (int d = 0; d < n; ++d) x[d] = rng.uniform(-1.0, 1.0);
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
        if (r2 < 1.0) break;
    }
    for (int d = 0; d < n; ++d) x[d] = domain.center()[d] + domain.radius() * x[d];
    return x;
}

std::vector<double> bernoulli_telescoped_coeffs(const BernoulliExceedanceModel& m, Rng& rng) {
    std::vector<double> coeff(m.length);
    double prev = 0.0;
    double p = 1.0;
    for (int k = 0; k < m.length; ++k) {
        p *= m.prob_base;
        const double xi = rng.bernoulli(p) ? 1.0 : 0.0;
        coeff[k] = m.charge * (xi - prev);
        prev = xi;
    }
    return coeff;
}

void validate_series(const SeriesModel& m) {
    if (m.bases.size() != m.coefficients.size())
        throw PreconditionError("series model: bases/coefficients length mismatch");
}

void validate_bernoulli(const BernoulliExceedanceModel& m) {
    if (m.length < 1) throw PreconditionError("exceedance model: length must be >= 1");
    if (!(m.prob_base > 0.0) || !(m.prob_base < 1.0))
        throw PreconditionError("exceedance model: prob_base must lie in (0,1)");
    if (!(m.charge > 0.0)) throw PreconditionError("exceedance model: charge must be positive");
}

}  // namespace

AtomicMeasure sample_measure(const MeasureModel& model, const BallDomain& domain, Rng& rng) {
    return std::visit(
        [&](const auto& m) -> AtomicMeasure {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AlloyModel>) {
                AtomicMeasure mu;
                for (Point& site : lattice_sites(domain, m.lattice_spacing)) {
                    mu.add(std::move(site), sample_scalar(m.charge, rng));
                }
                return mu;
            } else if constexpr (std::is_same_v<T, PointsModel>) {
                const long count = sample_count(m.count, rng);
                if (count < 0) throw PreconditionError("points model: negative atom count");
                AtomicMeasure mu;
                for (long i = 0; i < count; ++i)
                    mu.add(uniform_point_in_ball(domain, rng), 1.0);
                return mu;
            } else if constexpr (std::is_same_v<T, SeriesModel>) {
                validate_series(m);
                MeasureAccumulator acc;
                for (size_t j = 0; j < m.bases.size(); ++j)
                    acc.add_term(sample_scalar(m.coefficients[j], rng), m.bases[j]);
                return acc.measure();
            } else {
                validate_bernoulli(m);
                MeasureAccumulator acc;
                AtomicMeasure base;
                base.add(m.location, 1.0);
                for (double a : bernoulli_telescoped_coeffs(m, rng)) acc.add_term(a, base);
                return acc.measure();
            }
        },
        model);
}

SeriesDraw sample_series_draw(const MeasureModel& model, Rng& rng) {
    return std::visit(
        [&](const auto& m) -> SeriesDraw {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SeriesModel>) {
                validate_series(m);
                SeriesDraw out;
                MeasureAccumulator acc;
                out.partial_tv.reserve(m.bases.size());
                for (size_t j = 0; j < m.bases.size(); ++j) {
                    acc.add_term(sample_scalar(m.coefficients[j], rng), m.bases[j]);
                    out.partial_tv.push_back(acc.total_variation());
                }
                out.final_measure = acc.measure();
                return out;
            } else if constexpr (std::is_same_v<T, BernoulliExceedanceModel>) {
                validate_bernoulli(m);
                SeriesDraw out;
                MeasureAccumulator acc;
                AtomicMeasure base;
                base.add(m.location, 1.0);
                for (double a : bernoulli_telescoped_coeffs(m, rng)) {
                    acc.add_term(a, base);
                    out.partial_tv.push_back(acc.total_variation());
                }
                out.final_measure = acc.measure();
                return out;
            } else {
                throw PreconditionError("sample_series_draw: model has no series structure");
            }
        },
        model);
}

double model_tv_bound(const MeasureModel& model, const BallDomain& domain) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AlloyModel>) {
                const auto sites = lattice_sites(domain, m.lattice_spacing);
                return static_cast<double>(sites.size()) * scalar_abs_bound(m.charge);
            } else if constexpr (std::is_same_v<T, PointsModel>) {
                return count_abs_bound(m.count);
            } else if constexpr (std::is_same_v<T, SeriesModel>) {
                validate_series(m);
                double s = 0.0;
                for (size_t j = 0; j < m.bases.size(); ++j)
                    s += scalar_abs_bound(m.coefficients[j]) * m.bases[j].total_variation();
                return s;
            } else {
                validate_bernoulli(m);
                return m.charge;  // |S_k| is either 0 or charge at every k
            }
        },
        model);
}

std::optional<double> model_tv_cdf_left(const MeasureModel& model, const BallDomain& domain,
                                        double t) {
    return std::visit(
        [&](const auto& m) -> std::optional<double> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AlloyModel>) {
                const auto sites = lattice_sites(domain, m.lattice_spacing);
                const long count = static_cast<long>(sites.size());
                if (count == 0) return t > 0.0 ? 1.0 : 0.0;
                // closed forms only when the per-site |charge| is two-valued
                if (const auto* det = std::get_if<DeterministicDist>(&m.charge)) {
                    const double tv = static_cast<double>(count) * std::abs(det->value);
                    return tv < t ? 1.0 : 0.0;
                }
                if (const auto* ber = std::get_if<BernoulliScaledDist>(&m.charge)) {
                    const double v = std::abs(ber->value);
                    if (v == 0.0) return t > 0.0 ? 1.0 : 0.0;
                    // |mu| = v * Binomial(count, prob)
                    return integer_cdf_left(t / v, [&](long k) {
                        if (k >= count) return 1.0;
                        // binomial CDF via direct summation (site counts are small)
                        double term = std::pow(1.0 - ber->prob, static_cast<double>(count));
                        double acc = term;
                        for (long j = 1; j <= k; ++j) {
                            term *= ber->prob / (1.0 - ber->prob) *
                                    static_cast<double>(count - j + 1) / static_cast<double>(j);
                            acc += term;
                        }
                        return std::min(1.0, acc);
                    });
                }
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, PointsModel>) {
                return count_cdf_left(m.count, t);  // unit masses: |mu| = count
            } else if constexpr (std::is_same_v<T, SeriesModel>) {
                return std::nullopt;
            } else {
                validate_bernoulli(m);
                // |mu_final| = charge * xi_length
                const double p_last = std::pow(m.prob_base, m.length);
                if (t <= 0.0) return 0.0;
                if (t <= m.charge) return 1.0 - p_last;
                return 1.0;
            }
        },
        model);
}

double zeta(double q) {
    if (!(q > 1.0)) throw PreconditionError("zeta: requires q > 1");
    // direct sum plus Euler-Maclaurin tail correction
    const long K = 10000;
    double s = 0.0;
    for (long k = K; k >= 1; --k) s += std::pow(static_cast<double>(k), -q);
    const double Kd = static_cast<double>(K);
    s += std::pow(Kd, 1.0 - q) / (q - 1.0) - 0.5 * std::pow(Kd, -q) +
         q / 12.0 * std::pow(Kd, -q - 1.0);
    return s;
}

SeriesModel make_decay_series(int terms, double q, double margin, double l0_fsup,
                              std::vector<Point> locations) {
    if (terms < 1) throw PreconditionError("decay series: need at least one term");
    if (!(margin > 0.0) || margin > 1.0)
        throw PreconditionError("decay series: margin must lie in (0,1]");
    if (!(l0_fsup > 0.0)) throw PreconditionError("decay series: l0*||f||_inf must be positive");
    if (locations.size() != static_cast<size_t>(terms))
        throw PreconditionError("decay series: one location per term required");
    const double z = zeta(q);
    SeriesModel model;
    model.bases.reserve(terms);
    model.coefficients.reserve(terms);
    for (int j = 1; j <= terms; ++j) {
        AtomicMeasure base;
        base.add(std::move(locations[j - 1]), 1.0);  // |mu_j| = 1
        model.bases.push_back(std::move(base));
        const double cap = margin / z * std::pow(static_cast<double>(j), -q) / l0_fsup;
        model.coefficients.push_back(UniformDist{0.0, cap});
    }
    return model;
}

}  // namespace rslab
