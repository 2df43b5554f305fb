#pragma once

#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "rslab/measure.hpp"
#include "rslab/rng.hpp"

namespace rslab {

// ---- scalar coefficient / charge distributions ----------------------------

struct DeterministicDist {
    double value;
};
struct UniformDist {
    double lo, hi;  // uniform on [lo, hi)
};
struct BernoulliScaledDist {
    double prob;  // P(X = value) = prob, else 0
    double value;
};

using ScalarDist = std::variant<DeterministicDist, UniformDist, BernoulliScaledDist>;

double sample_scalar(const ScalarDist& d, Rng& rng);
double scalar_abs_bound(const ScalarDist& d);             // ess-sup |X|
std::optional<double> scalar_cdf_left(const ScalarDist& d, double t);  // P(X < t) if closed-form

// ---- atom count distributions ----------------------------------------------

struct DeterministicCount {
    long value;
};
struct UniformIntCount {
    long lo, hi;  // uniform on {lo, ..., hi}
};
struct PoissonCount {
    double mean;
};

using CountDist = std::variant<DeterministicCount, UniformIntCount, PoissonCount>;

long sample_count(const CountDist& d, Rng& rng);
double count_abs_bound(const CountDist& d);  // may be +inf (Poisson)
std::optional<double> count_cdf_left(const CountDist& d, double t);  // P(N < t)

// ---- random measure models --------------------------------------------------

// i.i.d. charges on the lattice points (spacing * Z^n) inside the domain.
struct AlloyModel {
    double lattice_spacing;
    ScalarDist charge;
};

// Random number of unit Dirac masses at independent uniform locations.
struct PointsModel {
    CountDist count;
};

// sum_j a_j mu_j with independent coefficients a_j ~ coefficients[j].
struct SeriesModel {
    std::vector<AtomicMeasure> bases;
    std::vector<ScalarDist> coefficients;
};

// Series whose k-th partial sum equals charge * xi_k * delta_{location} with
// independent xi_k ~ Bernoulli(prob_base^k): coefficients are the telescoped
// differences charge*(xi_k - xi_{k-1}), so P(|S_k| >= t) = prob_base^k
// exactly for every threshold t in (0, charge].
struct BernoulliExceedanceModel {
    double charge;
    double prob_base;
    int length;
    Point location;
};

using MeasureModel =
    std::variant<AlloyModel, PointsModel, SeriesModel, BernoulliExceedanceModel>;

// Lattice sites of spacing*Z^n strictly inside the domain, lexicographic order.
std::vector<Point> lattice_sites(const BallDomain& domain, double spacing);

// Draw one measure. Every model family is deterministic given the seed stream.
AtomicMeasure sample_measure(const MeasureModel& model, const BallDomain& domain, Rng& rng);

// Series-type models only: total variation of every partial sum S_1..S_J plus
// the final measure. Throws PreconditionError for non-series models.
struct SeriesDraw {
    std::vector<double> partial_tv;
    AtomicMeasure final_measure;
};
SeriesDraw sample_series_draw(const MeasureModel& model, Rng& rng);

// ess-sup of |mu|(U); +inf when unbounded (Poisson counts).
double model_tv_bound(const MeasureModel& model, const BallDomain& domain);

// P(|mu|(U) < t) when available in closed form.
std::optional<double> model_tv_cdf_left(const MeasureModel& model, const BallDomain& domain,
                                        double t);

// Series factory: J unit Dirac bases at the given locations with coefficients
// a_j uniform on [0, margin * zeta(q)^{-1} j^{-q} / (l0_fsup * |mu_j|)), which
// keeps l0 * ||f||_inf * |mu|(U) < margin almost surely.
SeriesModel make_decay_series(int terms, double q, double margin, double l0_fsup,
                              std::vector<Point> locations);

double zeta(double q);  // sum k^{-q}, q > 1

}  // namespace rslab
