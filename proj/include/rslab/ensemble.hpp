#pragma once

#include <cstdint>
#include <memory>

#include "rslab/measure_model.hpp"
#include "rslab/solver.hpp"
#include "rslab/stats.hpp"

namespace rslab {

// One random boundary problem family: fixed domain, exponent, coefficients
// and bump profile; the measure is redrawn per sample from the model.
struct EnsembleConfig {
    BallDomain domain;
    double p;
    double c0;
    double b_const;
    double g_const;
    BumpProfile profile;
    MeasureModel model;
    std::vector<MeasureModel> models;  // optional per-coordinate overrides (laws of large numbers)
    double h;
    long n_samples = 0;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    long max_iter = 100000;
    int threads = 1;
    std::optional<double> eps;  // overrides eps0 when set
};

struct SampleRecord {
    size_t index = 0;
    std::uint64_t seed = 0;
    double tv = 0.0;
    double tau = 0.0;
    bool admissible = false;
    double sup_norm = 0.0;  // NaN when inadmissible (no solution exists)
    long iterations = 0;
    double residual = 0.0;  // NaN when inadmissible
    bool medida_ok = true;  // grid sup of |V| <= ||f||_inf |mu|(U)
    bool norm_ok = true;    // ||u||_inf <= 2 eps/(1-tau) * 1.05
    bool residual_ok = true;
};

struct EnsembleReport {
    std::vector<SampleRecord> records;
    long n = 0;
    long admissible_count = 0;
    double admissible_fraction = 0.0;
    double eps = 0.0;   // admissible radius in force (constant across samples)
    double eps0 = 0.0;  // default radius of the configuration
    double l0 = 0.0;
    double f_sup = 0.0;
    double mean_sup = 0.0;   // aggregates over all samples, index order
    double mean_sup2 = 0.0;  // (NaN if any sample is inadmissible)
    double mean_tv = 0.0;
    double mean_tv2 = 0.0;
    bool bounds_ok = true;  // conjunction of all per-sample checks
};

// Shared discretization for one configuration: rule, kernel, operator (kernel
// matrix built once, applications single-threaded inside sample parallelism)
// and the grid-sampled problem data.
class SolverBundle {
  public:
    explicit SolverBundle(const EnsembleConfig& cfg);

    const HOperator& op() const { return *op_; }
    const ProblemSpec& spec() const { return *spec_; }
    const BallDomain& domain() const { return spec_->domain(); }

    // One full sample: draw the measure from the model and solve.
    SampleRecord run_sample(const MeasureModel& model, size_t index, std::uint64_t master_seed,
                            double tol, long max_iter, std::optional<double> eps) const;

  private:
    std::shared_ptr<HOperator> op_;
    std::unique_ptr<ProblemSpec> spec_;
};

EnsembleReport run_ensemble(const EnsembleConfig& cfg);

struct AdmissibleProbability {
    double fraction = 0.0;
    Interval ci;  // Wilson, 95%
    bool g_condition_ok = true;  // deterministic part ||g||_inf <= eps/l0
    std::optional<double> nu_below_c0;   // P(tau < c0) in closed form, when available
    std::optional<double> nu_below_one;  // P(tau < 1)
};
AdmissibleProbability admissible_probability(const EnsembleReport& report,
                                             const EnsembleConfig& cfg);

struct MomentReport {
    long m = 0;
    double empirical = 0.0;     // mean of ||u||_inf^m
    double series_bound = 0.0;  // (2 eps)^m (1 + sum_j C(m+j-1,j) mean(tau^j))
    double closed_bound = 0.0;  // (2 eps)^m mean((1-tau)^{-m})
    long series_terms = 0;
};
// Requires every sample admissible (throws HypothesisViolationError otherwise).
MomentReport moment_report(const EnsembleReport& report, long m);

struct CltReport {
    long k = 0;
    long trials = 0;
    long pilot = 0;
    double m_hat = 0.0;
    double sigma_hat = 0.0;
    std::vector<double> sums;  // standardized block sums, one per trial
    double ks_stat = 0.0;
    double ks_critical = 0.0;  // alpha = 0.01
    bool pass = false;
    bool self_oracle = false;
};

// Standardized sums of per-sample sup-norms against the standard normal CDF.
// The pilot run (pilot_multiplier * k independent samples) estimates the
// standardization constants.
CltReport clt_test(const EnsembleConfig& cfg, long k, long trials, long pilot_multiplier = 10);

// Harness self-check on standard normal surrogates with known mean 0 and
// standard deviation 1 (no pilot estimation).
CltReport clt_self_oracle(std::uint64_t seed, long k, long trials);

struct LlnReport {
    long k = 0;
    long trials = 0;
    double delta = 0.0;
    double L = 0.0;   // ess-sup of l0 ||f||_inf |mu|
    double Q0 = 0.0;  // 2 eps / (1 - L)
    double chebyshev_bound = 0.0;
    double empirical_prob = 0.0;
    double se = 0.0;  // binomial standard error of empirical_prob
    std::vector<double> deviations;  // |mean_j (Z_j - pilot mean_j)| per trial
    bool pass = false;  // empirical <= chebyshev + 2 se
};
LlnReport lln_test(const EnsembleConfig& cfg, long k, double delta, long trials,
                   long pilot_per_coordinate = 10);

struct BorelCantelliReport {
    long k_max = 0;
    long n_draws = 0;
    double c_tilde = 0.0;
    std::vector<double> exceed_prob;   // P(|S_k| >= c_tilde) estimates, k = 1..k_max
    std::vector<double> partial_sums;  // running sums of exceed_prob
    double partial_sum = 0.0;
    double partial_sum_se = 0.0;  // sd of per-draw exceedance counts / sqrt(n)
    double tail_fraction = 0.0;   // draws whose full series stays <= c_tilde
};
// Pure sampling check on a series-type model; requires
// 0 < c_tilde < 1/(l0 ||f||_inf) and series length >= k_max.
BorelCantelliReport borel_cantelli_check(const EnsembleConfig& cfg, double c_tilde, long k_max,
                                         long n_draws);

}  // namespace rslab
