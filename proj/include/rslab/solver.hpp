#pragma once

#include <optional>

#include "rslab/measure.hpp"
#include "rslab/operator_h.hpp"
#include "rslab/potential.hpp"

namespace rslab {

// Fixed data of one boundary problem: u = H(g + V u + b u|u|^{p-1}).
// Invariants enforced on construction: p > 1, 0 < c0 < 1, and
// ||g||_inf < (1/l0) (1/(2^p K))^{1/(p-1)} with K = l0 p ||b||_inf.
class ProblemSpec {
  public:
    ProblemSpec(double p, double c0, GridField b, GridField g, BumpProfile f);

    double p() const { return p_; }
    double c0() const { return c0_; }
    const GridField& b() const { return b_; }
    const GridField& g() const { return g_; }
    const BumpProfile& profile() const { return f_; }
    const BallDomain& domain() const { return b_.layout()->domain(); }
    double b_sup() const { return b_sup_; }
    double g_sup() const { return g_sup_; }

  private:
    double p_;
    double c0_;
    GridField b_;
    GridField g_;
    BumpProfile f_;
    double b_sup_;
    double g_sup_;
};

// Constants of the contraction estimate for one sampled measure.
struct ContractionBudget {
    double p = 0.0;
    double tau = 0.0;   // l0 ||f||_inf |mu|(U)
    double K = 0.0;     // l0 p ||b||_inf
    double eps = 0.0;   // admissible-ball radius currently in force
    double eps0 = 0.0;  // ((1-c0)^p / (2^p K))^{1/(p-1)}, inf when K = 0
    double q = 0.0;     // tau + 2^p K eps^{p-1} / (1-tau)^{p-1}
    bool q_defined = false;  // false iff tau >= 1
};

// eps may override the default eps0 (config knob); it is still subjected to
// the admissibility inequalities.
ContractionBudget contraction_constants(const ProblemSpec& spec, const AtomicMeasure& mu,
                                        const BallDomain& domain,
                                        std::optional<double> eps = std::nullopt);

// tau < 1, 2^p K eps^{p-1}/(1-tau)^{p-1} + tau < 1, and ||g||_inf <= eps/l0.
bool is_admissible(const ContractionBudget& budget, double g_sup, double l0);

// Smallest k with q^k * first_step / (1-q) <= tol. Throws NotAContractionError
// for q >= 1.
long a_priori_iterations(double q, double first_step, double tol);

struct SolveOutcome {
    bool admissible = false;
    ContractionBudget budget;
    std::optional<GridField> u;  // present iff admissible
    long iterations = 0;
    double residual = 0.0;    // exact ||u - Phi(u)||_inf, one extra kernel pass
    double norm_bound = 0.0;  // 2 eps / (1-tau), inf when tau >= 1
    double sup_norm = 0.0;
    std::vector<double> gap_history;  // ||u_k - u_{k-1}||_inf, residual appended
};

// Picard iteration from u0 = 0 (or the supplied start). Stops when the gap
// falls below tol*(1-q)/q, which bounds the true residual by tol*(1-q); the
// a-priori count (+ slack) caps the loop, and exceeding it or max_iter raises
// NonConvergenceError since it signals the discrete map contracting slower
// than the continuum estimate promises.
SolveOutcome picard_solve(const ProblemSpec& spec, const AtomicMeasure& mu, const HOperator& op,
                          double tol, long max_iter = 100000,
                          std::optional<double> eps = std::nullopt,
                          const GridField* start = nullptr);

// Largest gap ratio over consecutive iterate gaps; denominators <= 1e-14 are
// skipped. Needs at least two gaps (three iterates).
double observed_contraction(const std::vector<double>& gap_history);

struct LipschitzGap {
    double lhs = 0.0;   // ||u1 - u2||_inf
    double rhs = 0.0;   // stability bound
    double eta = 0.0;   // l0 ||f||_inf max(|mu1|, |mu2|)
    double denom = 0.0; // 1 - eta - 2^p K eps0^{p-1}/(1-eta)^{p-1}
};

// Both outcomes must be admissible solutions of the same ProblemSpec family
// (same p, c0, b, f) differing in g and mu.
LipschitzGap lipschitz_gap(const ProblemSpec& spec1, const ProblemSpec& spec2,
                           const SolveOutcome& out1, const SolveOutcome& out2,
                           const AtomicMeasure& mu1, const AtomicMeasure& mu2,
                           const BallDomain& domain);

}  // namespace rslab
