#include "rslab/solver.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace rslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 2^p K eps^{p-1}, guarding 0 * inf when b vanishes (eps0 is infinite there).
double nonlinear_term(double p, double K, double eps) {
    if (K == 0.0) return 0.0;
    return std::pow(2.0, p) * K * std::pow(eps, p - 1.0);
}

bool profiles_equal(const BumpProfile& a, const BumpProfile& b) {
    return a.family() == b.family() && a.amplitude() == b.amplitude() &&
           a.radius() == b.radius() && a.width() == b.width();
}

}  // namespace

ProblemSpec::ProblemSpec(double p, double c0, GridField b, GridField g, BumpProfile f)
    : p_(p), c0_(c0), b_(std::move(b)), g_(std::move(g)), f_(std::move(f)) {
    if (!(p_ > 1.0)) throw PreconditionError("problem: exponent p must exceed 1");
    if (!(c0_ > 0.0) || !(c0_ < 1.0))
        throw PreconditionError("problem: contraction target c0 must lie in (0,1)");
    if (!b_.layout()) throw PreconditionError("problem: b carries no grid");
    require_same_layout(b_, g_, "problem");
    b_sup_ = b_.sup_norm();
    g_sup_ = g_.sup_norm();

    const double l0 = domain().l0();
    const double K = l0 * p_ * b_sup_;
    if (K > 0.0) {
        const double g_cap = std::pow(1.0 / (std::pow(2.0, p_) * K), 1.0 / (p_ - 1.0)) / l0;
        if (!(g_sup_ < g_cap))
            throw PreconditionError("problem: ||g||_inf must stay below (1/l0)(2^p K)^{-1/(p-1)}");
    }
}

ContractionBudget contraction_constants(const ProblemSpec& spec, const AtomicMeasure& mu,
                                        const BallDomain& domain, std::optional<double> eps) {
    const double l0 = domain.l0();
    ContractionBudget out;
    out.p = spec.p();
    out.tau = l0 * spec.profile().sup_norm() * mu.total_variation();
    out.K = l0 * spec.p() * spec.b_sup();
    if (out.K > 0.0) {
        out.eps0 = std::pow(std::pow(1.0 - spec.c0(), spec.p()) / (std::pow(2.0, spec.p()) * out.K),
                            1.0 / (spec.p() - 1.0));
    } else {
        out.eps0 = kInf;
    }
    out.eps = eps.value_or(out.eps0);
    if (!(out.eps > 0.0)) throw PreconditionError("contraction: eps must be positive");
    out.q_defined = out.tau < 1.0;
    if (out.q_defined) {
        out.q = out.tau + nonlinear_term(out.p, out.K, out.eps) / std::pow(1.0 - out.tau, out.p - 1.0);
    } else {
        out.q = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

bool is_admissible(const ContractionBudget& budget, double g_sup, double l0) {
    if (!budget.q_defined) return false;  // tau >= 1
    if (!(budget.q < 1.0)) return false;
    return g_sup <= budget.eps / l0;
}

long a_priori_iterations(double q, double first_step, double tol) {
    if (!(q >= 0.0)) throw PreconditionError("a_priori_iterations: q must be nonnegative");
    if (q >= 1.0) throw NotAContractionError("a_priori_iterations: q must be below 1");
    if (!(tol > 0.0)) throw PreconditionError("a_priori_iterations: tolerance must be positive");
    if (!(first_step >= 0.0))
        throw PreconditionError("a_priori_iterations: first step must be nonnegative");

    const double target = tol * (1.0 - q);
    if (first_step <= target) return 0;
    if (q == 0.0) return 1;

    double k = std::ceil(std::log(target / first_step) / std::log(q));
    long ki = static_cast<long>(std::max(k, 1.0));
    // guard the ceil against roundoff in either direction
    while (std::pow(q, static_cast<double>(ki)) * first_step > target) ++ki;
    while (ki > 0 && std::pow(q, static_cast<double>(ki - 1)) * first_step <= target) --ki;
    return ki;
}

SolveOutcome picard_solve(const ProblemSpec& spec, const AtomicMeasure& mu, const HOperator& op,
                          double tol, long max_iter, std::optional<double> eps,
                          const GridField* start) {
    if (!(tol > 0.0)) throw PreconditionError("picard_solve: tolerance must be positive");
    const BallDomain& domain = op.kernel().domain();
    const double l0 = domain.l0();

    SolveOutcome out;
    out.budget = contraction_constants(spec, mu, domain, eps);
    out.admissible = is_admissible(out.budget, spec.g_sup(), l0);
    out.norm_bound =
        out.budget.tau < 1.0 ? 2.0 * out.budget.eps / (1.0 - out.budget.tau) : kInf;
    if (!out.admissible) return out;

    const double q = out.budget.q;
    // gap <= tol(1-q)/q forces residual <= q * gap <= tol(1-q) <= tol
    const double threshold = q > 1e-300 ? tol * (1.0 - q) / q : kInf;

    const GridField V = potential_field(spec.profile(), mu, op.layout());
    GridField u = start ? *start : GridField(op.layout());
    long cap = max_iter;
    long k = 0;
    bool converged = false;
    while (k < cap) {
        GridField next = op.compose_rhs(spec.g(), V, spec.b(), u, spec.p());
        const double gap = sup_distance(next, u);
        out.gap_history.push_back(gap);
        u = std::move(next);
        ++k;
        if (k == 1) {
            // a-priori certificate caps the loop; small slack for roundoff
            const long promised = a_priori_iterations(q, gap, tol) + 2;
            cap = std::min(max_iter, promised > 1 ? promised : 2L);
        }
        if (gap <= threshold) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NonConvergenceError(
            "picard_solve: gap criterion missed within the a-priori iteration budget");

    // exact residual; this kernel pass is also the next Picard gap
    GridField w = op.compose_rhs(spec.g(), V, spec.b(), u, spec.p());
    out.residual = sup_distance(u, w);
    out.gap_history.push_back(out.residual);
    if (out.residual > tol)
        throw NonConvergenceError("picard_solve: measured residual exceeds the tolerance");
    out.sup_norm = u.sup_norm();
    if (out.sup_norm > out.norm_bound * 1.05)
        throw NonConvergenceError("picard_solve: solution escaped the admissible ball budget");
    out.iterations = k;
    out.u = std::move(u);
    return out;
}

double observed_contraction(const std::vector<double>& gap_history) {
    if (gap_history.size() < 2)
        throw InsufficientHistoryError("observed_contraction: need at least three iterates");
    double worst = 0.0;
    for (size_t k = 1; k < gap_history.size(); ++k) {
        if (gap_history[k - 1] > 1e-14)
            worst = std::max(worst, gap_history[k] / gap_history[k - 1]);
    }
    return worst;
}

LipschitzGap lipschitz_gap(const ProblemSpec& spec1, const ProblemSpec& spec2,
                           const SolveOutcome& out1, const SolveOutcome& out2,
                           const AtomicMeasure& mu1, const AtomicMeasure& mu2,
                           const BallDomain& domain) {
    if (!out1.admissible || !out2.admissible)
        throw PreconditionError("lipschitz_gap: both solutions must be admissible");
    if (spec1.p() != spec2.p() || spec1.c0() != spec2.c0())
        throw PreconditionError("lipschitz_gap: problems disagree on p or c0");
    if (sup_distance(spec1.b(), spec2.b()) != 0.0)
        throw PreconditionError("lipschitz_gap: problems must share the coefficient b");
    if (!profiles_equal(spec1.profile(), spec2.profile()))
        throw PreconditionError("lipschitz_gap: problems must share the bump profile");
    if (out1.budget.eps != out2.budget.eps)
        throw PreconditionError("lipschitz_gap: solutions used different admissible radii");

    const double l0 = domain.l0();
    const double f_sup = spec1.profile().sup_norm();
    const double eps = out1.budget.eps;
    const double K = out1.budget.K;
    const double p = spec1.p();

    LipschitzGap gap;
    gap.eta = std::max(out1.budget.tau, out2.budget.tau);
    if (!(gap.eta < 1.0))
        throw PreconditionError("lipschitz_gap: joint interaction bound eta must stay below 1");
    gap.denom = 1.0 - gap.eta - nonlinear_term(p, K, eps) / std::pow(1.0 - gap.eta, p - 1.0);
    if (!(gap.denom > 0.0))
        throw PreconditionError("lipschitz_gap: stability denominator must be positive");

    const double dg = sup_distance(spec1.g(), spec2.g());
    const double dmu = diff_total_variation(mu1, mu2);
    gap.lhs = sup_distance(*out1.u, *out2.u);
    gap.rhs = l0 * (dg + (2.0 * eps / (1.0 - gap.eta)) * f_sup * dmu) / gap.denom;
    return gap;
}

}  // namespace rslab
