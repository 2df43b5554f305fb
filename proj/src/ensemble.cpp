#include "rslab/ensemble.hpp"

#include <cmath>
#include <string>

#include "rslab/parallel.hpp"

namespace rslab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::optional<long> series_length(const MeasureModel& model) {
    if (const auto* s = std::get_if<SeriesModel>(&model))
        return static_cast<long>(s->bases.size());
    if (const auto* b = std::get_if<BernoulliExceedanceModel>(&model))
        return static_cast<long>(b->length);
    return std::nullopt;
}

}  // namespace

SolverBundle::SolverBundle(const EnsembleConfig& cfg) {
    QuadratureRule rule = build_rule(cfg.domain, cfg.h);
    GreenKernel kernel(cfg.domain);
    op_ = std::make_shared<HOperator>(std::move(rule), std::move(kernel), cfg.threads);
    op_->set_threads(1);  // sample-level parallelism owns the worker threads
    GridField b(op_->layout(), cfg.b_const);
    GridField g(op_->layout(), cfg.g_const);
    spec_ = std::make_unique<ProblemSpec>(cfg.p, cfg.c0, std::move(b), std::move(g), cfg.profile);
}

SampleRecord SolverBundle::run_sample(const MeasureModel& model, size_t index,
                                      std::uint64_t master_seed, double tol, long max_iter,
                                      std::optional<double> eps) const {
    SampleRecord rec;
    rec.index = index;
    rec.seed = derive_seed(master_seed, index);
    Rng rng(rec.seed);
    const AtomicMeasure mu = sample_measure(model, domain(), rng);
    rec.tv = mu.total_variation();

    const GridField V = potential_field(spec_->profile(), mu, op_->layout());
    const double v_bound = potential_sup_bound(spec_->profile(), mu);
    rec.medida_ok = V.sup_norm() <= v_bound * (1.0 + 1e-9) + 1e-300;

    SolveOutcome outcome;
    try {
        outcome = picard_solve(*spec_, mu, *op_, tol, max_iter, eps);
    } catch (const NonConvergenceError& e) {
        throw NonConvergenceError(std::string(e.what()) + " (sample " + std::to_string(index) + ")",
                                  static_cast<long>(index));
    }
    rec.tau = outcome.budget.tau;
    rec.admissible = outcome.admissible;
    if (outcome.admissible) {
        rec.sup_norm = outcome.sup_norm;
        rec.iterations = outcome.iterations;
        rec.residual = outcome.residual;
        rec.norm_ok = outcome.sup_norm <= outcome.norm_bound * 1.05;
        rec.residual_ok = outcome.residual <= tol;
    } else {
        rec.sup_norm = kNaN;
        rec.residual = kNaN;
    }
    return rec;
}

EnsembleReport run_ensemble(const EnsembleConfig& cfg) {
    if (cfg.n_samples < 1) throw PreconditionError("ensemble: n_samples must be >= 1");
    SolverBundle bundle(cfg);

    EnsembleReport rep;
    rep.n = cfg.n_samples;
    rep.records.resize(static_cast<size_t>(cfg.n_samples));
    parallel_for(static_cast<size_t>(cfg.n_samples), cfg.threads, [&](size_t i) {
        rep.records[i] = bundle.run_sample(cfg.model, i, cfg.seed, cfg.tol, cfg.max_iter, cfg.eps);
    });

    rep.l0 = bundle.domain().l0();
    rep.f_sup = cfg.profile.sup_norm();
    const ContractionBudget empty =
        contraction_constants(bundle.spec(), AtomicMeasure{}, bundle.domain(), cfg.eps);
    rep.eps = empty.eps;
    rep.eps0 = empty.eps0;

    double s1 = 0.0, s2 = 0.0, t1 = 0.0, t2 = 0.0;
    for (const SampleRecord& r : rep.records) {
        if (r.admissible) ++rep.admissible_count;
        s1 += r.sup_norm;
        s2 += r.sup_norm * r.sup_norm;
        t1 += r.tv;
        t2 += r.tv * r.tv;
        rep.bounds_ok = rep.bounds_ok && r.medida_ok && r.norm_ok && r.residual_ok;
    }
    const double n = static_cast<double>(rep.n);
    rep.admissible_fraction = static_cast<double>(rep.admissible_count) / n;
    rep.mean_sup = s1 / n;
    rep.mean_sup2 = s2 / n;
    rep.mean_tv = t1 / n;
    rep.mean_tv2 = t2 / n;
    return rep;
}

AdmissibleProbability admissible_probability(const EnsembleReport& report,
                                             const EnsembleConfig& cfg) {
    if (report.n < 1) throw PreconditionError("admissible_probability: empty ensemble");
    AdmissibleProbability out;
    out.fraction = report.admissible_fraction;
    out.ci = wilson_interval(report.admissible_count, report.n);
    out.g_condition_ok = std::abs(cfg.g_const) <= report.eps / report.l0;
    const double l0f = report.l0 * report.f_sup;
    if (l0f == 0.0) {
        out.nu_below_c0 = 1.0;
        out.nu_below_one = 1.0;
    } else {
        out.nu_below_c0 = model_tv_cdf_left(cfg.model, cfg.domain, cfg.c0 / l0f);
        out.nu_below_one = model_tv_cdf_left(cfg.model, cfg.domain, 1.0 / l0f);
    }
    return out;
}

MomentReport moment_report(const EnsembleReport& report, long m) {
    if (m < 1) throw PreconditionError("moment_report: order m must be >= 1");
    if (report.n < 1) throw PreconditionError("moment_report: empty ensemble");
    for (const SampleRecord& r : report.records) {
        if (!r.admissible)
            throw HypothesisViolationError(
                "moment bound requires every sample admissible (violated at sample " +
                    std::to_string(r.index) + ")",
                static_cast<long>(r.index));
    }

    MomentReport out;
    out.m = m;
    const double n = static_cast<double>(report.n);
    const double md = static_cast<double>(m);
    double emp = 0.0, closed = 0.0;
    for (const SampleRecord& r : report.records) {
        emp += std::pow(r.sup_norm, md);
        closed += std::pow(1.0 - r.tau, -md);
    }
    const double scale = std::pow(2.0 * report.eps, md);
    out.empirical = emp / n;
    out.closed_bound = scale * (closed / n);

    // sum_j C(m+j-1,j) mean(tau^j); per-sample power accumulators keep every
    // factor below 1 so the truncated sum cannot overflow
    std::vector<double> pw(report.records.size(), 1.0);
    double sum = 1.0;
    double coeff = 1.0;
    long j = 0;
    while (true) {
        ++j;
        coeff *= static_cast<double>(m + j - 1) / static_cast<double>(j);
        double mean_j = 0.0;
        for (size_t s = 0; s < report.records.size(); ++s) {
            pw[s] *= report.records[s].tau;
            mean_j += pw[s];
        }
        mean_j /= n;
        const double term = coeff * mean_j;
        sum += term;
        if (term < 1e-12 * sum) break;
        if (j > 200000)
            throw HypothesisViolationError("moment_report: series failed to converge");
    }
    out.series_terms = j;
    out.series_bound = scale * sum;
    return out;
}

CltReport clt_test(const EnsembleConfig& cfg, long k, long trials, long pilot_multiplier) {
    if (k < 1) throw PreconditionError("clt_test: block size k must be >= 1");
    if (trials < 2) throw PreconditionError("clt_test: need at least two trials");
    if (pilot_multiplier < 1) throw PreconditionError("clt_test: pilot multiplier must be >= 1");
    SolverBundle bundle(cfg);

    CltReport rep;
    rep.k = k;
    rep.trials = trials;
    rep.pilot = pilot_multiplier * k;
    const long total = rep.pilot + trials * k;
    std::vector<double> z(static_cast<size_t>(total));
    parallel_for(static_cast<size_t>(total), cfg.threads, [&](size_t i) {
        SampleRecord rec = bundle.run_sample(cfg.model, i, cfg.seed, cfg.tol, cfg.max_iter, cfg.eps);
        if (!rec.admissible)
            throw HypothesisViolationError(
                "clt_test: hypothesis requires admissible samples (violated at sample " +
                    std::to_string(i) + ")",
                static_cast<long>(i));
        z[i] = rec.sup_norm;
    });

    const MeanVar mv = mean_sd(std::vector<double>(z.begin(), z.begin() + rep.pilot));
    if (mv.sd < 1e-12)
        throw DegenerateDistributionError(
            "clt_test: pilot standard deviation below 1e-12; distribution too concentrated");
    rep.m_hat = mv.mean;
    rep.sigma_hat = mv.sd;

    rep.sums.resize(static_cast<size_t>(trials));
    const double root_k = std::sqrt(static_cast<double>(k));
    for (long t = 0; t < trials; ++t) {
        double s = 0.0;
        for (long j = 0; j < k; ++j) s += z[static_cast<size_t>(rep.pilot + t * k + j)] - rep.m_hat;
        rep.sums[static_cast<size_t>(t)] = s / (rep.sigma_hat * root_k);
    }
    rep.ks_stat = ks_distance_normal(rep.sums);
    rep.ks_critical = ks_critical(0.01, trials);
    rep.pass = rep.ks_stat <= rep.ks_critical;
    return rep;
}

CltReport clt_self_oracle(std::uint64_t seed, long k, long trials) {
    if (k < 1) throw PreconditionError("clt_self_oracle: block size k must be >= 1");
    if (trials < 1) throw PreconditionError("clt_self_oracle: need at least one trial");
    CltReport rep;
    rep.k = k;
    rep.trials = trials;
    rep.pilot = 0;
    rep.self_oracle = true;
    rep.m_hat = 0.0;     // surrogates are standard normal by construction,
    rep.sigma_hat = 1.0; // so the standardization constants are known exactly
    rep.sums.resize(static_cast<size_t>(trials));
    const double root_k = std::sqrt(static_cast<double>(k));
    for (long t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        double s = 0.0;
        for (long j = 0; j < k; ++j) s += rng.normal();
        rep.sums[static_cast<size_t>(t)] = s / root_k;
    }
    rep.ks_stat = ks_distance_normal(rep.sums);
    rep.ks_critical = ks_critical(0.01, trials);
    rep.pass = rep.ks_stat <= rep.ks_critical;
    return rep;
}

LlnReport lln_test(const EnsembleConfig& cfg, long k, double delta, long trials,
                   long pilot_per_coordinate) {
    if (k < 1) throw PreconditionError("lln_test: need k >= 1 coordinates");
    if (trials < 1) throw PreconditionError("lln_test: need at least one trial");
    if (!(delta > 0.0)) throw PreconditionError("lln_test: delta must be positive");
    if (pilot_per_coordinate < 1)
        throw PreconditionError("lln_test: pilot size per coordinate must be >= 1");

    std::vector<MeasureModel> models = cfg.models;
    if (models.empty()) models.push_back(cfg.model);
    if (models.size() != 1 && models.size() != static_cast<size_t>(k))
        throw PreconditionError("lln_test: provide one model or exactly one per coordinate");
    auto model_at = [&](long j) -> const MeasureModel& {
        return models[models.size() == 1 ? 0 : static_cast<size_t>(j)];
    };

    SolverBundle bundle(cfg);
    const double l0 = bundle.domain().l0();
    const double f_sup = cfg.profile.sup_norm();
    double L = 0.0;
    for (const MeasureModel& m : models)
        L = std::max(L, l0 * f_sup * model_tv_bound(m, cfg.domain));
    if (!std::isfinite(L))
        throw HypothesisViolationError("lln_test: measure size has no almost-sure bound");
    if (!(L < 1.0))
        throw HypothesisViolationError(
            "lln_test: almost-sure interaction bound must stay below 1");

    const ContractionBudget empty =
        contraction_constants(bundle.spec(), AtomicMeasure{}, bundle.domain(), cfg.eps);

    LlnReport rep;
    rep.k = k;
    rep.trials = trials;
    rep.delta = delta;
    rep.L = L;
    rep.Q0 = 2.0 * empty.eps / (1.0 - L);
    rep.chebyshev_bound =
        std::min(1.0, 4.0 * rep.Q0 * rep.Q0 / (delta * delta * static_cast<double>(k)));

    const long pilot_total = k * pilot_per_coordinate;
    const long total = pilot_total + trials * k;
    std::vector<double> z(static_cast<size_t>(total));
    parallel_for(static_cast<size_t>(total), cfg.threads, [&](size_t i) {
        const long li = static_cast<long>(i);
        const long j = li < pilot_total ? li / pilot_per_coordinate : (li - pilot_total) % k;
        SampleRecord rec =
            bundle.run_sample(model_at(j), i, cfg.seed, cfg.tol, cfg.max_iter, cfg.eps);
        if (!rec.admissible)
            throw HypothesisViolationError(
                "lln_test: hypothesis requires admissible samples (violated at sample " +
                    std::to_string(i) + ")",
                static_cast<long>(i));
        z[i] = rec.sup_norm;
    });

    std::vector<double> pilot_mean(static_cast<size_t>(k), 0.0);
    for (long j = 0; j < k; ++j) {
        double s = 0.0;
        for (long i = 0; i < pilot_per_coordinate; ++i)
            s += z[static_cast<size_t>(j * pilot_per_coordinate + i)];
        pilot_mean[static_cast<size_t>(j)] = s / static_cast<double>(pilot_per_coordinate);
    }

    rep.deviations.resize(static_cast<size_t>(trials));
    long exceed = 0;
    for (long t = 0; t < trials; ++t) {
        double s = 0.0;
        for (long j = 0; j < k; ++j)
            s += z[static_cast<size_t>(pilot_total + t * k + j)] - pilot_mean[static_cast<size_t>(j)];
        const double dev = std::abs(s / static_cast<double>(k));
        rep.deviations[static_cast<size_t>(t)] = dev;
        if (dev >= delta) ++exceed;
    }
    rep.empirical_prob = static_cast<double>(exceed) / static_cast<double>(trials);
    rep.se = binomial_se(rep.empirical_prob, trials);
    rep.pass = rep.empirical_prob <= rep.chebyshev_bound + 2.0 * rep.se;
    return rep;
}

BorelCantelliReport borel_cantelli_check(const EnsembleConfig& cfg, double c_tilde, long k_max,
                                         long n_draws) {
    const double l0f = cfg.domain.l0() * cfg.profile.sup_norm();
    if (!(l0f > 0.0) || !(c_tilde > 0.0) || !(c_tilde < 1.0 / l0f))
        throw PreconditionError(
            "borel_cantelli_check: threshold must lie in (0, 1/(l0 ||f||_inf))");
    if (k_max < 1) throw PreconditionError("borel_cantelli_check: k_max must be >= 1");
    if (n_draws < 2) throw PreconditionError("borel_cantelli_check: need at least two draws");
    const std::optional<long> len = series_length(cfg.model);
    if (!len) throw PreconditionError("borel_cantelli_check: model has no series structure");
    if (*len < k_max)
        throw PreconditionError("borel_cantelli_check: series shorter than k_max");

    BorelCantelliReport rep;
    rep.k_max = k_max;
    rep.n_draws = n_draws;
    rep.c_tilde = c_tilde;

    std::vector<long> counts(static_cast<size_t>(k_max), 0);
    std::vector<double> per_draw(static_cast<size_t>(n_draws), 0.0);
    long tail = 0;
    for (long i = 0; i < n_draws; ++i) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
        const SeriesDraw draw = sample_series_draw(cfg.model, rng);
        long cnt = 0;
        for (long kk = 0; kk < k_max; ++kk) {
            if (draw.partial_tv[static_cast<size_t>(kk)] >= c_tilde) {
                ++counts[static_cast<size_t>(kk)];
                ++cnt;
            }
        }
        per_draw[static_cast<size_t>(i)] = static_cast<double>(cnt);
        if (draw.partial_tv.back() <= c_tilde) ++tail;
    }

    const double n = static_cast<double>(n_draws);
    rep.exceed_prob.resize(static_cast<size_t>(k_max));
    rep.partial_sums.resize(static_cast<size_t>(k_max));
    double run = 0.0;
    for (long kk = 0; kk < k_max; ++kk) {
        rep.exceed_prob[static_cast<size_t>(kk)] = static_cast<double>(counts[static_cast<size_t>(kk)]) / n;
        run += rep.exceed_prob[static_cast<size_t>(kk)];
        rep.partial_sums[static_cast<size_t>(kk)] = run;
    }
    rep.partial_sum = run;
    rep.partial_sum_se = mean_sd(per_draw).sd / std::sqrt(n);
    rep.tail_fraction = static_cast<double>(tail) / n;
    return rep;
}

}  // namespace rslab
