#include "rslab/operator_h.hpp"

#include <cmath>
#include <utility>

#include "rslab/parallel.hpp"

namespace rslab {

double signed_power(double u, double p) {
    if (u == 0.0) return 0.0;
    const double m = std::pow(std::abs(u), p);
    return u > 0.0 ? m : -m;
}

HOperator::HOperator(QuadratureRule rule, GreenKernel kernel, int threads,
                     size_t cache_limit_bytes)
    : rule_(std::move(rule)), kernel_(std::move(kernel)), threads_(threads < 1 ? 1 : threads) {
    if (rule_.layout->domain().dim() != kernel_.domain().dim() ||
        rule_.layout->domain().center() != kernel_.domain().center() ||
        rule_.layout->domain().radius() != kernel_.domain().radius())
        throw PreconditionError("operator: rule and kernel disagree on the domain");

    const size_t n = rule_.size();
    if (n * n * sizeof(double) <= cache_limit_bytes) {
        matrix_.assign(n * n, 0.0);
        const GridLayout& L = *rule_.layout;
        parallel_for(n, threads_, [&](size_t i) {
            double* row = matrix_.data() + i * n;
            const double* xi = L.node(i);
            for (size_t j = 0; j < n; ++j) {
                row[j] = (j == i) ? rule_.self_weight
                                  : kernel_.eval(xi, L.node(j)) * rule_.node_weight;
            }
        });
    }
}

double HOperator::row_dot(size_t i, const double* phi) const {
    const size_t n = rule_.size();
    const GridLayout& L = *rule_.layout;
    const double* xi = L.node(i);
    double acc = 0.0;
    for (size_t j = 0; j < n; ++j) {
        const double k =
            (j == i) ? rule_.self_weight : kernel_.eval(xi, L.node(j)) * rule_.node_weight;
        acc += k * phi[j];
    }
    return acc;
}

void HOperator::apply_raw(const double* phi, double* out) const {
    const size_t n = rule_.size();
    if (!matrix_.empty()) {
        parallel_for(n, threads_, [&](size_t i) {
            const double* row = matrix_.data() + i * n;
            double acc = 0.0;
            for (size_t j = 0; j < n; ++j) acc += row[j] * phi[j];
            out[i] = acc;
        });
    } else {
        parallel_for(n, threads_, [&](size_t i) { out[i] = row_dot(i, phi); });
    }
}

GridField HOperator::apply(const GridField& phi) const {
    if (!phi.layout() || !phi.layout()->compatible(*rule_.layout))
        throw LayoutError("operator apply: field grid does not match the rule");
    GridField out(rule_.layout);
    apply_raw(phi.values().data(), out.values().data());
    return out;
}

GridField HOperator::compose_rhs(const GridField& g, const GridField& V, const GridField& b,
                                 const GridField& u, double p) const {
    require_same_layout(g, u, "compose_rhs");
    require_same_layout(V, u, "compose_rhs");
    require_same_layout(b, u, "compose_rhs");
    if (!u.layout()->compatible(*rule_.layout))
        throw LayoutError("compose_rhs: field grid does not match the rule");
    if (!(p > 1.0)) throw PreconditionError("compose_rhs: exponent must exceed 1");

    GridField integrand(rule_.layout);
    for (size_t i = 0; i < u.size(); ++i)
        integrand[i] = g[i] + V[i] * u[i] + b[i] * signed_power(u[i], p);
    GridField out(rule_.layout);
    apply_raw(integrand.values().data(), out.values().data());
    return out;
}

}  // namespace rslab
