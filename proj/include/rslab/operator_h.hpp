#pragma once

#include "rslab/grid.hpp"

namespace rslab {

// Discrete kernel pass (H phi)(x_i) = sum_{j != i} G(x_i, x_j) phi(x_j) h^n
// + self_weight * phi(x_i). The full N x N kernel matrix is materialized once
// and reused across applications when it fits the cache budget; otherwise
// rows are regenerated on the fly. Both paths sum in the same node order, so
// results are bitwise identical regardless of caching and thread count.
class HOperator {
  public:
    static constexpr size_t kDefaultCacheBytes = size_t(1) << 30;  // 1 GiB

    HOperator(QuadratureRule rule, GreenKernel kernel, int threads = 1,
              size_t cache_limit_bytes = kDefaultCacheBytes);

    const QuadratureRule& rule() const { return rule_; }
    const GreenKernel& kernel() const { return kernel_; }
    const LayoutPtr& layout() const { return rule_.layout; }
    int threads() const { return threads_; }
    // Ensemble drivers parallelize across samples and turn row parallelism off.
    void set_threads(int t) { threads_ = t < 1 ? 1 : t; }
    bool cached() const { return !matrix_.empty(); }

    GridField apply(const GridField& phi) const;

    // One Picard step: H(g + V u + b u |u|^{p-1}) in a single kernel pass.
    GridField compose_rhs(const GridField& g, const GridField& V, const GridField& b,
                          const GridField& u, double p) const;

  private:
    void apply_raw(const double* phi, double* out) const;
    double row_dot(size_t i, const double* phi) const;

    QuadratureRule rule_;
    GreenKernel kernel_;
    int threads_;
    std::vector<double> matrix_;  // row-major N x N when cached
};

// u |u|^{p-1}, defined as 0 at u = 0 (matters for p < 2 where |u|^{p-1} blows up).
double signed_power(double u, double p);

}  // namespace rslab
