#pragma once

#include <memory>
#include <vector>

#include "rslab/geometry.hpp"

namespace rslab {

// Cell-centered nodes of a symmetric grid, restricted to the open ball.
// Shared (immutable) between fields, rules and operators.
class GridLayout {
  public:
    GridLayout(BallDomain domain, double h);

    const BallDomain& domain() const { return domain_; }
    double spacing() const { return h_; }
    int cells_per_axis() const { return cells_per_axis_; }
    size_t size() const { return coords_.size() / domain_.dim(); }
    const double* node(size_t i) const { return coords_.data() + i * domain_.dim(); }
    Point node_point(size_t i) const;

    bool compatible(const GridLayout& other) const;

  private:
    BallDomain domain_;
    double h_;
    int cells_per_axis_;
    std::vector<double> coords_;  // size() * dim, node-major
};

using LayoutPtr = std::shared_ptr<const GridLayout>;

// Scalar samples on the nodes of a layout.
class GridField {
  public:
    GridField() = default;
    explicit GridField(LayoutPtr layout, double fill = 0.0);
    GridField(LayoutPtr layout, std::vector<double> values);

    const LayoutPtr& layout() const { return layout_; }
    size_t size() const { return values_.size(); }
    double operator[](size_t i) const { return values_[i]; }
    double& operator[](size_t i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double sup_norm() const;

  private:
    LayoutPtr layout_;
    std::vector<double> values_;
};

void require_same_layout(const GridField& a, const GridField& b, const char* what);

// sup_i |a_i - b_i|
double sup_distance(const GridField& a, const GridField& b);

// Midpoint rule over the ball: every interior node carries weight h^n; the
// singular diagonal carries the exact integral of the bounding kernel over
// the ball of one cell's volume, r_h^2/(2(n-2)) with r_h = (h^n/alpha_n)^{1/n}.
struct QuadratureRule {
    LayoutPtr layout;
    double node_weight;
    double self_weight;

    size_t size() const { return layout->size(); }
    double weight_sum() const { return node_weight * static_cast<double>(layout->size()); }
};

// Throws EmptyRuleError when no node lands strictly inside the ball.
QuadratureRule build_rule(const BallDomain& domain, double h);

}  // namespace rslab
