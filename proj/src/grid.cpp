#include "rslab/grid.hpp"

#include <cmath>
#include <utility>

namespace rslab {

GridLayout::GridLayout(BallDomain domain, double h) : domain_(std::move(domain)), h_(h) {
    if (!(h_ > 0.0) || !std::isfinite(h_))
        throw PreconditionError("grid: spacing must be positive and finite");
    const int n = domain_.dim();
    const double R = domain_.radius();
    cells_per_axis_ = static_cast<int>(std::floor(2.0 * R / h_ + 1e-9));
    if (cells_per_axis_ < 1) throw EmptyRuleError("grid: spacing exceeds the domain diameter");

    const double half = 0.5 * static_cast<double>(cells_per_axis_ - 1);
    std::vector<int> idx(n, 0);
    Point x(n);
    while (true) {
        for (int d = 0; d < n; ++d)
            x[d] = domain_.center()[d] + (static_cast<double>(idx[d]) - half) * h_;
        if (domain_.contains(x.data()))
            coords_.insert(coords_.end(), x.begin(), x.end());
        int d = n - 1;
        while (d >= 0) {
            if (++idx[d] < cells_per_axis_) break;
            idx[d] = 0;
            --d;
        }
        if (d < 0) break;
    }
    if (coords_.empty()) throw EmptyRuleError("grid: no node falls inside the domain");
}

Point GridLayout::node_point(size_t i) const {
    const double* p = node(i);
    return Point(p, p + domain_.dim());
}

bool GridLayout::compatible(const GridLayout& other) const {
    return this == &other ||
           (domain_.dim() == other.domain_.dim() && domain_.center() == other.domain_.center() &&
            domain_.radius() == other.domain_.radius() && h_ == other.h_ &&
            coords_.size() == other.coords_.size());
}

GridField::GridField(LayoutPtr layout, double fill)
    : layout_(std::move(layout)), values_(layout_->size(), fill) {}

GridField::GridField(LayoutPtr layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
    if (values_.size() != layout_->size())
        throw LayoutError("field: value count does not match the layout");
}

double GridField::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void require_same_layout(const GridField& a, const GridField& b, const char* what) {
    if (!a.layout() || !b.layout() || !a.layout()->compatible(*b.layout()))
        throw LayoutError(std::string(what) + ": fields built on different grids");
}

double sup_distance(const GridField& a, const GridField& b) {
    require_same_layout(a, b, "sup_distance");
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

QuadratureRule build_rule(const BallDomain& domain, double h) {
    auto layout = std::make_shared<const GridLayout>(domain, h);
    const int n = domain.dim();
    const double cell = std::pow(h, n);
    // radius of the ball with one cell's volume
    const double r_h = std::pow(cell / unit_ball_volume(n), 1.0 / n);
    const double self = r_h * r_h / (2.0 * (n - 2));
    return QuadratureRule{std::move(layout), cell, self};
}

}  // namespace rslab
