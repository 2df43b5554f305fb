#pragma once

#include "rslab/grid.hpp"
#include "rslab/measure.hpp"
#include "rslab/profile.hpp"

namespace rslab {

// V(x) = sum_i w_i f(x - eta_i)
double evaluate_potential(const BumpProfile& f, const AtomicMeasure& mu, const double* x, int n);
double evaluate_potential(const BumpProfile& f, const AtomicMeasure& mu, const Point& x);

// V sampled on every node of the layout
GridField potential_field(const BumpProfile& f, const AtomicMeasure& mu, const LayoutPtr& layout);

// sup_x |V(x)| <= ||f||_inf * |mu|(U)
double potential_sup_bound(const BumpProfile& f, const AtomicMeasure& mu);

}  // namespace rslab
