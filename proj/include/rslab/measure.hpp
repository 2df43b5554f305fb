#pragma once

#include <map>
#include <vector>

#include "rslab/geometry.hpp"

namespace rslab {

struct Atom {
    Point location;
    double weight;
};

// Finite signed combination of Dirac masses. Atom order is part of the value
// for reproducibility; merge() canonicalizes (sorted locations, coincident
// atoms summed).
class AtomicMeasure {
  public:
    AtomicMeasure() = default;
    explicit AtomicMeasure(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    size_t size() const { return atoms_.size(); }

    // |mu|(U) = sum of |weights| over the stored list.
    double total_variation() const;

    void add(Point location, double weight);
    void scale(double a);

    // Sums weights at coincident locations and sorts lexicographically.
    AtomicMeasure merged() const;

  private:
    std::vector<Atom> atoms_;
};

// |mu1 - mu2|(U) on the merged location list.
double diff_total_variation(const AtomicMeasure& a, const AtomicMeasure& b);

// Accumulates a coefficient-weighted series of measures term by term,
// merging coincident locations, and reports the running total variation.
class MeasureAccumulator {
  public:
    void add_term(double coefficient, const AtomicMeasure& base);
    double total_variation() const;
    AtomicMeasure measure() const;

  private:
    std::map<Point, double> weights_;
};

}  // namespace rslab
