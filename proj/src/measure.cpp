#include "rslab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace rslab {

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    size_t dim = atoms_.empty() ? 0 : atoms_.front().location.size();
    for (const Atom& a : atoms_) {
        if (a.location.size() != dim)
            throw PreconditionError("AtomicMeasure: mixed location dimensions");
        if (!std::isfinite(a.weight))
            throw PreconditionError("AtomicMeasure: weight must be finite");
    }
}

double AtomicMeasure::total_variation() const {
    double s = 0.0;
    for (const Atom& a : atoms_) s += std::abs(a.weight);
    return s;
}

void AtomicMeasure::add(Point location, double weight) {
    if (!atoms_.empty() && location.size() != atoms_.front().location.size())
        throw PreconditionError("AtomicMeasure: mixed location dimensions");
    if (!std::isfinite(weight)) throw PreconditionError("AtomicMeasure: weight must be finite");
    atoms_.push_back(Atom{std::move(location), weight});
}

void AtomicMeasure::scale(double a) {
    for (Atom& at : atoms_) at.weight *= a;
}

AtomicMeasure AtomicMeasure::merged() const {
    std::map<Point, double> acc;
    for (const Atom& a : atoms_) acc[a.location] += a.weight;
    AtomicMeasure out;
    for (auto& [loc, w] : acc) out.add(loc, w);
    return out;
}

double diff_total_variation(const AtomicMeasure& a, const AtomicMeasure& b) {
    std::map<Point, double> acc;
    for (const Atom& at : a.atoms()) acc[at.location] += at.weight;
    for (const Atom& at : b.atoms()) acc[at.location] -= at.weight;
    double s = 0.0;
    for (const auto& [loc, w] : acc) s += std::abs(w);
    return s;
}

void MeasureAccumulator::add_term(double coefficient, const AtomicMeasure& base) {
    for (const Atom& a : base.atoms()) weights_[a.location] += coefficient * a.weight;
}

double MeasureAccumulator::total_variation() const {
    double s = 0.0;
    for (const auto& [loc, w] : weights_) s += std::abs(w);
    return s;
}

AtomicMeasure MeasureAccumulator::measure() const {
    AtomicMeasure out;
    for (const auto& [loc, w] : weights_) out.add(loc, w);
    return out;
}

}  // namespace rslab
