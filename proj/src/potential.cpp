#include "rslab/potential.hpp"

#include <cmath>

namespace rslab {

BumpProfile::BumpProfile(Family family, double amplitude, double radius, double width)
    : family_(family), amplitude_(amplitude), radius_(radius), width_(width), cutoff_(0.0) {
    if (!std::isfinite(amplitude_)) throw PreconditionError("profile: amplitude must be finite");
    if (family_ != Family::Constant && !(radius_ > 0.0))
        throw PreconditionError("profile: support radius must be positive");
    if (family_ == Family::TruncatedGaussian) {
        if (!(width_ > 0.0)) throw PreconditionError("profile: gaussian width must be positive");
        cutoff_ = std::exp(-radius_ * radius_ / (2.0 * width_ * width_));
    }
}

double BumpProfile::radial(double r) const {
    switch (family_) {
        case Family::Constant:
            return amplitude_;
        case Family::Tent:
            return r < radius_ ? amplitude_ * (1.0 - r / radius_) : 0.0;
        case Family::TruncatedGaussian: {
            if (r >= radius_) return 0.0;
            // shifted by the cutoff value for continuity, rescaled so the
            // peak stays exactly at the amplitude
            const double g = std::exp(-r * r / (2.0 * width_ * width_));
            return amplitude_ * (g - cutoff_) / (1.0 - cutoff_);
        }
    }
    return 0.0;
}

double BumpProfile::eval(const double* dx, int n) const {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += dx[i] * dx[i];
    return radial(std::sqrt(r2));
}

double evaluate_potential(const BumpProfile& f, const AtomicMeasure& mu, const double* x, int n) {
    double v = 0.0;
    std::vector<double> dx(n);
    for (const Atom& a : mu.atoms()) {
        if (a.location.size() != static_cast<size_t>(n))
            throw PreconditionError("potential: atom dimension mismatch");
        for (int i = 0; i < n; ++i) dx[i] = x[i] - a.location[i];
        v += a.weight * f.eval(dx.data(), n);
    }
    return v;
}

double evaluate_potential(const BumpProfile& f, const AtomicMeasure& mu, const Point& x) {
    return evaluate_potential(f, mu, x.data(), static_cast<int>(x.size()));
}

GridField potential_field(const BumpProfile& f, const AtomicMeasure& mu, const LayoutPtr& layout) {
    GridField out(layout);
    const int n = layout->domain().dim();
    for (size_t i = 0; i < layout->size(); ++i)
        out[i] = evaluate_potential(f, mu, layout->node(i), n);
    return out;
}

double potential_sup_bound(const BumpProfile& f, const AtomicMeasure& mu) {
    return f.sup_norm() * mu.total_variation();
}

}  // namespace rslab
