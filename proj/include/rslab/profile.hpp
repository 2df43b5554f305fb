#pragma once

#include <cmath>

#include "rslab/errors.hpp"

namespace rslab {

// Radial bump f(x) = profile(|x|), continuous and bounded, sup |f| = |amplitude|.
class BumpProfile {
  public:
    enum class Family { Tent, TruncatedGaussian, Constant };

    // width is only meaningful for the truncated Gaussian (its sigma).
    BumpProfile(Family family, double amplitude, double radius, double width = 0.0);

    static BumpProfile tent(double amplitude, double radius) {
        return {Family::Tent, amplitude, radius};
    }
    static BumpProfile truncated_gaussian(double amplitude, double radius, double width) {
        return {Family::TruncatedGaussian, amplitude, radius, width};
    }
    static BumpProfile constant(double amplitude) {
        return {Family::Constant, amplitude, 0.0};
    }

    Family family() const { return family_; }
    double amplitude() const { return amplitude_; }
    double radius() const { return radius_; }
    double width() const { return width_; }

    double sup_norm() const { return std::abs(amplitude_); }

    // value at radius r >= 0 from the bump center
    double radial(double r) const;

    // value at displacement dx in R^n
    double eval(const double* dx, int n) const;

  private:
    Family family_;
    double amplitude_;
    double radius_;
    double width_;
    double cutoff_;  // truncated Gaussian: exp(-r0^2/(2 s^2))
};

}  // namespace rslab
