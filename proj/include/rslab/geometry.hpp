#pragma once

#include <vector>

#include "rslab/errors.hpp"

namespace rslab {

using Point = std::vector<double>;

// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

// Open ball in R^n, n >= 3 (the kernel below needs n-2 > 0).
class BallDomain {
  public:
    BallDomain(int dim, Point center, double radius);

    int dim() const { return dim_; }
    const Point& center() const { return center_; }
    double radius() const { return radius_; }
    double diameter() const { return 2.0 * radius_; }

    // l0 = diam(U)^2 / (2(n-2)); sup-norm budget of one kernel pass.
    double l0() const { return diameter() * diameter() / (2.0 * (dim_ - 2)); }

    double dist_from_center(const double* x) const;
    bool contains(const double* x) const;         // strict interior
    bool contains_closed(const double* x) const;  // closed ball, small fp slack

  private:
    int dim_;
    Point center_;
    double radius_;
};

// Dirichlet Green function of -Laplace on a ball, via the image charge
//   y* = c + R^2 (y - c)/|y - c|^2:
//   G(x,y) = c_n ( |x-y|^{2-n} - (|y-c| |x-y*| / R)^{2-n} ),
// with the centered limit G(x,c) = c_n ( |x-c|^{2-n} - R^{2-n} ).
class GreenKernel {
  public:
    explicit GreenKernel(BallDomain domain);

    const BallDomain& domain() const { return domain_; }
    double norm_const() const { return norm_const_; }  // c_n = 1/(n alpha_n (n-2))

    // Throws DomainError outside the closed ball and SingularityError when
    // |x - y| < 1e-12 R.
    double eval(const double* x, const double* y) const;
    double eval(const Point& x, const Point& y) const;

  private:
    BallDomain domain_;
    double norm_const_;
    double coincidence_tol_;
};

// c_n |x-y|^{2-n}, the radially symmetric majorant of every ball kernel.
double kernel_upper_bound(int n, const double* x, const double* y);
double kernel_upper_bound(int n, const Point& x, const Point& y);

}  // namespace rslab
