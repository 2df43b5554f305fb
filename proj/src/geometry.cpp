#include "rslab/geometry.hpp"

#include <cmath>
#include <utility>

namespace rslab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sq_dist(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

double unit_ball_volume(int n) {
    if (n <= 0) throw PreconditionError("unit_ball_volume: dimension must be positive");
    return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

BallDomain::BallDomain(int dim, Point center, double radius)
    : dim_(dim), center_(std::move(center)), radius_(radius) {
    if (dim_ < 3) throw PreconditionError("BallDomain: dimension must be >= 3");
    if (center_.size() != static_cast<size_t>(dim_))
        throw PreconditionError("BallDomain: center size does not match dimension");
    if (!(radius_ > 0.0) || !std::isfinite(radius_))
        throw PreconditionError("BallDomain: radius must be positive and finite");
}

double BallDomain::dist_from_center(const double* x) const {
    return std::sqrt(sq_dist(x, center_.data(), dim_));
}

bool BallDomain::contains(const double* x) const {
    return dist_from_center(x) < radius_;
}

bool BallDomain::contains_closed(const double* x) const {
    return dist_from_center(x) <= radius_ * (1.0 + 1e-12);
}

GreenKernel::GreenKernel(BallDomain domain) : domain_(std::move(domain)) {
    const int n = domain_.dim();
    const double alpha_n = unit_ball_volume(n);
    norm_const_ = 1.0 / (n * alpha_n * (n - 2));
    coincidence_tol_ = 1e-12 * domain_.radius();
}

double GreenKernel::eval(const double* x, const double* y) const {
    const int n = domain_.dim();
    const double R = domain_.radius();
    const double* c = domain_.center().data();

    // one pass over coordinates for all four quadratic forms
    double rxy2 = 0.0, rx2 = 0.0, ry2 = 0.0, dot = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = x[i] - c[i];
        const double dy = y[i] - c[i];
        const double d = x[i] - y[i];
        rxy2 += d * d;
        rx2 += dx * dx;
        ry2 += dy * dy;
        dot += dx * dy;
    }

    const double fp_slack = (1.0 + 1e-12);
    if (rx2 > R * R * fp_slack * fp_slack || ry2 > R * R * fp_slack * fp_slack)
        throw DomainError("green kernel: point outside the closed ball");

    const double rxy = std::sqrt(rxy2);
    if (rxy < coincidence_tol_)
        throw SingularityError("green kernel: coincident evaluation points");

    const double p = 2.0 - n;  // negative exponent
    double g;
    if (ry2 < coincidence_tol_ * coincidence_tol_) {
        // y at the center: image term degenerates to R^{2-n}
        g = norm_const_ * (std::pow(rxy, p) - std::pow(R, p));
    } else {
        // |y-c| |x-y*| = sqrt( ry2 |x-c|^2 - 2 R^2 (x-c).(y-c) + R^4 )
        const double t2 = ry2 * rx2 - 2.0 * R * R * dot + R * R * R * R;
        const double t = std::sqrt(t2) / R;
        g = norm_const_ * (std::pow(rxy, p) - std::pow(t, p));
    }
    // exact value is nonnegative; clip roundoff noise near the boundary
    return g > 0.0 ? g : 0.0;
}

double GreenKernel::eval(const Point& x, const Point& y) const {
    if (x.size() != static_cast<size_t>(domain_.dim()) ||
        y.size() != static_cast<size_t>(domain_.dim()))
        throw PreconditionError("green kernel: point dimension mismatch");
    return eval(x.data(), y.data());
}

double kernel_upper_bound(int n, const double* x, const double* y) {
    if (n < 3) throw PreconditionError("kernel_upper_bound: dimension must be >= 3");
    const double alpha_n = unit_ball_volume(n);
    const double cn = 1.0 / (n * alpha_n * (n - 2));
    double r2 = sq_dist(x, y, n);
    if (r2 == 0.0) throw SingularityError("kernel_upper_bound: coincident points");
    return cn * std::pow(std::sqrt(r2), 2.0 - n);
}

double kernel_upper_bound(int n, const Point& x, const Point& y) {
    if (x.size() != static_cast<size_t>(n) || y.size() != static_cast<size_t>(n))
        throw PreconditionError("kernel_upper_bound: point dimension mismatch");
    return kernel_upper_bound(n, x.data(), y.data());
}

}  // namespace rslab
