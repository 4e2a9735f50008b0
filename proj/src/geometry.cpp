#include "geowalk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "geowalk/error.hpp"

namespace geowalk {

Window::Window(std::vector<double> lo_, std::vector<double> hi_, double margin_)
    : lo(std::move(lo_)), hi(std::move(hi_)), margin(margin_) {
    validate();
}

Window Window::cube(int dim, double half) { return cube(dim, -half, half); }

Window Window::cube(int dim, double lo, double hi) {
    if (dim < 1) throw ParameterError("window dimension must be >= 1");
    return Window(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

void Window::validate() const {
    if (lo.empty() || lo.size() != hi.size()) throw ParameterError("window bounds must be nonempty and congruent");
    for (std::size_t k = 0; k < lo.size(); ++k)
        if (!(hi[k] > lo[k])) throw ParameterError("window needs hi > lo on every axis");
    if (!(margin >= 0.0)) throw ParameterError("window margin must be nonnegative");
}

double Window::volume() const {
    double v = 1.0;
    for (int k = 0; k < dim(); ++k) v *= hi[k] - lo[k];
    return v;
}

bool Window::contains(const double* x) const {
    for (int k = 0; k < dim(); ++k)
        if (x[k] < lo[k] || x[k] > hi[k]) return false;
    return true;
}

bool Window::contains_open(const double* x) const {
    for (int k = 0; k < dim(); ++k)
        if (!(x[k] > lo[k] && x[k] < hi[k])) return false;
    return true;
}

Window Window::dilated(double r) const {
    Window w = *this;
    for (int k = 0; k < dim(); ++k) {
        w.lo[k] -= r;
        w.hi[k] += r;
    }
    return w;
}

bool Window::contains_origin() const {
    for (int k = 0; k < dim(); ++k)
        if (lo[k] > 0.0 || hi[k] < 0.0) return false;
    return true;
}

double squared_distance(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

std::vector<std::size_t> duplicate_points(const PointConfig& config) {
    const std::size_t n = config.size();
    const int d = config.dim;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        const double* pa = config.point(a);
        const double* pb = config.point(b);
        for (int k = 0; k < d; ++k)
            if (pa[k] != pb[k]) return pa[k] < pb[k];
        return a < b;
    };
    std::sort(order.begin(), order.end(), less);
    std::vector<std::size_t> dup;
    for (std::size_t r = 1; r < n; ++r)
        if (std::equal(config.point(order[r]), config.point(order[r]) + d, config.point(order[r - 1])))
            dup.push_back(order[r]);
    std::sort(dup.begin(), dup.end());
    return dup;
}

double ball_volume(int dim, double r) {
    const double half_d = 0.5 * dim;
    return std::pow(std::numbers::pi, half_d) / std::tgamma(half_d + 1.0) * std::pow(r, dim);
}

}  // namespace geowalk
