#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace geowalk {

/// Axis-aligned box [lo, hi] in d dimensions. `margin` records how far the
/// sampler extended beyond the box to remove edge effects.
struct Window {
    std::vector<double> lo;
    std::vector<double> hi;
    double margin = 0.0;

    Window() = default;
    Window(std::vector<double> lo_, std::vector<double> hi_, double margin_ = 0.0);

    /// [-half, half]^dim
    static Window cube(int dim, double half);
    /// [lo, hi]^dim
    static Window cube(int dim, double lo, double hi);

    int dim() const { return static_cast<int>(lo.size()); }
    double volume() const;
    double side(int k) const { return hi[k] - lo[k]; }
    /// Closed containment test.
    bool contains(const double* x) const;
    /// Strict (open) containment test.
    bool contains_open(const double* x) const;
    Window dilated(double r) const;
    bool contains_origin() const;
    void validate() const;
};

/// A finite point set; coordinates are stored row-major (point i occupies
/// coords[i*dim .. i*dim+dim)).
struct PointConfig {
    Window window;
    int dim = 0;
    std::vector<double> coords;
    bool palm = false;
    std::uint64_t seed = 0;

    std::size_t size() const { return dim == 0 ? 0 : coords.size() / static_cast<std::size_t>(dim); }
    const double* point(std::size_t i) const { return coords.data() + i * static_cast<std::size_t>(dim); }
    double* point(std::size_t i) { return coords.data() + i * static_cast<std::size_t>(dim); }
    double coord(std::size_t i, int k) const { return coords[i * static_cast<std::size_t>(dim) + k]; }
    void push_back(const double* x) { coords.insert(coords.end(), x, x + dim); }
};

double squared_distance(const double* a, const double* b, int dim);

/// Indices of points that exactly duplicate an earlier point.
std::vector<std::size_t> duplicate_points(const PointConfig& config);

/// Volume of the d-dimensional ball of radius r.
double ball_volume(int dim, double r);

}  // namespace geowalk
