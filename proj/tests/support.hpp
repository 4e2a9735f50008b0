#pragma once

// Small helpers shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "geowalk/geometry.hpp"
#include "geowalk/graph.hpp"
#include "geowalk/rng.hpp"

namespace testing {

inline geowalk::PointConfig config_from(std::initializer_list<std::initializer_list<double>> pts, int dim = 2) {
    geowalk::PointConfig c;
    c.dim = dim;
    for (const auto& p : pts) c.coords.insert(c.coords.end(), p.begin(), p.end());
    std::vector<double> lo(dim, -1.0), hi(dim, 1.0);
    for (std::size_t i = 0; i < c.size(); ++i)
        for (int k = 0; k < dim; ++k) {
            lo[k] = std::min(lo[k], c.coord(i, k) - 1.0);
            hi[k] = std::max(hi[k], c.coord(i, k) + 1.0);
        }
    c.window = geowalk::Window(lo, hi);
    return c;
}

/// n uniform points in [0, side]^dim.
inline geowalk::PointConfig uniform_points(std::size_t n, double side, geowalk::Rng& rng, int dim = 2) {
    geowalk::PointConfig c;
    c.dim = dim;
    c.window = geowalk::Window::cube(dim, 0.0, side);
    c.coords.resize(n * static_cast<std::size_t>(dim));
    for (auto& x : c.coords) x = rng.uniform(0.0, side);
    return c;
}

/// Integer grid points {lo..hi}^2 scaled by `spacing`.
inline geowalk::PointConfig grid_points(int lo, int hi, double spacing = 1.0) {
    geowalk::PointConfig c;
    c.dim = 2;
    for (int y = lo; y <= hi; ++y)
        for (int x = lo; x <= hi; ++x) {
            c.coords.push_back(x * spacing);
            c.coords.push_back(y * spacing);
        }
    c.window = geowalk::Window::cube(2, (lo - 0.5) * spacing, (hi + 0.5) * spacing);
    return c;
}

inline geowalk::Graph graph_of(std::size_t n, std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> e) {
    return geowalk::Graph(n, std::vector<geowalk::Edge>(e.begin(), e.end()));
}

/// |a - b| <= k * combined standard error.
inline bool within_sigma(double a, double b, double se, double k = 3.0) { return std::fabs(a - b) <= k * se; }

}  // namespace testing
