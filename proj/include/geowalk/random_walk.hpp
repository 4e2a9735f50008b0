#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "geowalk/geometry.hpp"
#include "geowalk/graph.hpp"
#include "geowalk/rng.hpp"

namespace geowalk {

struct Jump {
    double time;
    std::uint32_t vertex;
};

/// One VSRW trajectory. jumps[0] = (0, start). A path that left the inner
/// window is truncated: it ends at the first vertex outside, exit_time records
/// when, and t_end = exit_time.
struct WalkPath {
    std::vector<Jump> jumps;
    double t_end = 0.0;
    std::uint32_t start = 0;
    bool truncated = false;
    double exit_time = std::numeric_limits<double>::infinity();
};

/// Variable-speed random walk with unit conductances: Exp(deg) holding times,
/// uniform neighbour choice. With `inner` set, the walk stops at the first
/// jump onto a vertex outside it.
WalkPath simulate_vsrw(const Graph& graph, const PointConfig& config, std::uint32_t start, double t_max, Rng& rng,
                       const Window* inner = nullptr);

/// Discrete jump chain: n_steps uniform neighbour moves. Result has n_steps+1 entries.
std::vector<std::uint32_t> jump_chain(const Graph& graph, std::uint32_t start, std::size_t n_steps, Rng& rng);

/// Index into path.jumps of the record in force at time t (right-continuous).
std::size_t jump_index_at(const WalkPath& path, double t);

/// Coordinates of the vertex occupied at time t.
std::vector<double> position_at(const WalkPath& path, const PointConfig& config, double t);

/// X_t - X_0 accumulated jump by jump from the per-jump displacement vectors.
std::vector<double> displacement_sum(const WalkPath& path, const PointConfig& config, double t);

}  // namespace geowalk
