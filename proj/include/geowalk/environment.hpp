#pragma once

// A planar point-process realization that is generated tile by tile on
// demand, so that a walk never meets an artificial boundary. The graph is
// rebuilt whenever the domain grows; a vertex is "certified" once its
// neighbourhood can no longer change under further growth, and the walker
// only ever reads neighbourhoods of certified vertices.

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "geowalk/graph.hpp"
#include "geowalk/point_process.hpp"
#include "geowalk/rng.hpp"

namespace geowalk {

struct EnvironmentOptions {
    double initial_half_width = 30.0;
    double tile_side = 0.0;   // 0: max(R, 8/sqrt(lambda))
    double growth = 1.5;      // half-width multiplier per expansion
    double max_half_width = 1e5;
};

class GrowingEnvironment {
public:
    GrowingEnvironment(const ProcessSpec& spec, GraphKind kind, int n_param, std::uint64_t seed,
                       const EnvironmentOptions& options = {});

    static constexpr int dim() { return 2; }
    /// Palm point, at the origin.
    std::uint32_t origin() const { return 0; }
    const double* point(std::uint32_t v) const { return &coords_[2 * static_cast<std::size_t>(v)]; }
    std::size_t n_points() const { return coords_.size() / 2; }

    /// Grows the domain until v's neighbourhood is final.
    void ensure(std::uint32_t v);
    bool certified(std::uint32_t v) const { return certified_[v] != 0; }
    std::span<const std::uint32_t> neighbors(std::uint32_t v) const { return graph_.neighbors(v); }
    std::size_t degree(std::uint32_t v) const { return graph_.degree(v); }

    double half_width() const { return tiles_per_half_ * tile_; }
    std::size_t expansions() const { return expansions_; }
    const Graph& graph() const { return graph_; }
    /// Snapshot of the current points (shifted so the Palm point is the origin).
    PointConfig snapshot() const;

private:
    using TileKey = std::pair<std::int64_t, std::int64_t>;
    struct BaseTile {
        std::vector<double> pts;    // PPP base points (raw coordinates)
        std::vector<double> marks;  // MHP II marks
    };

    const BaseTile& base_tile(const TileKey& key);
    std::vector<double> final_tile_points(const TileKey& key);
    void grow_to(std::int64_t tiles_per_half);
    void rebuild();

    ProcessSpec spec_;
    GraphKind kind_;
    int n_param_;
    std::uint64_t seed_;
    EnvironmentOptions opt_;
    double tile_;
    std::int64_t tiles_per_half_ = 0;
    double shift_[2] = {0.0, 0.0};
    std::vector<double> coords_;
    std::map<TileKey, BaseTile> base_;
    std::map<TileKey, std::vector<double>> daughters_;  // MCP: daughters of the parents in a tile
    std::vector<char> certified_;
    Graph graph_;
    std::size_t expansions_ = 0;
};

}  // namespace geowalk
