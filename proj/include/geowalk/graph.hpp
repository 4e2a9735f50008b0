#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geowalk/geometry.hpp"
#include "geowalk/kdtree.hpp"

namespace geowalk {

enum class GraphKind { Delaunay, Gabriel, Creek, Lattice, Loaded };

std::string to_string(GraphKind kind);
GraphKind parse_graph_kind(const std::string& name);

using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Undirected simple graph over point indices, stored as a sorted edge list
/// (i < j) plus CSR adjacency.
class Graph {
public:
    Graph() = default;
    /// Edges may be given in any order/orientation; duplicates are merged and
    /// self-loops rejected.
    Graph(std::size_t n_vertices, std::vector<Edge> edges, GraphKind kind = GraphKind::Loaded, int n_param = 0);

    GraphKind kind() const { return kind_; }
    int n_param() const { return n_param_; }
    std::size_t n_vertices() const { return n_; }
    std::size_t n_edges() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    std::span<const std::uint32_t> neighbors(std::size_t v) const {
        return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
    }
    std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }
    bool has_edge(std::uint32_t a, std::uint32_t b) const;
    /// True iff every edge of this graph is an edge of `other`.
    bool is_subgraph_of(const Graph& other) const;

private:
    GraphKind kind_ = GraphKind::Loaded;
    int n_param_ = 0;
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::uint32_t> offsets_{0};
    std::vector<std::uint32_t> adj_;
};

struct Triangulation {
    std::vector<std::array<std::uint32_t, 3>> triangles;  // counterclockwise
    Graph graph;
};

/// Delaunay triangulation of a planar configuration (exact predicates).
/// Cocircular quadrilaterals take the diagonal whose sorted index pair is
/// lexicographically smallest. Needs at least 3 points, not all collinear;
/// smaller inputs return the complete graph.
Triangulation delaunay_triangulation(const PointConfig& config);
Graph delaunay(const PointConfig& config);

/// Gabriel graph: {x,y} iff the open ball with diameter [x,y] holds no other point.
Graph gabriel(const PointConfig& config);

/// Creek-crossing graph G_n: {x,y} iff no path x=u0,...,uk=y with k <= n and
/// every step strictly shorter than |x-y| exists.
Graph creek_crossing(const PointConfig& config, int n);

/// Same, with candidate edges and a spatial index supplied by the caller.
Graph creek_crossing_from(const PointConfig& config, const KdTree& tree, const std::vector<Edge>& candidates, int n);
Graph gabriel_from(const PointConfig& config, const KdTree& tree, const std::vector<Edge>& candidates);

/// Edges that may belong to any of the three graphs: Delaunay edges in the
/// plane (the sorted chain for collinear input), all pairs otherwise.
std::vector<Edge> candidate_edges(const PointConfig& config);

Graph build_graph(const PointConfig& config, GraphKind kind, int n = 2);

/// Index of the point nearest to `location`; ties go to the lowest index.
std::size_t voronoi_nucleus(const PointConfig& config, const double* location);

struct DegreeStats {
    std::vector<std::size_t> histogram;        // histogram[k] = #vertices of degree k
    std::array<double, 9> moments{};           // moments[k] = mean deg^k, k = 0..8
    std::vector<double> max_edge_length;       // per vertex, 0 for isolated
    std::vector<double> tail;                  // tail[D] = fraction with deg >= D
    std::size_t n_vertices = 0;
};

/// Degree statistics over all vertices, or over `subset` when nonempty.
DegreeStats degree_stats(const Graph& graph, const PointConfig& config, std::span<const std::uint32_t> subset = {});

}  // namespace geowalk
