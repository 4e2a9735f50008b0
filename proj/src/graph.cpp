#include "geowalk/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geowalk/error.hpp"
#include "geowalk/predicates.hpp"

namespace geowalk {

std::string to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::Delaunay: return "delaunay";
        case GraphKind::Gabriel: return "gabriel";
        case GraphKind::Creek: return "creek";
        case GraphKind::Lattice: return "lattice";
        case GraphKind::Loaded: return "loaded";
    }
    return "?";
}

GraphKind parse_graph_kind(const std::string& name) {
    if (name == "delaunay" || name == "dt") return GraphKind::Delaunay;
    if (name == "gabriel") return GraphKind::Gabriel;
    if (name == "creek") return GraphKind::Creek;
    if (name == "lattice") return GraphKind::Lattice;
    if (name == "loaded") return GraphKind::Loaded;
    throw ParameterError("unknown graph type '" + name + "'");
}

Graph::Graph(std::size_t n_vertices, std::vector<Edge> edges, GraphKind kind, int n_param)
    : kind_(kind), n_param_(n_param), n_(n_vertices), edges_(std::move(edges)) {
    for (auto& e : edges_) {
        if (e.first == e.second) throw ParameterError("self-loop in edge list");
        if (e.first >= n_ || e.second >= n_) throw ParameterError("edge endpoint out of range");
        if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    offsets_.assign(n_ + 1, 0);
    for (const auto& e : edges_) {
        ++offsets_[e.first + 1];
        ++offsets_[e.second + 1];
    }
    for (std::size_t v = 0; v < n_; ++v) offsets_[v + 1] += offsets_[v];
    adj_.resize(2 * edges_.size());
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
        adj_[fill[e.first]++] = e.second;
        adj_[fill[e.second]++] = e.first;
    }
}

bool Graph::has_edge(std::uint32_t a, std::uint32_t b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges_.begin(), edges_.end(), Edge{a, b});
}

bool Graph::is_subgraph_of(const Graph& other) const {
    return std::includes(other.edges_.begin(), other.edges_.end(), edges_.begin(), edges_.end());
}

namespace {

std::vector<Edge> sorted_chain(const PointConfig& config) {
    const std::size_t n = config.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), std::uint32_t{0});
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return std::lexicographical_compare(config.point(a), config.point(a) + config.dim, config.point(b),
                                            config.point(b) + config.dim);
    });
    std::vector<Edge> e;
    for (std::size_t i = 1; i < n; ++i) e.push_back({order[i - 1], order[i]});
    return e;
}

bool all_collinear(const PointConfig& config) {
    const std::size_t n = config.size();
    if (n < 3) return true;
    std::size_t j = 1;
    while (j < n && squared_distance(config.point(0), config.point(j), 2) == 0.0) ++j;
    for (std::size_t i = j + 1; i < n; ++i)
        if (predicates::orient2d(config.point(0), config.point(j), config.point(i)) != 0) return false;
    return true;
}

// Floating comparison of |u-w|^2 against the reference squared length, with an
// exact fallback near ties.
struct StrictShorter {
    const PointConfig& cfg;
    const double* x;
    const double* y;
    double l2;

    bool operator()(const double* u, const double* w) const {
        const double d2 = squared_distance(u, w, cfg.dim);
        if (d2 < l2 * (1.0 - 1e-12)) return true;
        if (d2 > l2 * (1.0 + 1e-12)) return false;
        return predicates::compare_sq_dist(u, w, x, y, cfg.dim) < 0;
    }
};

}  // namespace

std::vector<Edge> candidate_edges(const PointConfig& config) {
    const std::size_t n = config.size();
    if (config.dim == 1) return sorted_chain(config);
    if (config.dim == 2) {
        if (all_collinear(config)) return sorted_chain(config);
        return delaunay(config).edges();
    }
    std::vector<Edge> e;
    e.reserve(n * (n - 1) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) e.push_back({i, j});
    return e;
}

Graph gabriel_from(const PointConfig& config, const KdTree& tree, const std::vector<Edge>& candidates) {
    const int d = config.dim;
    std::vector<Edge> kept;
    std::vector<std::uint32_t> near;
    std::vector<double> mid(d);
    for (const auto& [i, j] : candidates) {
        const double* x = config.point(i);
        const double* y = config.point(j);
        for (int k = 0; k < d; ++k) mid[k] = 0.5 * (x[k] + y[k]);
        const double r2 = 0.25 * squared_distance(x, y, d);
        near.clear();
        tree.radius_query(mid.data(), r2 * (1.0 + 1e-9) + 1e-300, near);
        bool empty = true;
        for (auto p : near) {
            if (p == i || p == j) continue;
            if (predicates::diametral(x, y, config.point(p), d) < 0) {
                empty = false;
                break;
            }
        }
        if (empty) kept.push_back({i, j});
    }
    return Graph(config.size(), std::move(kept), GraphKind::Gabriel);
}

Graph gabriel(const PointConfig& config) {
    if (config.size() < 2) return Graph(config.size(), {}, GraphKind::Gabriel);
    const KdTree tree(config.coords.data(), config.size(), config.dim);
    return gabriel_from(config, tree, candidate_edges(config));
}

Graph creek_crossing_from(const PointConfig& config, const KdTree& tree, const std::vector<Edge>& candidates, int n) {
    if (n < 2) throw ParameterError("creek-crossing parameter n must be >= 2");
    const int d = config.dim;
    std::vector<Edge> kept;
    std::vector<std::uint32_t> near;
    std::vector<double> mid(d);
    std::vector<std::uint32_t> frontier, next;
    std::vector<char> seen;
    for (const auto& [i, j] : candidates) {
        const double* x = config.point(i);
        const double* y = config.point(j);
        const double l2 = squared_distance(x, y, d);
        const double l = std::sqrt(l2);
        for (int k = 0; k < d; ++k) mid[k] = 0.5 * (x[k] + y[k]);
        // Every vertex of an admissible detour lies within (n+1)l/2 of the midpoint.
        const double reach = 0.5 * (n + 1) * l;
        near.clear();
        tree.radius_query(mid.data(), reach * reach * (1.0 + 1e-9), near);
        const StrictShorter shorter{config, x, y, l2};

        seen.assign(near.size(), 0);
        frontier.clear();
        for (std::size_t a = 0; a < near.size(); ++a)
            if (near[a] == i) {
                seen[a] = 1;
                frontier.push_back(static_cast<std::uint32_t>(a));
            }
        // frontier holds the vertices first reached after h strictly shorter steps.
        bool detour = false;
        for (int h = 0; h < n && !detour && !frontier.empty(); ++h) {
            if (h >= 1)
                for (auto a : frontier)
                    if (shorter(config.point(near[a]), y)) {
                        detour = true;
                        break;
                    }
            if (detour || h == n - 1) break;
            const double left = static_cast<double>(n - h - 1);
            next.clear();
            for (auto a : frontier) {
                const double* u = config.point(near[a]);
                for (std::size_t b = 0; b < near.size(); ++b) {
                    if (seen[b] || near[b] == j) continue;
                    const double* w = config.point(near[b]);
                    if (squared_distance(w, y, d) > left * left * l2 * (1.0 + 1e-9)) continue;
                    if (shorter(u, w)) {
                        seen[b] = 1;
                        next.push_back(static_cast<std::uint32_t>(b));
                    }
                }
            }
            frontier.swap(next);
        }
        if (!detour) kept.push_back({i, j});
    }
    return Graph(config.size(), std::move(kept), GraphKind::Creek, n);
}

Graph creek_crossing(const PointConfig& config, int n) {
    if (n < 2) throw ParameterError("creek-crossing parameter n must be >= 2");
    if (config.size() < 2) return Graph(config.size(), {}, GraphKind::Creek, n);
    const KdTree tree(config.coords.data(), config.size(), config.dim);
    std::vector<Edge> cand = candidate_edges(config);
    if (config.dim >= 3) cand = gabriel_from(config, tree, cand).edges();
    return creek_crossing_from(config, tree, cand, n);
}

Graph build_graph(const PointConfig& config, GraphKind kind, int n) {
    switch (kind) {
        case GraphKind::Delaunay: return delaunay(config);
        case GraphKind::Gabriel: return gabriel(config);
        case GraphKind::Creek: return creek_crossing(config, n);
        default: break;
    }
    throw ParameterError("graph kind '" + to_string(kind) + "' cannot be built from points");
}

std::size_t voronoi_nucleus(const PointConfig& config, const double* location) {
    if (config.size() == 0) throw ParameterError("voronoi_nucleus needs a nonempty configuration");
    const KdTree tree(config.coords.data(), config.size(), config.dim);
    return tree.nearest(location);
}

DegreeStats degree_stats(const Graph& graph, const PointConfig& config, std::span<const std::uint32_t> subset) {
    DegreeStats s;
    std::vector<std::uint32_t> all;
    if (subset.empty()) {
        all.resize(graph.n_vertices());
        std::iota(all.begin(), all.end(), std::uint32_t{0});
        subset = all;
    }
    s.n_vertices = subset.size();
    std::size_t max_deg = 0;
    for (auto v : subset) max_deg = std::max(max_deg, graph.degree(v));
    s.histogram.assign(max_deg + 1, 0);
    s.max_edge_length.assign(subset.size(), 0.0);
    for (std::size_t r = 0; r < subset.size(); ++r) {
        const auto v = subset[r];
        const std::size_t deg = graph.degree(v);
        ++s.histogram[deg];
        double p = 1.0;
        for (int k = 0; k <= 8; ++k) {
            s.moments[k] += p;
            p *= static_cast<double>(deg);
        }
        double m = 0.0;
        for (auto w : graph.neighbors(v)) m = std::max(m, squared_distance(config.point(v), config.point(w), config.dim));
        s.max_edge_length[r] = std::sqrt(m);
    }
    const double n = static_cast<double>(std::max<std::size_t>(subset.size(), 1));
    for (auto& m : s.moments) m /= n;
    s.tail.assign(max_deg + 2, 0.0);
    std::size_t acc = 0;
    for (std::size_t D = max_deg + 1; D-- > 0;) {
        acc += s.histogram[D];
        s.tail[D] = static_cast<double>(acc) / n;
    }
    return s;
}

}  // namespace geowalk
