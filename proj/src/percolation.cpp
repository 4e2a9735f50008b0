#include "geowalk/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <string>
#include <unordered_map>

#include "geowalk/error.hpp"
#include "geowalk/kdtree.hpp"
#include "geowalk/parallel.hpp"

namespace geowalk {

int alpha_d(int dim) { return 4 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dim)))) + 5; }
int segment_events(int dim) { return 2 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dim)))) + 3; }
double default_c2(const ProcessSpec& spec, int dim) { return 2.0 * spec.intensity(dim); }

bool BoxGrid::in_range(std::span<const std::int64_t> z) const {
    for (int k = 0; k < dim; ++k)
        if (z[k] < z_lo[k] || z[k] > z_hi[k]) return false;
    return true;
}

std::size_t BoxGrid::index(std::span<const std::int64_t> z) const {
    std::size_t idx = 0, stride = 1;
    for (int k = 0; k < dim; ++k) {
        idx += static_cast<std::size_t>(z[k] - z_lo[k]) * stride;
        stride *= static_cast<std::size_t>(z_hi[k] - z_lo[k] + 1);
    }
    return idx;
}

std::vector<std::int64_t> BoxGrid::z_of(std::size_t idx) const {
    std::vector<std::int64_t> z(dim);
    for (int k = 0; k < dim; ++k) {
        const auto ext = static_cast<std::size_t>(z_hi[k] - z_lo[k] + 1);
        z[k] = z_lo[k] + static_cast<std::int64_t>(idx % ext);
        idx /= ext;
    }
    return z;
}

Window BoxGrid::box(std::span<const std::int64_t> z) const {
    std::vector<double> lo(dim), hi(dim);
    for (int k = 0; k < dim; ++k) {
        lo[k] = K * static_cast<double>(z[k]) - K / 2;
        hi[k] = K * static_cast<double>(z[k]) + K / 2;
    }
    return Window(lo, hi);
}

namespace {

std::vector<double> centre_of(const BoxGrid& g, std::span<const std::int64_t> z) {
    std::vector<double> c(g.dim);
    for (int k = 0; k < g.dim; ++k) c[k] = g.K * static_cast<double>(z[k]);
    return c;
}

void box_points(const KdTree& tree, const double* c, double h, int dim, std::vector<std::uint32_t>& out) {
    std::vector<double> lo(dim), hi(dim);
    for (int k = 0; k < dim; ++k) {
        lo[k] = c[k] - h;
        hi[k] = c[k] + h;
    }
    out.clear();
    tree.box_query(lo.data(), hi.data(), out);
    std::sort(out.begin(), out.end());
}

bool nice_box(const PointConfig& config, const KdTree& tree, const BoxGrid& g, std::span<const std::int64_t> z,
              std::uint32_t& count) {
    const int d = g.dim;
    const int a = alpha_d(d);
    const double s = g.sub_side();
    const auto c = centre_of(g, z);
    std::vector<std::uint32_t> pts;
    box_points(tree, c.data(), g.K / 2, d, pts);
    count = static_cast<std::uint32_t>(pts.size());
    if (static_cast<double>(pts.size()) > g.c2 * std::pow(g.K, d)) return false;
    std::size_t n_sub = 1;
    for (int k = 0; k < d; ++k) n_sub *= static_cast<std::size_t>(a);
    std::vector<char> occupied(n_sub, 0);
    // A point on a sub-box face occupies both closed sub-boxes.
    std::vector<std::vector<int>> cells(d);
    for (auto p : pts) {
        for (int k = 0; k < d; ++k) {
            cells[k].clear();
            const double u = (config.coord(p, k) - (c[k] - g.K / 2)) / s;
            const int f = std::clamp(static_cast<int>(std::floor(u)), 0, a - 1);
            cells[k].push_back(f);
            if (u == std::floor(u) && f > 0 && static_cast<int>(u) == f) cells[k].push_back(f - 1);
        }
        std::vector<std::size_t> pick(d, 0);
        for (;;) {
            std::size_t idx = 0, stride = 1;
            for (int k = 0; k < d; ++k) {
                idx += static_cast<std::size_t>(cells[k][pick[k]]) * stride;
                stride *= static_cast<std::size_t>(a);
            }
            occupied[idx] = 1;
            int k = 0;
            while (k < d && ++pick[k] == cells[k].size()) pick[k++] = 0;
            if (k == d) break;
        }
    }
    return std::all_of(occupied.begin(), occupied.end(), [](char o) { return o != 0; });
}

// Shortest graph path from a to b using only vertices in `region` (sorted).
std::optional<std::vector<std::uint32_t>> bfs_path(const Graph& graph, const std::vector<std::uint32_t>& region,
                                                   std::uint32_t a, std::uint32_t b) {
    auto slot = [&](std::uint32_t v) -> std::int64_t {
        const auto it = std::lower_bound(region.begin(), region.end(), v);
        return (it != region.end() && *it == v) ? it - region.begin() : -1;
    };
    const auto sa = slot(a), sb = slot(b);
    if (sa < 0 || sb < 0) return std::nullopt;
    std::vector<std::int64_t> parent(region.size(), -2);
    std::deque<std::uint32_t> queue{a};
    parent[sa] = -1;
    while (!queue.empty() && parent[sb] == -2) {
        const auto v = queue.front();
        queue.pop_front();
        for (auto w : graph.neighbors(v)) {
            const auto sw = slot(w);
            if (sw < 0 || parent[sw] != -2) continue;
            parent[sw] = v;
            queue.push_back(w);
        }
    }
    if (parent[sb] == -2) return std::nullopt;
    std::vector<std::uint32_t> path{b};
    for (auto v = b; v != a;) {
        v = static_cast<std::uint32_t>(parent[slot(v)]);
        path.push_back(v);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

// Appends `seq` to `path` and erases loops, keeping the path simple.
void append_loop_erased(std::vector<std::uint32_t>& path, std::unordered_map<std::uint32_t, std::size_t>& pos,
                        const std::vector<std::uint32_t>& seq) {
    for (auto v : seq) {
        const auto it = pos.find(v);
        if (it != pos.end()) {
            const std::size_t keep = it->second + 1;
            for (std::size_t k = keep; k < path.size(); ++k) pos.erase(path[k]);
            path.resize(keep);
        } else {
            pos[v] = path.size();
            path.push_back(v);
        }
    }
}

std::uint32_t nucleus_in_box(const PointConfig& config, const KdTree& tree, const BoxGrid& g,
                             std::span<const std::int64_t> z) {
    const auto c = centre_of(g, z);
    const auto v = static_cast<std::uint32_t>(tree.nearest(c.data()));
    if (!g.box(z).contains(config.point(v)))
        throw InvariantViolation("reference vertex of a good box lies outside the box");
    return v;
}

std::vector<std::uint32_t> connect_with_tree(const PointConfig& config, const KdTree& tree, const BoxGrid& grid,
                                             const Graph& graph, std::span<const std::int64_t> z1,
                                             std::span<const std::int64_t> z2) {
    const int d = grid.dim;
    if (!grid.is_good(z1) || !grid.is_good(z2)) throw ParameterError("connect_neighbors needs two good boxes");
    int axis = -1, sign = 0, diff = 0;
    for (int k = 0; k < d; ++k) {
        const auto delta = z2[k] - z1[k];
        if (delta == 0) continue;
        ++diff;
        axis = k;
        sign = delta > 0 ? 1 : -1;
        if (delta != 1 && delta != -1) diff = 99;
    }
    if (diff != 1) throw ParameterError("connect_neighbors needs lattice-adjacent boxes");

    const int a = alpha_d(d), m = segment_events(d);
    const double s = grid.sub_side();
    const double h = (1.0 + std::sqrt(static_cast<double>(d))) * s;
    const auto base = centre_of(grid, z1);
    auto centre = [&](int i) {  // c_i, i = 1..a+1
        auto c = base;
        c[axis] += sign * (i - 1) * s;
        return c;
    };
    std::vector<std::uint32_t> nuclei(a + 1);
    nuclei[0] = static_cast<std::uint32_t>(grid.ref_vertex[grid.index(z1)]);
    nuclei[a] = static_cast<std::uint32_t>(grid.ref_vertex[grid.index(z2)]);
    for (int i = 2; i <= a; ++i) nuclei[i - 1] = static_cast<std::uint32_t>(tree.nearest(centre(i).data()));

    std::vector<std::uint32_t> path{nuclei[0]};
    std::unordered_map<std::uint32_t, std::size_t> pos{{nuclei[0], 0}};
    std::vector<std::uint32_t> region;
    for (int i = 1; i <= a; ++i) {
        // The first m hops use z1's events, the rest z2's events at c_{i+1}.
        const auto c = centre(i <= m ? i : i + 1);
        box_points(tree, c.data(), 2 * h, d, region);
        const auto hop = bfs_path(graph, region, nuclei[i - 1], nuclei[i]);
        if (!hop) {
            std::ostringstream msg;
            msg << "no G_n path between segment nuclei " << nuclei[i - 1] << " and " << nuclei[i] << " (hop " << i
                << " of " << a << ", z1 = (";
            for (int k = 0; k < d; ++k) msg << (k ? "," : "") << z1[k];
            msg << "), axis " << axis << ", sign " << sign << ") although both boxes are good";
            throw InvariantViolation(msg.str());
        }
        append_loop_erased(path, pos, std::vector<std::uint32_t>(hop->begin() + 1, hop->end()));
    }

    const Window b1 = grid.box(z1), b2 = grid.box(z2);
    for (auto v : path)
        if (!b1.contains(config.point(v)) && !b2.contains(config.point(v)))
            throw InvariantViolation("neighbour path leaves the union of the two boxes");
    if (static_cast<double>(path.size() - 1) > 2.0 * grid.c2 * std::pow(grid.K, d))
        throw InvariantViolation("neighbour path exceeds the length bound 2 c2 K^d");
    return path;
}

}  // namespace

BoxGrid classify_nice(const PointConfig& config, double K, double c2, std::vector<std::int64_t> z_lo,
                      std::vector<std::int64_t> z_hi) {
    if (!(K > 0.0)) throw ParameterError("K must be positive");
    if (!(c2 > 0.0)) throw ParameterError("c2 must be positive");
    const int d = config.dim;
    if (static_cast<int>(z_lo.size()) != d || static_cast<int>(z_hi.size()) != d)
        throw ParameterError("lattice range dimension mismatch");
    BoxGrid g;
    g.dim = d;
    g.K = K;
    g.c2 = c2;
    g.z_lo = std::move(z_lo);
    g.z_hi = std::move(z_hi);
    std::size_t n = 1;
    for (int k = 0; k < d; ++k) n *= g.z_hi[k] >= g.z_lo[k] ? static_cast<std::size_t>(g.z_hi[k] - g.z_lo[k] + 1) : 0;
    g.nice.assign(n, 0);
    g.good.assign(n, 0);
    g.evaluable.assign(n, 0);
    g.ref_vertex.assign(n, -1);
    g.counts.assign(n, 0);
    if (n == 0 || config.size() == 0) return g;
    const KdTree tree(config.coords.data(), config.size(), d);
    const Window wide = config.window;
    for (std::size_t i = 0; i < n; ++i) {
        const auto z = g.z_of(i);
        g.nice[i] = nice_box(config, tree, g, z, g.counts[i]) ? 1 : 0;
        bool ok = true;
        for (int k = 0; k < d; ++k) {
            const double c = K * static_cast<double>(z[k]);
            ok = ok && c - 1.5 * K >= wide.lo[k] && c + 1.5 * K <= wide.hi[k];
        }
        g.evaluable[i] = ok ? 1 : 0;
    }
    return g;
}

BoxGrid classify_nice(const PointConfig& config, double K, double c2) {
    if (!(K > 0.0)) throw ParameterError("K must be positive");
    std::vector<std::int64_t> lo(config.dim), hi(config.dim);
    for (int k = 0; k < config.dim; ++k) {
        lo[k] = static_cast<std::int64_t>(std::ceil((config.window.lo[k] + K / 2) / K));
        hi[k] = static_cast<std::int64_t>(std::floor((config.window.hi[k] - K / 2) / K));
    }
    return classify_nice(config, K, c2, lo, hi);
}

bool local_connectivity_event(const PointConfig& config, const KdTree& tree, const Graph& graph, const double* c,
                              double h) {
    const int d = config.dim;
    std::vector<std::uint32_t> inner, outer;
    box_points(tree, c, h, d, inner);
    if (inner.size() < 2) return true;
    box_points(tree, c, 2 * h, d, outer);
    std::vector<char> seen(outer.size(), 0);
    auto slot = [&](std::uint32_t v) -> std::int64_t {
        const auto it = std::lower_bound(outer.begin(), outer.end(), v);
        return (it != outer.end() && *it == v) ? it - outer.begin() : -1;
    };
    std::vector<std::uint32_t> stack{inner[0]};
    seen[slot(inner[0])] = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto w : graph.neighbors(v)) {
            const auto sw = slot(w);
            if (sw >= 0 && !seen[sw]) {
                seen[sw] = 1;
                stack.push_back(w);
            }
        }
    }
    for (auto v : inner)
        if (!seen[slot(v)]) return false;
    return true;
}

void classify_good(const PointConfig& config, BoxGrid& grid, const Graph& graph, int workers) {
    if (graph.n_vertices() != config.size()) throw ParameterError("graph and config sizes differ");
    if (graph.kind() == GraphKind::Creek) grid.n_param = graph.n_param();
    const int d = grid.dim;
    if (config.size() == 0) return;
    const KdTree tree(config.coords.data(), config.size(), d);
    const int m = segment_events(d);
    const double s = grid.sub_side();
    const double h = (1.0 + std::sqrt(static_cast<double>(d))) * s;
    parallel_for(grid.n_boxes(), workers, [&](std::size_t i) {
        grid.good[i] = 0;
        grid.ref_vertex[i] = -1;
        if (!grid.nice[i] || !grid.evaluable[i]) return;
        const auto z = grid.z_of(i);
        const auto base = centre_of(grid, z);
        for (int k = 0; k < d; ++k)
            for (int sign : {-1, 1})
                for (int j = 0; j < m; ++j) {
                    auto c = base;
                    c[k] += sign * j * s;
                    if (!local_connectivity_event(config, tree, graph, c.data(), h)) return;
                }
        grid.good[i] = 1;
        grid.ref_vertex[i] = nucleus_in_box(config, tree, grid, z);
    });
}

BoxGrid classify_good(const PointConfig& config, const BoxGrid& grid, int n) {
    if (n < 2) throw ParameterError("creek parameter n must be >= 2");
    BoxGrid out = grid;
    classify_good(config, out, creek_crossing(config, n));
    return out;
}

std::uint32_t reference_vertex(const PointConfig& config, const BoxGrid& grid, std::span<const std::int64_t> z) {
    if (!grid.is_good(z)) throw ParameterError("reference_vertex needs a good box");
    const auto v = static_cast<std::uint32_t>(grid.ref_vertex[grid.index(z)]);
    if (!grid.box(z).contains(config.point(v))) throw InvariantViolation("reference vertex outside its box");
    return v;
}

std::vector<std::uint32_t> connect_neighbors(const PointConfig& config, const BoxGrid& grid, const Graph& graph,
                                             std::span<const std::int64_t> z1, std::span<const std::int64_t> z2) {
    const KdTree tree(config.coords.data(), config.size(), config.dim);
    return connect_with_tree(config, tree, grid, graph, z1, z2);
}

SiteField::SiteField(std::vector<int> dims_, char value) : dims(std::move(dims_)) {
    validate();
    std::size_t n = 1;
    for (int e : dims) n *= static_cast<std::size_t>(e);
    open.assign(n, value);
}

void SiteField::validate() const {
    if (dims.size() < 2) throw ParameterError("site field needs at least 2 axes");
    for (int e : dims)
        if (e <= 0) throw ParameterError("site field extents must be positive");
}

std::size_t SiteField::index(std::span<const int> site) const {
    std::size_t idx = 0, stride = 1;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        idx += static_cast<std::size_t>(site[k]) * stride;
        stride *= static_cast<std::size_t>(dims[k]);
    }
    return idx;
}

std::vector<int> crossing_rectangle_dims(int dim, int N) {
    if (N < 1) throw ParameterError("N must be >= 1");
    std::vector<int> dims(dim, 2 * N - 1);
    dims[0] = 2 * N + 1;
    return dims;
}

namespace {

class UnitMaxFlow {
public:
    explicit UnitMaxFlow(std::size_t n) : adj_(n) {}

    void add_edge(std::uint32_t u, std::uint32_t v) {
        adj_[u].push_back(arcs_.size());
        arcs_.push_back({v, 1, true});
        adj_[v].push_back(arcs_.size());
        arcs_.push_back({u, 0, false});
    }

    std::size_t run(std::uint32_t s, std::uint32_t t) {
        std::size_t flow = 0;
        std::vector<std::int64_t> via(adj_.size());
        for (;;) {
            std::fill(via.begin(), via.end(), -1);
            std::deque<std::uint32_t> queue{s};
            via[s] = -2;
            while (!queue.empty() && via[t] == -1) {
                const auto u = queue.front();
                queue.pop_front();
                for (auto a : adj_[u]) {
                    const auto& arc = arcs_[a];
                    if (arc.cap > 0 && via[arc.to] == -1) {
                        via[arc.to] = static_cast<std::int64_t>(a);
                        queue.push_back(arc.to);
                    }
                }
            }
            if (via[t] == -1) return flow;
            for (auto v = t; v != s;) {
                const auto a = static_cast<std::size_t>(via[v]);
                arcs_[a].cap -= 1;
                arcs_[a ^ 1].cap += 1;
                v = arcs_[a ^ 1].to;
            }
            ++flow;
        }
    }

    /// Successor of u along saturated forward arcs, or -1.
    std::int64_t flow_next(std::uint32_t u) const {
        for (auto a : adj_[u])
            if (arcs_[a].forward && arcs_[a].cap == 0) return arcs_[a].to;
        return -1;
    }

private:
    struct Arc {
        std::uint32_t to;
        int cap;
        bool forward;
    };
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<Arc> arcs_;
};

}  // namespace

CrossingReport lr_crossings(const SiteField& field, int N) {
    field.validate();
    CrossingReport rep;
    rep.N = N;
    const int d = static_cast<int>(field.dims.size());
    const int W = field.dims[0], H = field.dims[1];
    std::size_t n_slices = 1;
    for (int k = 2; k < d; ++k) n_slices *= static_cast<std::size_t>(field.dims[k]);
    std::vector<int> site(d, 0);
    for (std::size_t sl = 0; sl < n_slices; ++sl) {
        std::size_t rem = sl;
        for (int k = 2; k < d; ++k) {
            site[k] = static_cast<int>(rem % static_cast<std::size_t>(field.dims[k]));
            rem /= static_cast<std::size_t>(field.dims[k]);
        }
        const auto cell = [&](int x, int y) { return static_cast<std::uint32_t>(y * W + x); };
        const std::uint32_t n_cells = static_cast<std::uint32_t>(W * H);
        const std::uint32_t S = 2 * n_cells, T = S + 1;
        auto in = [&](std::uint32_t c) { return 2 * c; };
        auto out = [&](std::uint32_t c) { return 2 * c + 1; };
        auto is_open = [&](int x, int y) {
            site[0] = x;
            site[1] = y;
            return field.open[field.index(site)] != 0;
        };
        UnitMaxFlow flow(2 * n_cells + 2);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                if (!is_open(x, y)) continue;
                const auto c = cell(x, y);
                flow.add_edge(in(c), out(c));
                if (x == 0) flow.add_edge(S, in(c));
                if (x == W - 1) {
                    flow.add_edge(out(c), T);
                    continue;  // a crossing ends at its first last-column site
                }
                const int nx[4] = {x + 1, x - 1, x, x};
                const int ny[4] = {y, y, y + 1, y - 1};
                for (int k = 0; k < 4; ++k) {
                    if (nx[k] < 1 || nx[k] >= W || ny[k] < 0 || ny[k] >= H) continue;  // no step into column 0
                    if (is_open(nx[k], ny[k])) flow.add_edge(out(c), in(cell(nx[k], ny[k])));
                }
            }
        const std::size_t count = flow.run(S, T);
        rep.per_slice_counts.push_back(count);
        rep.total += count;
        // Decompose the flow into crossings, starting from each saturated source arc.
        for (int y = 0; y < H; ++y) {
            if (!is_open(0, y)) continue;
            const auto c0 = cell(0, y);
            // The site carries flow iff its in->out arc is saturated.
            if (flow.flow_next(in(c0)) != static_cast<std::int64_t>(out(c0))) continue;
            std::vector<std::vector<int>> path;
            std::uint32_t c = c0;
            for (;;) {
                site[0] = static_cast<int>(c % static_cast<std::uint32_t>(W));
                site[1] = static_cast<int>(c / static_cast<std::uint32_t>(W));
                path.push_back(site);
                const auto next = flow.flow_next(out(c));
                if (next < 0) throw InvariantViolation("broken flow decomposition");
                if (static_cast<std::uint32_t>(next) == T) break;
                c = static_cast<std::uint32_t>(next) / 2;
            }
            rep.crossings.push_back(std::move(path));
        }
    }
    return rep;
}

std::size_t count_disjoint_lr_crossings(const SiteField& field, int N) { return lr_crossings(field, N).total; }

SiteField good_site_field(const BoxGrid& grid, int N) {
    SiteField field(crossing_rectangle_dims(grid.dim, N));
    std::vector<int> site(grid.dim);
    std::vector<std::int64_t> z(grid.dim);
    for (std::size_t i = 0; i < field.size(); ++i) {
        std::size_t rem = i;
        for (int k = 0; k < grid.dim; ++k) {
            site[k] = static_cast<int>(rem % static_cast<std::size_t>(field.dims[k]));
            rem /= static_cast<std::size_t>(field.dims[k]);
            z[k] = site[k] - (k == 0 ? N : N - 1);
        }
        if (!grid.in_range(z)) throw ParameterError("box grid does not cover the crossing rectangle");
        field.open[i] = grid.good[grid.index(z)];
    }
    return field;
}

std::vector<std::uint32_t> crossing_graph_path(const PointConfig& config, const BoxGrid& grid, const Graph& graph,
                                               const std::vector<std::vector<int>>& crossing, int N) {
    if (crossing.size() < 3) throw ParameterError("crossing must visit at least three sites");
    const int d = grid.dim;
    auto to_z = [&](const std::vector<int>& site) {
        std::vector<std::int64_t> z(d);
        for (int k = 0; k < d; ++k) z[k] = site[k] - (k == 0 ? N : N - 1);
        return z;
    };
    const KdTree tree(config.coords.data(), config.size(), d);
    std::vector<std::uint32_t> path;
    std::unordered_map<std::uint32_t, std::size_t> pos;
    const auto first = to_z(crossing[1]);
    append_loop_erased(path, pos, {reference_vertex(config, grid, first)});
    for (std::size_t i = 1; i + 2 < crossing.size(); ++i) {
        const auto hop = connect_with_tree(config, tree, grid, graph, to_z(crossing[i]), to_z(crossing[i + 1]));
        append_loop_erased(path, pos, std::vector<std::uint32_t>(hop.begin() + 1, hop.end()));
    }
    return path;
}

std::optional<std::vector<std::uint32_t>> to_network_path(const PeriodizedNetwork& net,
                                                          const std::vector<std::uint32_t>& graph_path) {
    std::unordered_map<std::uint32_t, std::uint32_t> local;
    for (std::uint32_t v = 0; v < net.point_index.size(); ++v) local[net.point_index[v]] = v;
    const double n = static_cast<double>(net.N);
    std::vector<std::int64_t> mapped(graph_path.size(), -1);
    for (std::size_t k = 0; k < graph_path.size(); ++k) {
        const auto it = local.find(graph_path[k]);
        if (it != local.end()) mapped[k] = it->second;
    }
    auto in_minus = [&](std::size_t k) { return mapped[k] >= 0 && net.x1[mapped[k]] <= -n + net.r_c; };
    auto in_plus = [&](std::size_t k) { return mapped[k] >= 0 && net.x1[mapped[k]] >= n - net.r_c; };
    std::int64_t a = -1;
    for (std::size_t k = 0; k < graph_path.size(); ++k)
        if (in_minus(k)) a = static_cast<std::int64_t>(k);
    if (a < 0) return std::nullopt;
    std::int64_t b = -1;
    for (auto k = static_cast<std::size_t>(a); k < graph_path.size(); ++k)
        if (in_plus(k)) {
            b = static_cast<std::int64_t>(k);
            break;
        }
    if (b < 0) return std::nullopt;
    std::vector<std::uint32_t> out{net.source_node()};
    for (auto k = a; k <= b; ++k) {
        if (mapped[k] < 0) return std::nullopt;
        out.push_back(static_cast<std::uint32_t>(mapped[k]));
    }
    out.push_back(net.sink_node());
    return out;
}

GoodDensity empirical_good_density(const ProcessSpec& spec, double K, int n, double c2, std::size_t n_samples,
                                   const Rng& rng, int dim, int workers, double threshold) {
    spec.validate();
    if (!(K > 0.0) || !(c2 > 0.0) || n_samples == 0) throw ParameterError("K, c2 and n_samples must be positive");
    if (n < 2) throw ParameterError("creek parameter n must be >= 2");
    std::vector<char> good(n_samples, 0), nice(n_samples, 0);
    const Window window = Window::cube(dim, 2.0 * K);
    const std::vector<std::int64_t> origin(dim, 0);
    parallel_for(n_samples, workers, [&](std::size_t i) {
        Rng r = rng.child(i);
        const PointConfig cfg = sample(spec, window, r);
        BoxGrid grid = classify_nice(cfg, K, c2, origin, origin);
        nice[i] = grid.nice[0];
        if (!grid.nice[0]) return;
        classify_good(cfg, grid, creek_crossing(cfg, n));
        good[i] = grid.good[0];
    });
    GoodDensity out;
    out.threshold = threshold;
    out.c2 = c2;
    double g = 0.0, ni = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        g += good[i];
        ni += nice[i];
    }
    const double N = static_cast<double>(n_samples);
    out.p_hat = g / N;
    out.nice_fraction = ni / N;
    out.se = std::sqrt(out.p_hat * (1.0 - out.p_hat) / N);
    out.above_threshold = out.p_hat > threshold;
    return out;
}

}  // namespace geowalk
