#include "geowalk/resistor_network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "geowalk/error.hpp"
#include "geowalk/parallel.hpp"
#include "geowalk/simd/kernels.hpp"
#include "geowalk/stats.hpp"

namespace geowalk {

void ResistorNetwork::validate() const {
    if (source.empty() || sink.empty()) throw ParameterError("source and sink sets must be nonempty");
    std::vector<char> role(n_nodes, 0);
    for (auto s : source) {
        if (s >= n_nodes) throw ParameterError("source node out of range");
        role[s] = 1;
    }
    for (auto t : sink) {
        if (t >= n_nodes) throw ParameterError("sink node out of range");
        if (role[t] == 1) throw ParameterError("source and sink sets overlap at node " + std::to_string(t));
    }
    for (const auto& e : edges) {
        if (e.i >= n_nodes || e.j >= n_nodes) throw ParameterError("edge endpoint out of range");
        if (e.i == e.j) throw ParameterError("self-loop in network");
        if (!(e.c > 0.0) || !std::isfinite(e.c)) throw ParameterError("conductances must be positive and finite");
    }
}

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

}  // namespace

double dirichlet_energy(const ResistorNetwork& net, const std::vector<double>& g) {
    double e = 0.0;
    for (const auto& ed : net.edges) {
        const double d = g[ed.j] - g[ed.i];
        e += ed.c * d * d;
    }
    return e;
}

ConductanceResult effective_conductance(const ResistorNetwork& net, double tol) {
    net.validate();
    const std::size_t n = net.n_nodes;
    ConductanceResult res;
    res.potential.assign(n, 0.0);

    // 0 free, 1 source, 2 sink
    std::vector<char> role(n, 0);
    for (auto s : net.source) role[s] = 1;
    for (auto t : net.sink) role[t] = 2;

    UnionFind uf(n);
    for (const auto& e : net.edges) uf.unite(e.i, e.j);
    std::vector<char> has_src(n, 0), has_snk(n, 0);
    for (auto s : net.source) has_src[uf.find(s)] = 1;
    for (auto t : net.sink) has_snk[uf.find(t)] = 1;

    // Free nodes in components touching only the sink sit at potential 1;
    // components touching neither carry no current and stay at 0.
    std::vector<std::int64_t> unknown(n, -1);
    std::size_t m = 0;
    bool any_both = false;
    for (std::uint32_t v = 0; v < n; ++v) {
        const auto r = uf.find(v);
        const bool both = has_src[r] && has_snk[r];
        any_both = any_both || (both && role[v] != 0);
        if (role[v] == 2) res.potential[v] = 1.0;
        else if (role[v] == 0 && both) unknown[v] = static_cast<std::int64_t>(m++);
        else if (role[v] == 0 && has_snk[r]) res.potential[v] = 1.0;
    }
    if (!any_both) {
        res.disconnected = true;
        return res;
    }

    // Reduced Laplacian over the unknowns, CSR with the diagonal included.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(m);
    std::vector<double> diag(m, 0.0), b(m, 0.0);
    for (const auto& e : net.edges) {
        const auto ui = unknown[e.i], uj = unknown[e.j];
        if (ui >= 0) {
            diag[ui] += e.c;
            if (uj >= 0) rows[ui].push_back({static_cast<std::uint32_t>(uj), -e.c});
            else b[ui] += e.c * res.potential[e.j];
        }
        if (uj >= 0) {
            diag[uj] += e.c;
            if (ui >= 0) rows[uj].push_back({static_cast<std::uint32_t>(ui), -e.c});
            else b[uj] += e.c * res.potential[e.i];
        }
    }
    std::vector<std::uint32_t> row_ptr(m + 1, 0), cols;
    std::vector<double> vals;
    for (std::size_t r = 0; r < m; ++r) {
        auto& row = rows[r];
        row.push_back({static_cast<std::uint32_t>(r), diag[r]});
        std::sort(row.begin(), row.end());
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (!cols.empty() && cols.size() > row_ptr[r] && cols.back() == row[k].first) {
                vals.back() += row[k].second;
            } else {
                cols.push_back(row[k].first);
                vals.push_back(row[k].second);
            }
        }
        row_ptr[r + 1] = static_cast<std::uint32_t>(cols.size());
        std::vector<std::pair<std::uint32_t, double>>().swap(row);
    }

    const auto& K = simd::active_kernels();
    std::vector<double> x(m, 0.0), r = b, z(m), p(m), q(m);
    const double bnorm = std::sqrt(K.dot(b.data(), b.data(), m));
    if (m > 0 && bnorm > 0.0) {
        for (std::size_t i = 0; i < m; ++i) z[i] = r[i] / diag[i];
        p = z;
        double rz = K.dot(r.data(), z.data(), m);
        const std::size_t max_iter = std::max<std::size_t>(10 * m, 10);
        res.converged = false;
        for (std::size_t it = 0; it < max_iter; ++it) {
            K.csr_matvec(row_ptr.data(), cols.data(), vals.data(), p.data(), q.data(), m);
            const double pq = K.dot(p.data(), q.data(), m);
            if (!(pq > 0.0)) break;
            const double alpha = rz / pq;
            K.axpy(alpha, p.data(), x.data(), m);
            K.axpy(-alpha, q.data(), r.data(), m);
            res.iterations = it + 1;
            if (std::sqrt(K.dot(r.data(), r.data(), m)) <= tol * bnorm) {
                res.converged = true;
                break;
            }
            for (std::size_t i = 0; i < m; ++i) z[i] = r[i] / diag[i];
            const double rz_new = K.dot(r.data(), z.data(), m);
            K.xpby(z.data(), rz_new / rz, p.data(), m);
            rz = rz_new;
        }
        // True residual of the final iterate.
        K.csr_matvec(row_ptr.data(), cols.data(), vals.data(), x.data(), q.data(), m);
        for (std::size_t i = 0; i < m; ++i) q[i] = b[i] - q[i];
        res.residual = std::sqrt(K.dot(q.data(), q.data(), m)) / bnorm;
    }
    for (std::uint32_t v = 0; v < n; ++v)
        if (unknown[v] >= 0) res.potential[v] = x[unknown[v]];

    res.kappa = dirichlet_energy(net, res.potential);
    for (const auto& e : net.edges) {
        const double flow = e.c * (res.potential[e.j] - res.potential[e.i]);  // i -> j
        if (role[e.i] == 1 && role[e.j] != 1) res.source_current += flow;
        if (role[e.j] == 1 && role[e.i] != 1) res.source_current -= flow;
        if (role[e.j] == 2 && role[e.i] != 2) res.sink_current += flow;
        if (role[e.i] == 2 && role[e.j] != 2) res.sink_current -= flow;
    }
    return res;
}

std::optional<double> series_parallel_oracle(const ResistorNetwork& net) {
    net.validate();
    const std::size_t n = net.n_nodes;
    // Merge each electrode set into one terminal.
    std::vector<std::uint32_t> id(n);
    std::iota(id.begin(), id.end(), 0u);
    const std::uint32_t S = net.source.front(), T = net.sink.front();
    for (auto s : net.source) id[s] = S;
    for (auto t : net.sink) id[t] = T;

    std::vector<std::map<std::uint32_t, double>> adj(n);
    for (const auto& e : net.edges) {
        const auto a = id[e.i], b = id[e.j];
        if (a == b) continue;
        adj[a][b] += e.c;
        adj[b][a] += e.c;
    }
    // Only the component of S matters.
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> stack{S};
    seen[S] = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (const auto& [w, c] : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
    }
    if (!seen[T]) return 0.0;
    for (std::uint32_t v = 0; v < n; ++v)
        if (!seen[v]) adj[v].clear();

    std::vector<std::uint32_t> work;
    for (std::uint32_t v = 0; v < n; ++v)
        if (seen[v] && v != S && v != T) work.push_back(v);
    while (!work.empty()) {
        const auto v = work.back();
        work.pop_back();
        if (v == S || v == T) continue;
        auto& nb = adj[v];
        if (nb.size() == 1) {
            const auto w = nb.begin()->first;
            adj[w].erase(v);
            nb.clear();
            work.push_back(w);
        } else if (nb.size() == 2) {
            auto it = nb.begin();
            const auto [a, ca] = *it++;
            const auto [b, cb] = *it;
            const double c = ca * cb / (ca + cb);
            adj[a].erase(v);
            adj[b].erase(v);
            nb.clear();
            adj[a][b] += c;
            adj[b][a] += c;
            work.push_back(a);
            work.push_back(b);
        }
    }
    for (std::uint32_t v = 0; v < n; ++v)
        if (v != S && v != T && !adj[v].empty()) return std::nullopt;
    const auto it = adj[S].find(T);
    return it == adj[S].end() ? 0.0 : it->second;
}

double PeriodizedNetwork::d1(std::uint32_t a, std::uint32_t b) const {
    const auto m = static_cast<std::uint32_t>(n_interior());
    const double n = static_cast<double>(N);
    auto from_electrode = [&](std::uint32_t e, std::uint32_t y) { return e == m ? x1[y] + n : x1[y] - n; };
    if (a < m && b < m) return x1[b] - x1[a];
    if (a >= m && b < m) return from_electrode(a, b);
    if (a < m && b >= m) return -from_electrode(b, a);
    throw ParameterError("no edge joins the two electrodes");
}

ResistorNetwork PeriodizedNetwork::to_full_network() const {
    ResistorNetwork full;
    const auto m = static_cast<std::uint32_t>(n_interior());
    const auto g = static_cast<std::uint32_t>(n_gamma);
    full.n_nodes = m + 2 * static_cast<std::size_t>(g);
    for (const auto& e : base.edges)
        if (e.i < m && e.j < m) full.edges.push_back(e);
    const double c = 1.0 / static_cast<double>(g);
    for (std::uint32_t k = 0; k < g; ++k) {
        full.source.push_back(m + k);
        full.sink.push_back(m + g + k);
        for (auto y : slab_minus) full.edges.push_back({y, m + k, c});
        for (auto y : slab_plus) full.edges.push_back({y, m + g + k, c});
    }
    return full;
}

PeriodizedNetwork build_periodized(const PointConfig& config, const Graph& graph, int N, double r_c) {
    if (N < 1) throw ParameterError("N must be a positive integer");
    if (!(r_c > 0.0)) throw ParameterError("r_c must be positive");
    if (!(static_cast<double>(N) > 2.0 * r_c)) throw ParameterError("N must exceed 2 r_c so the slabs are disjoint");
    if (graph.n_vertices() != config.size()) throw ParameterError("graph and config sizes differ");
    const int d = config.dim;
    if (config.window.dim() != d) throw ParameterError("config window dimension mismatch");
    for (int k = 0; k < d; ++k)
        if (config.window.lo[k] > -N || config.window.hi[k] < N)
            throw ParameterError("config window must cover [-N, N]^d");

    PeriodizedNetwork net;
    net.dim = d;
    net.N = N;
    net.r_c = r_c;
    net.n_gamma = 1;
    for (int k = 1; k < d; ++k) net.n_gamma *= static_cast<std::size_t>(2 * N - 1);

    const double n = static_cast<double>(N);
    std::vector<std::int64_t> local(config.size(), -1);
    for (std::size_t i = 0; i < config.size(); ++i) {
        const double* x = config.point(i);
        bool inside = true;
        for (int k = 0; k < d; ++k) inside = inside && x[k] > -n && x[k] < n;
        if (!inside) continue;
        local[i] = static_cast<std::int64_t>(net.point_index.size());
        net.point_index.push_back(static_cast<std::uint32_t>(i));
        net.x1.push_back(x[0]);
    }
    const auto m = static_cast<std::uint32_t>(net.point_index.size());
    net.base.n_nodes = m + 2;
    net.base.source = {m};
    net.base.sink = {m + 1};
    const double rc2 = r_c * r_c;
    for (const auto& [a, b] : graph.edges()) {
        if (local[a] < 0 || local[b] < 0) continue;
        if (squared_distance(config.point(a), config.point(b), d) > rc2) continue;
        net.base.edges.push_back({static_cast<std::uint32_t>(local[a]), static_cast<std::uint32_t>(local[b]), 1.0});
    }
    net.n_interior_edges = net.base.edges.size();
    for (std::uint32_t v = 0; v < m; ++v) {
        if (net.x1[v] <= -n + r_c) {
            net.slab_minus.push_back(v);
            net.base.edges.push_back({v, m, 1.0});
        } else if (net.x1[v] >= n - r_c) {
            net.slab_plus.push_back(v);
            net.base.edges.push_back({v, m + 1, 1.0});
        }
    }
    net.empty_slab = net.slab_minus.empty() || net.slab_plus.empty();
    return net;
}

PeriodizedNetwork build_periodized(const PointConfig& config, GraphKind kind, int N, double r_c, int n_param) {
    return build_periodized(config, build_graph(config, kind, n_param), N, r_c);
}

double diffusion_from_conductance(const PeriodizedNetwork& net, double kappa) {
    if (kappa < 0.0) throw ParameterError("kappa must be nonnegative");
    const double n = static_cast<double>(net.N);
    return 8.0 * n * n * kappa / static_cast<double>(net.n_identified_nodes());
}

Estimate msd_on_network(const PeriodizedNetwork& net, double t, std::size_t n_samples, const Rng& rng, int workers) {
    if (!(t > 0.0)) throw ParameterError("t must be positive");
    if (n_samples == 0) throw ParameterError("n_samples must be >= 1");
    const auto m = static_cast<std::uint32_t>(net.n_interior());
    const std::uint32_t E = m;  // all identified electrodes lumped into one state

    // Adjacency over interior nodes plus the electrode state, with winding increments.
    std::vector<std::uint32_t> offsets(m + 2, 0);
    for (const auto& e : net.base.edges) {
        ++offsets[std::min(e.i, E) + 1];
        ++offsets[std::min(e.j, E) + 1];
    }
    for (std::uint32_t v = 0; v <= m; ++v) offsets[v + 1] += offsets[v];
    std::vector<std::uint32_t> nbr(offsets.back());
    std::vector<double> inc(offsets.back());
    {
        auto fill = offsets;
        for (const auto& e : net.base.edges) {
            const auto a = std::min(e.i, E), b = std::min(e.j, E);
            nbr[fill[a]] = b;
            inc[fill[a]++] = net.d1(e.i, e.j);
            nbr[fill[b]] = a;
            inc[fill[b]++] = net.d1(e.j, e.i);
        }
    }
    const std::size_t n_slab = net.slab_minus.size() + net.slab_plus.size();
    const double electrode_rate = static_cast<double>(n_slab) / static_cast<double>(net.n_gamma);
    const std::uint64_t n_states = net.n_identified_nodes();

    std::vector<double> sq(n_samples);
    parallel_for(n_samples, workers, [&](std::size_t s) {
        Rng r = rng.child(s);
        const std::uint64_t pick = r.below(n_states);
        std::uint32_t v = pick >= m ? E : static_cast<std::uint32_t>(pick);
        double time = 0.0, x = 0.0;
        for (;;) {
            const std::uint32_t deg = offsets[v + 1] - offsets[v];
            if (deg == 0) break;
            const double rate = v == E ? electrode_rate : static_cast<double>(deg);
            time += r.exponential(rate);
            if (time > t) break;
            const std::uint32_t k = offsets[v] + static_cast<std::uint32_t>(r.below(deg));
            x += inc[k];
            v = nbr[k];
        }
        sq[s] = x * x;
    });
    const double mean = stats::mean(sq);
    const double se = std::sqrt(stats::variance(sq) / static_cast<double>(n_samples));
    return {mean / t, se / t};
}

double crossing_lower_bound(const PeriodizedNetwork& net, const std::vector<std::vector<std::uint32_t>>& paths,
                            std::optional<double> kappa) {
    const auto src = net.source_node(), snk = net.sink_node();
    std::map<std::pair<std::uint32_t, std::uint32_t>, char> edge_set;
    for (const auto& e : net.base.edges) edge_set[{std::min(e.i, e.j), std::max(e.i, e.j)}] = 1;
    std::vector<char> used(net.base.n_nodes, 0);
    double bound = 0.0;
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto& path = paths[p];
        if (path.size() < 2 || path.front() != src || path.back() != snk)
            throw ParameterError("path " + std::to_string(p) + " must run from the source to the sink electrode");
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            const auto a = path[k], b = path[k + 1];
            if (!edge_set.count({std::min(a, b), std::max(a, b)}))
                throw ParameterError("path " + std::to_string(p) + " uses a non-edge");
        }
        for (std::size_t k = 1; k + 1 < path.size(); ++k) {
            if (used[path[k]]) throw ParameterError("paths are not vertex-disjoint at node " + std::to_string(path[k]));
            used[path[k]] = 1;
        }
        bound += 1.0 / static_cast<double>(path.size() - 1);
    }
    const double k = kappa ? *kappa : effective_conductance(net.base).kappa;
    if (bound > k + 1e-8)
        throw InvariantViolation("crossing lower bound " + std::to_string(bound) + " exceeds conductance " +
                                 std::to_string(k));
    return bound;
}

}  // namespace geowalk
