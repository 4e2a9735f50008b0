#include "geowalk/random_walk.hpp"

#include <algorithm>

#include "geowalk/error.hpp"

namespace geowalk {

WalkPath simulate_vsrw(const Graph& graph, const PointConfig& config, std::uint32_t start, double t_max, Rng& rng,
                       const Window* inner) {
    if (start >= graph.n_vertices()) throw ParameterError("start vertex out of range");
    if (graph.degree(start) == 0) throw ParameterError("walk undefined from an isolated vertex");
    if (!(t_max > 0.0)) throw ParameterError("t_max must be > 0");
    WalkPath path;
    path.start = start;
    path.t_end = t_max;
    path.jumps.push_back({0.0, start});
    std::uint32_t v = start;
    double t = 0.0;
    for (;;) {
        const auto nb = graph.neighbors(v);
        t += rng.exponential(static_cast<double>(nb.size()));
        if (t > t_max) break;
        v = nb[rng.below(nb.size())];
        path.jumps.push_back({t, v});
        if (inner != nullptr && !inner->contains(config.point(v))) {
            path.truncated = true;
            path.exit_time = t;
            path.t_end = t;
            break;
        }
    }
    return path;
}

std::vector<std::uint32_t> jump_chain(const Graph& graph, std::uint32_t start, std::size_t n_steps, Rng& rng) {
    if (start >= graph.n_vertices()) throw ParameterError("start vertex out of range");
    if (graph.degree(start) == 0) throw ParameterError("jump chain undefined from an isolated vertex");
    std::vector<std::uint32_t> seq;
    seq.reserve(n_steps + 1);
    seq.push_back(start);
    std::uint32_t v = start;
    for (std::size_t s = 0; s < n_steps; ++s) {
        const auto nb = graph.neighbors(v);
        v = nb[rng.below(nb.size())];
        seq.push_back(v);
    }
    return seq;
}

std::size_t jump_index_at(const WalkPath& path, double t) {
    if (!(t >= 0.0) || t > path.t_end) throw ParameterError("time outside [0, t_end]");
    const auto it = std::upper_bound(path.jumps.begin(), path.jumps.end(), t,
                                     [](double value, const Jump& j) { return value < j.time; });
    return static_cast<std::size_t>(it - path.jumps.begin()) - 1;
}

std::vector<double> position_at(const WalkPath& path, const PointConfig& config, double t) {
    const std::uint32_t v = path.jumps[jump_index_at(path, t)].vertex;
    return {config.point(v), config.point(v) + config.dim};
}

std::vector<double> displacement_sum(const WalkPath& path, const PointConfig& config, double t) {
    const std::size_t last = jump_index_at(path, t);
    std::vector<double> acc(config.dim, 0.0);
    for (std::size_t r = 1; r <= last; ++r) {
        const double* a = config.point(path.jumps[r - 1].vertex);
        const double* b = config.point(path.jumps[r].vertex);
        for (int k = 0; k < config.dim; ++k) acc[k] += b[k] - a[k];
    }
    return acc;
}

}  // namespace geowalk
