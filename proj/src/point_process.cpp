#include "geowalk/point_process.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geowalk/error.hpp"
#include "geowalk/kdtree.hpp"
#include "geowalk/parallel.hpp"
#include "geowalk/predicates.hpp"

namespace geowalk {

std::string to_string(ProcessKind kind) {
    switch (kind) {
        case ProcessKind::PPP: return "ppp";
        case ProcessKind::MCP: return "mcp";
        case ProcessKind::MHP1: return "mhp1";
        case ProcessKind::MHP2: return "mhp2";
    }
    return "?";
}

ProcessKind parse_process_kind(const std::string& name) {
    if (name == "ppp") return ProcessKind::PPP;
    if (name == "mcp") return ProcessKind::MCP;
    if (name == "mhp1") return ProcessKind::MHP1;
    if (name == "mhp2") return ProcessKind::MHP2;
    throw ParameterError("unknown process kind '" + name + "'");
}

void ProcessSpec::validate() const {
    if (!(lambda > 0.0)) throw ParameterError("lambda must be > 0");
    if (kind == ProcessKind::MCP && !(mu > 0.0)) throw ParameterError("MCP needs mu > 0");
    if (kind != ProcessKind::PPP && !(R > 0.0)) throw ParameterError("MCP/MHP need R > 0");
}

double ProcessSpec::intensity(int dim) const {
    const double v = kind == ProcessKind::PPP ? 0.0 : ball_volume(dim, R);
    switch (kind) {
        case ProcessKind::PPP: return lambda;
        case ProcessKind::MCP: return lambda * mu * v;
        case ProcessKind::MHP1: return lambda * std::exp(-lambda * v);
        case ProcessKind::MHP2: return -std::expm1(-lambda * v) / v;
    }
    return 0.0;
}

namespace {

void uniform_in_box(const Window& w, Rng& rng, double* x) {
    for (int k = 0; k < w.dim(); ++k) x[k] = rng.uniform(w.lo[k], w.hi[k]);
}

void uniform_in_ball(const double* centre, double R, int dim, Rng& rng, double* x) {
    double norm2 = 0.0;
    for (int k = 0; k < dim; ++k) {
        x[k] = rng.normal();
        norm2 += x[k] * x[k];
    }
    const double radius = R * std::pow(rng.uniform_open(), 1.0 / dim) / std::sqrt(norm2);
    for (int k = 0; k < dim; ++k) x[k] = centre[k] + radius * x[k];
}

// Redraw exact duplicates until the configuration is simple.
template <class Redraw>
void make_simple(PointConfig& config, Redraw&& redraw) {
    for (;;) {
        const auto dup = duplicate_points(config);
        if (dup.empty()) return;
        for (auto i : dup) redraw(i, config.point(i));
    }
}

PointConfig empty_config(const Window& window) {
    PointConfig c;
    c.window = window;
    c.dim = window.dim();
    return c;
}

PointConfig ppp_on(double lambda, const Window& w, Rng& rng) {
    PointConfig c = empty_config(w);
    const auto n = static_cast<std::size_t>(rng.poisson(lambda * w.volume()));
    c.coords.resize(n * static_cast<std::size_t>(c.dim));
    for (std::size_t i = 0; i < n; ++i) uniform_in_box(w, rng, c.point(i));
    make_simple(c, [&](std::size_t, double* x) { uniform_in_box(w, rng, x); });
    return c;
}

PointConfig keep_inside(const PointConfig& base, const std::vector<char>& keep, const Window& window) {
    PointConfig out = empty_config(window);
    for (std::size_t i = 0; i < base.size(); ++i)
        if (keep[i] && window.contains(base.point(i))) out.push_back(base.point(i));
    return out;
}

}  // namespace

PointConfig sample_ppp(double lambda, const Window& window, Rng& rng) {
    if (lambda < 0.0) throw ParameterError("lambda must be >= 0");
    window.validate();
    PointConfig c = ppp_on(lambda, window, rng);
    c.seed = rng.seed();
    return c;
}

PointConfig mcp_daughters(const std::vector<double>& parents, double mu, double R, const Window& window, Rng& rng) {
    const int d = window.dim();
    const std::size_t n_parents = parents.size() / static_cast<std::size_t>(d);
    const double mean = mu * ball_volume(d, R);
    PointConfig all = empty_config(window);
    std::vector<std::size_t> parent_of;
    std::vector<double> x(d);
    for (std::size_t p = 0; p < n_parents; ++p) {
        const auto m = rng.poisson(mean);
        for (std::int64_t j = 0; j < m; ++j) {
            uniform_in_ball(&parents[p * d], R, d, rng, x.data());
            all.push_back(x.data());
            parent_of.push_back(p);
        }
    }
    make_simple(all, [&](std::size_t i, double* y) { uniform_in_ball(&parents[parent_of[i] * d], R, d, rng, y); });
    PointConfig out = keep_inside(all, std::vector<char>(all.size(), 1), window);
    out.window.margin = R;
    return out;
}

PointConfig sample_mcp(double lambda, double mu, double R, const Window& window, Rng& rng) {
    ProcessSpec{ProcessKind::MCP, lambda, mu, R}.validate();
    window.validate();
    const PointConfig parents = ppp_on(lambda, window.dilated(R), rng);
    PointConfig out = mcp_daughters(parents.coords, mu, R, window, rng);
    out.seed = rng.seed();
    return out;
}

std::vector<char> mhp1_keep(const std::vector<double>& base, int dim, double R) {
    const std::size_t n = base.size() / static_cast<std::size_t>(dim);
    std::vector<char> keep(n, 1);
    const KdTree tree(base.data(), n, dim);
    std::vector<std::uint32_t> near;
    const double r2 = R * R;
    for (std::size_t i = 0; i < n; ++i) {
        near.clear();
        tree.radius_query(&base[i * dim], r2 * (1.0 + 1e-9), near);
        for (auto j : near)
            if (j != i && predicates::compare_sq_dist_value(&base[i * dim], &base[j * dim], r2, dim) <= 0) {
                keep[i] = 0;
                break;
            }
    }
    return keep;
}

std::vector<char> mhp2_keep(const std::vector<double>& base, const std::vector<double>& marks, int dim, double R) {
    const std::size_t n = base.size() / static_cast<std::size_t>(dim);
    if (marks.size() != n) throw ParameterError("one mark per base point required");
    std::vector<char> keep(n, 1);
    const KdTree tree(base.data(), n, dim);
    std::vector<std::uint32_t> near;
    const double r2 = R * R;
    for (std::size_t i = 0; i < n; ++i) {
        near.clear();
        tree.radius_query(&base[i * dim], r2 * (1.0 + 1e-9), near);
        for (auto j : near)
            if (j != i && !(marks[i] < marks[j]) &&
                predicates::compare_sq_dist_value(&base[i * dim], &base[j * dim], r2, dim) <= 0) {
                keep[i] = 0;
                break;
            }
    }
    return keep;
}

PointConfig sample_mhp1(double lambda, double R, const Window& window, Rng& rng) {
    ProcessSpec{ProcessKind::MHP1, lambda, 0.0, R}.validate();
    window.validate();
    const PointConfig base = ppp_on(lambda, window.dilated(R), rng);
    PointConfig out = keep_inside(base, mhp1_keep(base.coords, base.dim, R), window);
    out.window.margin = R;
    out.seed = rng.seed();
    return out;
}

PointConfig sample_mhp2(double lambda, double R, const Window& window, Rng& rng) {
    ProcessSpec{ProcessKind::MHP2, lambda, 0.0, R}.validate();
    window.validate();
    const PointConfig base = ppp_on(lambda, window.dilated(R), rng);
    std::vector<double> marks(base.size());
    for (auto& m : marks) m = rng.uniform_open();
    PointConfig out = keep_inside(base, mhp2_keep(base.coords, marks, base.dim, R), window);
    out.window.margin = R;
    out.seed = rng.seed();
    return out;
}

PointConfig sample(const ProcessSpec& spec, const Window& window, Rng& rng) {
    switch (spec.kind) {
        case ProcessKind::PPP: spec.validate(); return sample_ppp(spec.lambda, window, rng);
        case ProcessKind::MCP: return sample_mcp(spec.lambda, spec.mu, spec.R, window, rng);
        case ProcessKind::MHP1: return sample_mhp1(spec.lambda, spec.R, window, rng);
        case ProcessKind::MHP2: return sample_mhp2(spec.lambda, spec.R, window, rng);
    }
    throw ParameterError("unknown process kind");
}

PointConfig palm_version(const ProcessSpec& spec, const Window& window, Rng& rng, int max_retries) {
    spec.validate();
    window.validate();
    if (!window.contains_origin()) throw ParameterError("Palm window must contain the origin");
    const int d = window.dim();
    const std::vector<double> origin(d, 0.0);

    if (spec.kind == ProcessKind::PPP) {
        PointConfig base = sample_ppp(spec.lambda, window, rng);
        PointConfig out = empty_config(window);
        out.push_back(origin.data());
        for (std::size_t i = 0; i < base.size(); ++i)
            if (squared_distance(base.point(i), origin.data(), d) != 0.0) out.push_back(base.point(i));
        out.palm = true;
        out.seed = rng.seed();
        return out;
    }

    std::vector<double> a(d);
    for (int k = 0; k < d; ++k) a[k] = std::max(std::fabs(window.lo[k]), std::fabs(window.hi[k]));
    std::vector<double> lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
        lo[k] = -2.0 * a[k];
        hi[k] = 2.0 * a[k];
    }
    const Window enlarged(lo, hi);
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        const PointConfig big = sample(spec, enlarged, rng);
        std::vector<std::size_t> central;
        for (std::size_t i = 0; i < big.size(); ++i) {
            bool in = true;
            for (int k = 0; k < d && in; ++k) in = std::fabs(big.coord(i, k)) <= a[k];
            if (in) central.push_back(i);
        }
        if (central.empty()) continue;
        const std::size_t pick = central[rng.below(central.size())];
        std::vector<double> shift(big.point(pick), big.point(pick) + d);
        PointConfig out = empty_config(window);
        out.window.margin = spec.interaction_range();
        out.push_back(origin.data());
        std::vector<double> y(d);
        for (std::size_t i = 0; i < big.size(); ++i) {
            if (i == pick) continue;
            for (int k = 0; k < d; ++k) y[k] = big.coord(i, k) - shift[k];
            if (window.contains(y.data())) out.push_back(y.data());
        }
        out.palm = true;
        out.seed = rng.seed();
        return out;
    }
    throw DegenerateInputError("Palm selection region stayed empty after " + std::to_string(max_retries) +
                               " retries");
}

namespace {

template <class Pred>
Estimate replica_fraction(std::size_t n_samples, Rng& rng, int workers, Pred&& hit) {
    if (n_samples == 0) throw ParameterError("n_samples must be >= 1");
    std::vector<char> hits(n_samples, 0);
    parallel_for(n_samples, workers, [&](std::size_t i) {
        Rng r = rng.child(i);
        hits[i] = hit(r) ? 1 : 0;
    });
    double count = 0.0;
    for (char h : hits) count += h;
    const double n = static_cast<double>(n_samples);
    const double p = count / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace

Estimate estimate_void_probability(const ProcessSpec& spec, double L, int dim, std::size_t n_samples, Rng& rng,
                                   int workers) {
    spec.validate();
    if (!(L > 0.0)) throw ParameterError("L must be > 0");
    const Window cube = Window::cube(dim, 0.5 * L);
    return replica_fraction(n_samples, rng, workers, [&](Rng& r) { return sample(spec, cube, r).size() == 0; });
}

Estimate estimate_deviation_probability(const ProcessSpec& spec, double L, int dim, double c2,
                                        std::size_t n_samples, Rng& rng, int workers) {
    spec.validate();
    if (!(L > 0.0)) throw ParameterError("L must be > 0");
    if (!(c2 > 0.0)) throw ParameterError("c2 must be > 0");
    const Window cube = Window::cube(dim, 0.5 * L);
    const double threshold = c2 * std::pow(L, dim);
    return replica_fraction(n_samples, rng, workers,
                            [&](Rng& r) { return static_cast<double>(sample(spec, cube, r).size()) >= threshold; });
}

double ball_intersection_volume(int dim, double R, double dist) {
    if (dist >= 2.0 * R) return 0.0;
    if (dist <= 0.0) return ball_volume(dim, R);
    if (dim == 1) return 2.0 * R - dist;
    if (dim == 2) {
        const double h = 0.5 * dist;
        return 2.0 * R * R * std::acos(h / R) - 2.0 * h * std::sqrt(R * R - h * h);
    }
    // Two caps of height R - dist/2; cap volume via the regularized incomplete beta function.
    const double x = 1.0 - (dist / (2.0 * R)) * (dist / (2.0 * R));
    return ball_volume(dim, R) * boost::math::ibeta(0.5 * (dim + 1), 0.5, x);
}

double mcp_second_moment_density(const double* x1, const double* x2, int dim, const ProcessSpec& spec) {
    if (spec.kind != ProcessKind::MCP) throw ParameterError("second moment density is defined for MCP only");
    spec.validate();
    const double v = ball_volume(dim, spec.R);
    const double dist = std::sqrt(squared_distance(x1, x2, dim));
    return spec.mu * spec.mu * (spec.lambda * spec.lambda * v * v + spec.lambda * ball_intersection_volume(dim, spec.R, dist));
}

}  // namespace geowalk
