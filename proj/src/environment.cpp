#include "geowalk/environment.hpp"

#include <algorithm>
#include <cmath>

#include "geowalk/error.hpp"
#include "geowalk/kdtree.hpp"

namespace geowalk {

namespace {

constexpr std::uint64_t kTileLabel = 0x54494C45ULL;
constexpr std::uint64_t kPalmLabel = 0x50414C4DULL;

std::uint64_t zigzag(std::int64_t v) { return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63); }

}  // namespace

GrowingEnvironment::GrowingEnvironment(const ProcessSpec& spec, GraphKind kind, int n_param, std::uint64_t seed,
                                       const EnvironmentOptions& options)
    : spec_(spec), kind_(kind), n_param_(n_param), seed_(seed), opt_(options) {
    spec_.validate();
    if (kind != GraphKind::Delaunay && kind != GraphKind::Gabriel && kind != GraphKind::Creek)
        throw ParameterError("growing environment supports delaunay, gabriel and creek graphs");
    if (kind == GraphKind::Creek && n_param < 2) throw ParameterError("creek-crossing parameter n must be >= 2");
    if (!(opt_.initial_half_width > 0.0) || !(opt_.growth > 1.0)) throw ParameterError("invalid environment options");
    tile_ = opt_.tile_side > 0.0 ? opt_.tile_side : 8.0 / std::sqrt(spec_.lambda);
    tile_ = std::max(tile_, spec_.interaction_range());
    const auto m0 = static_cast<std::int64_t>(std::ceil(opt_.initial_half_width / tile_));

    if (spec_.kind == ProcessKind::PPP) {
        coords_ = {0.0, 0.0};
    } else {
        // Typical point: uniform among the points of the central region [-A, A]^2.
        const double a = 0.5 * opt_.initial_half_width;
        const auto ma = static_cast<std::int64_t>(std::ceil(a / tile_));
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt > 100) throw DegenerateInputError("Palm selection region stayed empty");
            if (attempt > 0) {
                seed_ = derive_seed(seed, {kPalmLabel, attempt});
                base_.clear();
                daughters_.clear();
            }
            std::vector<double> central;
            for (std::int64_t i = -ma; i < ma; ++i)
                for (std::int64_t j = -ma; j < ma; ++j) {
                    const auto pts = final_tile_points({i, j});
                    for (std::size_t p = 0; p + 1 < pts.size(); p += 2)
                        if (std::fabs(pts[p]) <= a && std::fabs(pts[p + 1]) <= a) central.insert(central.end(), {pts[p], pts[p + 1]});
                }
            if (central.empty()) continue;
            Rng pick(derive_seed(seed_, {kPalmLabel}));
            const std::size_t c = pick.below(central.size() / 2);
            shift_[0] = central[2 * c];
            shift_[1] = central[2 * c + 1];
            coords_ = {0.0, 0.0};
            break;
        }
    }
    grow_to(m0);
}

const GrowingEnvironment::BaseTile& GrowingEnvironment::base_tile(const TileKey& key) {
    auto it = base_.find(key);
    if (it != base_.end()) return it->second;
    Rng rng(derive_seed(seed_, {kTileLabel, zigzag(key.first), zigzag(key.second)}));
    BaseTile t;
    const auto n = static_cast<std::size_t>(rng.poisson(spec_.lambda * tile_ * tile_));
    t.pts.resize(2 * n);
    for (std::size_t p = 0; p < n; ++p) {
        t.pts[2 * p] = (static_cast<double>(key.first) + rng.uniform_open()) * tile_;
        t.pts[2 * p + 1] = (static_cast<double>(key.second) + rng.uniform_open()) * tile_;
    }
    if (spec_.kind == ProcessKind::MHP2) {
        t.marks.resize(n);
        for (auto& m : t.marks) m = rng.uniform_open();
    }
    if (spec_.kind == ProcessKind::MCP) {
        std::vector<double> kids;
        const double mean = spec_.mu * ball_volume(2, spec_.R);
        for (std::size_t p = 0; p < n; ++p) {
            const auto m = rng.poisson(mean);
            for (std::int64_t c = 0; c < m; ++c) {
                // Uniform in the disc by rejection from the bounding square.
                double u, v;
                do {
                    u = rng.uniform(-1.0, 1.0);
                    v = rng.uniform(-1.0, 1.0);
                } while (u * u + v * v >= 1.0);
                kids.insert(kids.end(), {t.pts[2 * p] + spec_.R * u, t.pts[2 * p + 1] + spec_.R * v});
            }
        }
        daughters_[key] = std::move(kids);
    }
    return base_.emplace(key, std::move(t)).first->second;
}

std::vector<double> GrowingEnvironment::final_tile_points(const TileKey& key) {
    if (spec_.kind == ProcessKind::PPP) return base_tile(key).pts;
    const double x0 = static_cast<double>(key.first) * tile_, x1 = x0 + tile_;
    const double y0 = static_cast<double>(key.second) * tile_, y1 = y0 + tile_;
    std::vector<double> out;
    if (spec_.kind == ProcessKind::MCP) {
        for (std::int64_t di = -1; di <= 1; ++di)
            for (std::int64_t dj = -1; dj <= 1; ++dj) {
                const TileKey nk{key.first + di, key.second + dj};
                base_tile(nk);
                const auto& kids = daughters_.at(nk);
                for (std::size_t p = 0; p + 1 < kids.size(); p += 2)
                    if (kids[p] >= x0 && kids[p] < x1 && kids[p + 1] >= y0 && kids[p + 1] < y1)
                        out.insert(out.end(), {kids[p], kids[p + 1]});
            }
        return out;
    }
    // Hardcore thinning against the base points of the 3x3 block (tile >= R).
    const double r2 = spec_.R * spec_.R;
    const BaseTile& own = base_tile(key);
    for (std::size_t p = 0; 2 * p < own.pts.size(); ++p) {
        const double* x = &own.pts[2 * p];
        bool keep = true;
        for (std::int64_t di = -1; di <= 1 && keep; ++di)
            for (std::int64_t dj = -1; dj <= 1 && keep; ++dj) {
                const bool self_tile = di == 0 && dj == 0;
                const BaseTile& nb = base_tile({key.first + di, key.second + dj});
                for (std::size_t q = 0; 2 * q < nb.pts.size(); ++q) {
                    if (self_tile && q == p) continue;
                    if (squared_distance(x, &nb.pts[2 * q], 2) > r2) continue;
                    if (spec_.kind == ProcessKind::MHP1 || !(own.marks[p] < nb.marks[q])) {
                        keep = false;
                        break;
                    }
                }
            }
        if (keep) out.insert(out.end(), {x[0], x[1]});
    }
    return out;
}

void GrowingEnvironment::grow_to(std::int64_t m) {
    const std::int64_t old = tiles_per_half_;
    for (std::int64_t i = -m; i < m; ++i)
        for (std::int64_t j = -m; j < m; ++j) {
            if (i >= -old && i < old && j >= -old && j < old) continue;
            const auto pts = final_tile_points({i, j});
            for (std::size_t p = 0; p + 1 < pts.size(); p += 2) {
                if (pts[p] == shift_[0] && pts[p + 1] == shift_[1] && spec_.kind != ProcessKind::PPP) continue;
                coords_.insert(coords_.end(), {pts[p] - shift_[0], pts[p + 1] - shift_[1]});
            }
        }
    tiles_per_half_ = m;
    // Future rings only look one tile inward, so deep interior tiles can go.
    auto interior = [m](const TileKey& k) { return k.first > -m && k.first < m - 1 && k.second > -m && k.second < m - 1; };
    for (auto it = base_.begin(); it != base_.end();) it = interior(it->first) ? base_.erase(it) : std::next(it);
    for (auto it = daughters_.begin(); it != daughters_.end();) it = interior(it->first) ? daughters_.erase(it) : std::next(it);
    rebuild();
}

void GrowingEnvironment::rebuild() {
    const PointConfig cfg = snapshot();
    const Triangulation tri = delaunay_triangulation(cfg);
    const std::size_t n = cfg.size();
    if (kind_ == GraphKind::Delaunay) {
        graph_ = tri.graph;
    } else {
        const KdTree tree(cfg.coords.data(), n, 2);
        graph_ = kind_ == GraphKind::Gabriel ? gabriel_from(cfg, tree, tri.graph.edges())
                                             : creek_crossing_from(cfg, tree, tri.graph.edges(), n_param_);
    }

    const double lo[2] = {cfg.window.lo[0], cfg.window.lo[1]};
    const double hi[2] = {cfg.window.hi[0], cfg.window.hi[1]};
    std::vector<double> need(4 * n);
    for (std::size_t v = 0; v < n; ++v) {
        need[4 * v] = need[4 * v + 2] = cfg.coord(v, 0);
        need[4 * v + 1] = need[4 * v + 3] = cfg.coord(v, 1);
    }
    auto widen = [&](std::uint32_t v, double cx, double cy, double r) {
        r = r * (1.0 + 1e-9) + 1e-12;
        double* b = &need[4 * static_cast<std::size_t>(v)];
        b[0] = std::min(b[0], cx - r);
        b[1] = std::min(b[1], cy - r);
        b[2] = std::max(b[2], cx + r);
        b[3] = std::max(b[3], cy + r);
    };
    std::vector<char> hull(n, 0);
    std::map<Edge, int> incidence;
    for (const auto& t : tri.triangles) {
        const double* a = cfg.point(t[0]);
        const double* b = cfg.point(t[1]);
        const double* c = cfg.point(t[2]);
        const double bx = b[0] - a[0], by = b[1] - a[1], cx = c[0] - a[0], cy = c[1] - a[1];
        const double dd = 2.0 * (bx * cy - by * cx);
        const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
        const double ux = (cy * b2 - by * c2) / dd, uy = (bx * c2 - cx * b2) / dd;
        const double r = std::sqrt(ux * ux + uy * uy);
        for (auto v : t) widen(v, a[0] + ux, a[1] + uy, r);
        for (int k = 0; k < 3; ++k) {
            const auto e = t[k] < t[(k + 1) % 3] ? Edge{t[k], t[(k + 1) % 3]} : Edge{t[(k + 1) % 3], t[k]};
            ++incidence[e];
        }
    }
    for (const auto& [e, count] : incidence)
        if (count < 2) hull[e.first] = hull[e.second] = 1;
    if (kind_ != GraphKind::Delaunay) {
        // Gabriel status depends on the diametral ball, creek status on the
        // ball of radius (n+1)l/2 around the midpoint.
        const double factor = kind_ == GraphKind::Gabriel ? 0.5 : 0.5 * (n_param_ + 1);
        for (const auto& [i, j] : tri.graph.edges()) {
            const double* x = cfg.point(i);
            const double* y = cfg.point(j);
            const double r = factor * std::sqrt(squared_distance(x, y, 2));
            const double mx = 0.5 * (x[0] + y[0]), my = 0.5 * (x[1] + y[1]);
            widen(i, mx, my, r);
            widen(j, mx, my, r);
        }
    }
    certified_.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        const double* b = &need[4 * v];
        certified_[v] = !hull[v] && b[0] > lo[0] && b[1] > lo[1] && b[2] < hi[0] && b[3] < hi[1];
    }
}

void GrowingEnvironment::ensure(std::uint32_t v) {
    while (!certified_[v]) {
        if (half_width() >= opt_.max_half_width) throw InvariantViolation("environment exceeded its maximum size");
        const auto m = std::max<std::int64_t>(tiles_per_half_ + 1,
                                              static_cast<std::int64_t>(std::ceil(tiles_per_half_ * opt_.growth)));
        ++expansions_;
        grow_to(m);
    }
}

PointConfig GrowingEnvironment::snapshot() const {
    PointConfig cfg;
    const double h = half_width();
    cfg.window = Window({-h - shift_[0], -h - shift_[1]}, {h - shift_[0], h - shift_[1]}, spec_.interaction_range());
    cfg.dim = 2;
    cfg.coords = coords_;
    cfg.palm = true;
    cfg.seed = seed_;
    return cfg;
}

}  // namespace geowalk
