// Guibas-Stolfi divide and conquer on the quad-edge structure.

#include <algorithm>
#include <map>
#include <numeric>

#include "geowalk/error.hpp"
#include "geowalk/graph.hpp"
#include "geowalk/predicates.hpp"

namespace geowalk {

namespace {

class QuadEdges {
public:
    explicit QuadEdges(const PointConfig& cfg) : cfg_(cfg) {}

    static std::uint32_t rot(std::uint32_t e) { return (e & ~3u) | ((e + 1) & 3u); }
    static std::uint32_t sym(std::uint32_t e) { return (e & ~3u) | ((e + 2) & 3u); }
    static std::uint32_t rotinv(std::uint32_t e) { return (e & ~3u) | ((e + 3) & 3u); }
    std::uint32_t onext(std::uint32_t e) const { return next_[e]; }
    std::uint32_t oprev(std::uint32_t e) const { return rot(onext(rot(e))); }
    std::uint32_t lnext(std::uint32_t e) const { return rot(onext(rotinv(e))); }
    std::uint32_t rprev(std::uint32_t e) const { return onext(sym(e)); }
    std::uint32_t org(std::uint32_t e) const { return org_[e]; }
    std::uint32_t dest(std::uint32_t e) const { return org_[sym(e)]; }

    std::uint32_t make_edge(std::uint32_t a, std::uint32_t b) {
        const auto base = static_cast<std::uint32_t>(next_.size());
        next_.insert(next_.end(), {base, base + 3, base + 2, base + 1});
        org_.insert(org_.end(), {a, kNone, b, kNone});
        alive_.push_back(1);
        return base;
    }

    void splice(std::uint32_t a, std::uint32_t b) {
        const std::uint32_t alpha = rot(onext(a));
        const std::uint32_t beta = rot(onext(b));
        std::swap(next_[a], next_[b]);
        std::swap(next_[alpha], next_[beta]);
    }

    std::uint32_t connect(std::uint32_t a, std::uint32_t b) {
        const std::uint32_t e = make_edge(dest(a), org(b));
        splice(e, lnext(a));
        splice(sym(e), b);
        return e;
    }

    void remove(std::uint32_t e) {
        splice(e, oprev(e));
        splice(sym(e), oprev(sym(e)));
        alive_[e >> 2] = 0;
    }

    const double* p(std::uint32_t v) const { return cfg_.point(v); }
    int ccw(std::uint32_t a, std::uint32_t b, std::uint32_t c) const { return predicates::orient2d(p(a), p(b), p(c)); }
    bool right_of(std::uint32_t v, std::uint32_t e) const { return ccw(v, dest(e), org(e)) > 0; }
    bool left_of(std::uint32_t v, std::uint32_t e) const { return ccw(v, org(e), dest(e)) > 0; }
    int in_circle(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) const {
        return predicates::incircle(p(a), p(b), p(c), p(d));
    }

    std::size_t n_slots() const { return alive_.size(); }
    bool alive(std::size_t q) const { return alive_[q] != 0; }

    static constexpr std::uint32_t kNone = 0xFFFFFFFFu;

private:
    const PointConfig& cfg_;
    std::vector<std::uint32_t> next_;
    std::vector<std::uint32_t> org_;
    std::vector<char> alive_;
};

struct HullPair {
    std::uint32_t left, right;
};

HullPair divide(QuadEdges& q, const std::vector<std::uint32_t>& s, std::size_t lo, std::size_t hi) {
    const std::size_t n = hi - lo;
    if (n == 2) {
        const std::uint32_t a = q.make_edge(s[lo], s[lo + 1]);
        return {a, QuadEdges::sym(a)};
    }
    if (n == 3) {
        const std::uint32_t a = q.make_edge(s[lo], s[lo + 1]);
        const std::uint32_t b = q.make_edge(s[lo + 1], s[lo + 2]);
        q.splice(QuadEdges::sym(a), b);
        const int c = q.ccw(s[lo], s[lo + 1], s[lo + 2]);
        if (c > 0) {
            q.connect(b, a);
            return {a, QuadEdges::sym(b)};
        }
        if (c < 0) {
            const std::uint32_t e = q.connect(b, a);
            return {QuadEdges::sym(e), e};
        }
        return {a, QuadEdges::sym(b)};
    }
    const std::size_t mid = lo + n / 2;
    auto [ldo, ldi] = divide(q, s, lo, mid);
    auto [rdi, rdo] = divide(q, s, mid, hi);

    // Lower common tangent.
    for (;;) {
        if (q.left_of(q.org(rdi), ldi)) ldi = q.lnext(ldi);
        else if (q.right_of(q.org(ldi), rdi)) rdi = q.rprev(rdi);
        else break;
    }
    std::uint32_t basel = q.connect(QuadEdges::sym(rdi), ldi);
    if (q.org(ldi) == q.org(ldo)) ldo = QuadEdges::sym(basel);
    if (q.org(rdi) == q.org(rdo)) rdo = basel;

    auto valid = [&](std::uint32_t e) { return q.right_of(q.dest(e), basel); };
    for (;;) {
        std::uint32_t lcand = q.onext(QuadEdges::sym(basel));
        if (valid(lcand)) {
            while (q.in_circle(q.dest(basel), q.org(basel), q.dest(lcand), q.dest(q.onext(lcand))) > 0) {
                const std::uint32_t t = q.onext(lcand);
                q.remove(lcand);
                lcand = t;
            }
        }
        std::uint32_t rcand = q.oprev(basel);
        if (valid(rcand)) {
            while (q.in_circle(q.dest(basel), q.org(basel), q.dest(rcand), q.dest(q.oprev(rcand))) > 0) {
                const std::uint32_t t = q.oprev(rcand);
                q.remove(rcand);
                rcand = t;
            }
        }
        const bool lv = valid(lcand), rv = valid(rcand);
        if (!lv && !rv) break;
        if (!lv || (rv && q.in_circle(q.dest(lcand), q.org(lcand), q.org(rcand), q.dest(rcand)) > 0))
            basel = q.connect(rcand, QuadEdges::sym(basel));
        else
            basel = q.connect(QuadEdges::sym(basel), QuadEdges::sym(lcand));
    }
    return {ldo, rdo};
}

using Tri = std::array<std::uint32_t, 3>;

Edge sorted_edge(std::uint32_t a, std::uint32_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// Flip cocircular diagonals until each cocircular quadrilateral uses its
// lexicographically smallest diagonal. Every flip strictly lowers the edge
// multiset, so the loop terminates.
void resolve_cocircular(const PointConfig& cfg, std::vector<Tri>& tris) {
    std::map<Edge, std::array<std::int64_t, 2>> owners;
    auto attach = [&](Edge e, std::int64_t t) {
        auto& slot = owners.try_emplace(e, std::array<std::int64_t, 2>{-1, -1}).first->second;
        slot[slot[0] < 0 ? 0 : 1] = t;
    };
    auto replace_owner = [&](Edge e, std::int64_t from, std::int64_t to) {
        auto& slot = owners.at(e);
        slot[slot[0] == from ? 0 : 1] = to;
    };
    for (std::size_t t = 0; t < tris.size(); ++t)
        for (int k = 0; k < 3; ++k) attach(sorted_edge(tris[t][k], tris[t][(k + 1) % 3]), static_cast<std::int64_t>(t));

    std::vector<Edge> work;
    for (const auto& kv : owners)
        if (kv.second[1] >= 0) work.push_back(kv.first);
    while (!work.empty()) {
        const Edge e = work.back();
        work.pop_back();
        auto it = owners.find(e);
        if (it == owners.end() || it->second[1] < 0) continue;
        const std::int64_t t0 = it->second[0], t1 = it->second[1];
        auto apex = [&](const Tri& t) {
            for (auto v : t)
                if (v != e.first && v != e.second) return v;
            return t[0];
        };
        const std::uint32_t c = apex(tris[t0]), d = apex(tris[t1]);
        if (!(sorted_edge(c, d) < e)) continue;
        std::uint32_t a = e.first, b = e.second;
        if (predicates::orient2d(cfg.point(a), cfg.point(b), cfg.point(c)) < 0) std::swap(a, b);
        if (predicates::incircle(cfg.point(a), cfg.point(b), cfg.point(c), cfg.point(d)) != 0) continue;
        // Quadrilateral a, d, b, c in counterclockwise order; new diagonal c-d.
        tris[t0] = {a, d, c};
        tris[t1] = {d, b, c};
        owners.erase(it);
        owners[sorted_edge(c, d)] = {t0, t1};
        replace_owner(sorted_edge(a, d), t1, t0);
        replace_owner(sorted_edge(b, c), t0, t1);
        for (Edge f : {sorted_edge(a, d), sorted_edge(d, b), sorted_edge(b, c), sorted_edge(c, a)}) work.push_back(f);
    }
}

}  // namespace

Triangulation delaunay_triangulation(const PointConfig& config) {
    if (config.dim != 2) throw ParameterError("Delaunay triangulation is implemented for d = 2 only");
    const std::size_t n = config.size();
    Triangulation out;
    if (n < 3) {
        std::vector<Edge> e;
        if (n == 2) e.push_back({0, 1});
        out.graph = Graph(n, e, GraphKind::Delaunay);
        return out;
    }
    if (!duplicate_points(config).empty()) throw DegenerateInputError("configuration has duplicate points");
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), std::uint32_t{0});
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double* pa = config.point(a);
        const double* pb = config.point(b);
        return pa[0] < pb[0] || (pa[0] == pb[0] && pa[1] < pb[1]);
    });
    bool collinear = true;
    for (std::size_t i = 2; i < n && collinear; ++i)
        collinear = predicates::orient2d(config.point(order[0]), config.point(order[1]), config.point(order[i])) == 0;
    if (collinear) throw DegenerateInputError("all points are collinear");

    QuadEdges q(config);
    divide(q, order, 0, n);

    // A face left of e is a triangle when lnext^3 = e and it is counterclockwise.
    for (std::size_t slot = 0; slot < q.n_slots(); ++slot) {
        if (!q.alive(slot)) continue;
        for (std::uint32_t e : {static_cast<std::uint32_t>(slot * 4), static_cast<std::uint32_t>(slot * 4 + 2)}) {
            const std::uint32_t e1 = q.lnext(e), e2 = q.lnext(e1);
            if (q.lnext(e2) != e) continue;
            if (!(e < e1 && e < e2)) continue;
            const std::uint32_t a = q.org(e), b = q.org(e1), c = q.org(e2);
            if (q.ccw(a, b, c) > 0) out.triangles.push_back({a, b, c});
        }
    }
    resolve_cocircular(config, out.triangles);
    std::vector<Edge> edges;
    edges.reserve(out.triangles.size() * 3);
    for (const auto& t : out.triangles)
        for (int k = 0; k < 3; ++k) edges.push_back(sorted_edge(t[k], t[(k + 1) % 3]));
    out.graph = Graph(n, std::move(edges), GraphKind::Delaunay);
    std::sort(out.triangles.begin(), out.triangles.end());
    return out;
}

Graph delaunay(const PointConfig& config) { return delaunay_triangulation(config).graph; }

}  // namespace geowalk
