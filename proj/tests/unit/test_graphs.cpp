#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "geowalk/error.hpp"
#include "geowalk/graph.hpp"
#include "geowalk/point_process.hpp"
#include "geowalk/predicates.hpp"
#include "geowalk/stats.hpp"
#include "oracles/geometry_oracles.hpp"
#include "support.hpp"

using namespace geowalk;
using testing::config_from;

namespace {

oracle::EdgeSet edges_of(std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> e) { return {e.begin(), e.end()}; }

PointConfig transformed(const PointConfig& c, double angle, double sx, double sy) {
    PointConfig r = c;
    const double cs = std::cos(angle), sn = std::sin(angle);
    for (std::size_t i = 0; i < c.size(); ++i) {
        r.point(i)[0] = cs * c.coord(i, 0) - sn * c.coord(i, 1) + sx;
        r.point(i)[1] = sn * c.coord(i, 0) + cs * c.coord(i, 1) + sy;
    }
    r.window = Window::cube(2, -100, 100);
    return r;
}

}  // namespace

TEST_CASE("graph container invariants") {
    const Graph g(4, {{1, 0}, {0, 1}, {2, 3}, {3, 1}});
    CHECK(g.n_edges() == 3);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 0));
    CHECK_FALSE(g.has_edge(0, 2));
    for (std::size_t v = 0; v < 4; ++v) {
        CHECK(g.degree(v) == g.neighbors(v).size());
        for (auto w : g.neighbors(v)) CHECK(g.has_edge(static_cast<std::uint32_t>(v), w));
    }
    CHECK_THROWS_AS(Graph(3, {{1, 1}}), ParameterError);
    CHECK_THROWS_AS(Graph(3, {{0, 3}}), ParameterError);
    CHECK(parse_graph_kind("gabriel") == GraphKind::Gabriel);
}

TEST_CASE("delaunay small cases") {
    CHECK(oracle::edge_set(delaunay(config_from({{0, 0}, {1, 0}, {0, 1}}))) == edges_of({{0, 1}, {0, 2}, {1, 2}}));
    CHECK(delaunay(config_from({{0, 0}, {1, 0}})).n_edges() == 1);
    CHECK(delaunay(config_from({{0, 0}})).n_edges() == 0);
    // cocircular unit square: the diagonal with the smallest sorted index pair
    const auto sq = config_from({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(oracle::edge_set(delaunay(sq)) == edges_of({{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}}));
    const auto sq2 = config_from({{1, 0}, {0, 0}, {1, 1}, {0, 1}});  // diagonals {0,3} and {1,2}
    CHECK(oracle::edge_set(delaunay(sq2)) == edges_of({{0, 1}, {0, 2}, {1, 3}, {2, 3}, {0, 3}}));
    CHECK_THROWS_AS(delaunay(config_from({{0, 0}, {1, 1}, {2, 2}, {3, 3}})), DegenerateInputError);
    CHECK_THROWS_AS(delaunay(config_from({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, 3)), ParameterError);
}

TEST_CASE("delaunay triangles have empty circumcircles") {
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        const auto c = testing::uniform_points(50, 10.0, rng);
        const auto tri = delaunay_triangulation(c);
        CHECK(tri.triangles.size() > 0);
        for (const auto& T : tri.triangles) {
            CHECK(oracle::orient(c.point(T[0]), c.point(T[1]), c.point(T[2])) > 0);
            for (std::size_t l = 0; l < c.size(); ++l)
                CHECK(oracle::in_circle(c.point(T[0]), c.point(T[1]), c.point(T[2]), c.point(l)) <= 0);
        }
        // Euler: E = 3n - 3 - h and T = 2n - 2 - h, so E - T = n - 1
        CHECK(tri.graph.n_edges() == tri.triangles.size() + c.size() - 1);
    }
}

TEST_CASE("delaunay edges are Voronoi neighbours") {
    Rng rng(2);
    for (int t = 0; t < 20; ++t) {
        const auto c = testing::uniform_points(30, 10.0, rng);
        const auto tri = delaunay_triangulation(c);
        // circumcentres of the triangles on each side of every edge
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::array<double, 2>>> centres;
        for (const auto& T : tri.triangles) {
            const double *a = c.point(T[0]), *b = c.point(T[1]), *d = c.point(T[2]);
            const double bx = b[0] - a[0], by = b[1] - a[1], dx = d[0] - a[0], dy = d[1] - a[1];
            const double den = 2 * (bx * dy - by * dx);
            const double ux = (dy * (bx * bx + by * by) - by * (dx * dx + dy * dy)) / den;
            const double uy = (bx * (dx * dx + dy * dy) - dx * (bx * bx + by * by)) / den;
            for (int k = 0; k < 3; ++k) {
                auto i = T[k], j = T[(k + 1) % 3];
                centres[{std::min(i, j), std::max(i, j)}].push_back({a[0] + ux, a[1] + uy});
            }
        }
        for (const auto& [e, cs] : centres) {
            const double* p = c.point(e.first);
            const double* q = c.point(e.second);
            std::array<double, 2> probe;
            if (cs.size() == 2) {
                probe = {0.5 * (cs[0][0] + cs[1][0]), 0.5 * (cs[0][1] + cs[1][1])};
            } else {
                // hull edge: walk outward from the circumcentre along the bisector
                const double mx = 0.5 * (p[0] + q[0]), my = 0.5 * (p[1] + q[1]);
                double nx = -(q[1] - p[1]), ny = q[0] - p[0];
                double s = 0;  // orient the normal away from the other points
                for (std::size_t l = 0; l < c.size(); ++l) s += (c.coord(l, 0) - mx) * nx + (c.coord(l, 1) - my) * ny;
                if (s > 0) {
                    nx = -nx;
                    ny = -ny;
                }
                probe = {cs[0][0] + 50 * nx, cs[0][1] + 50 * ny};
            }
            const double dp = squared_distance(probe.data(), p, 2);
            for (std::size_t l = 0; l < c.size(); ++l) {
                if (l == e.first || l == e.second) continue;
                CHECK(squared_distance(probe.data(), c.point(l), 2) > dp * (1 - 1e-9));
            }
        }
        CHECK(centres.size() == tri.graph.n_edges());
    }
}

TEST_CASE("gabriel examples") {
    CHECK(oracle::edge_set(gabriel(config_from({{0, 0}, {1, 0}, {2, 0}}))) == edges_of({{0, 1}, {1, 2}}));
    const double h = std::sqrt(3.0) / 2;
    CHECK(gabriel(config_from({{0, 0}, {1, 0}, {0.5, h}})).n_edges() == 3);
    CHECK(gabriel(config_from({{0, 0}, {3, 4}})).n_edges() == 1);
    // a point exactly on the diametral circle does not block
    CHECK(gabriel(config_from({{-1, 0}, {1, 0}, {0, 1}})).has_edge(0, 1));
    CHECK_FALSE(gabriel(config_from({{-1, 0}, {1, 0}, {0, 0.999}})).has_edge(0, 1));
}

TEST_CASE("creek-crossing examples") {
    const auto line = config_from({{0, 0}, {1, 0}, {2, 0}});
    CHECK(oracle::edge_set(creek_crossing(line, 2)) == edges_of({{0, 1}, {1, 2}}));
    // An exactly equilateral triangle: every detour step ties with the edge.
    const auto eq = config_from({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 3);
    CHECK(creek_crossing(eq, 2).n_edges() == 3);
    // The planar version in doubles is only nearly equilateral; its strictly
    // longest side has a strictly shorter detour.
    const double h = std::sqrt(3.0) / 2;
    const auto eq2 = config_from({{0, 0}, {1, 0}, {0.5, h}});
    CHECK(oracle::edge_set(creek_crossing(eq2, 2)) == oracle::brute_creek(eq2, 2));
    // |01| = 2 and |02| = |12| = sqrt 5: the detour 0-1-2 ties on its second step
    const auto iso = config_from({{0, 0}, {2, 0}, {1, 2}});
    CHECK(creek_crossing(iso, 2).n_edges() == 3);
    CHECK_THROWS_AS(creek_crossing(line, 1), ParameterError);
    // a long edge bridged by three shorter steps survives n = 2 but not n = 3
    const auto zig = config_from({{0, 0}, {1, 0.9}, {2, -0.9}, {3, 0}});
    const auto g2 = creek_crossing(zig, 2), g3 = creek_crossing(zig, 3);
    CHECK(oracle::edge_set(g2) == oracle::brute_creek(zig, 2));
    CHECK(oracle::edge_set(g3) == oracle::brute_creek(zig, 3));
    CHECK(g3.is_subgraph_of(g2));
}

TEST_CASE("graphs equal brute-force oracles") {
    Rng rng(3);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 3 + rng.below(58);
        const auto c = testing::uniform_points(n, 10.0, rng);
        const auto dt = delaunay(c);
        const auto gab = gabriel(c);
        CHECK(oracle::edge_set(dt) == oracle::brute_delaunay(c));
        CHECK(oracle::edge_set(gab) == oracle::brute_gabriel(c));
        CHECK(gab.is_subgraph_of(dt));
        Graph prev = gab;
        for (int k : {2, 3, 4}) {
            const auto g = creek_crossing(c, k);
            if (n <= 40) CHECK(oracle::edge_set(g) == oracle::brute_creek(c, k));
            CHECK(g.is_subgraph_of(prev));
            prev = g;
        }
    }
}

TEST_CASE("graphs in three dimensions") {
    Rng rng(4);
    for (int t = 0; t < 10; ++t) {
        const auto c = testing::uniform_points(30, 5.0, rng, 3);
        const auto gab = gabriel(c);
        CHECK(oracle::edge_set(gab) == oracle::brute_gabriel(c));
        for (int k : {2, 3}) {
            const auto g = creek_crossing(c, k);
            CHECK(oracle::edge_set(g) == oracle::brute_creek(c, k));
            CHECK(g.is_subgraph_of(gab));
        }
    }
}

TEST_CASE("builders are invariant under translation and rotation") {
    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
        const auto c = testing::uniform_points(200, 10.0, rng);
        for (auto kind : {GraphKind::Delaunay, GraphKind::Gabriel, GraphKind::Creek}) {
            const auto base = oracle::edge_set(build_graph(c, kind, 2));
            CHECK(oracle::edge_set(build_graph(transformed(c, 0.0, 7.0, -3.0), kind, 2)) == base);
            CHECK(oracle::edge_set(build_graph(transformed(c, std::numbers::pi / 2, 0, 0), kind, 2)) == base);
            CHECK(oracle::edge_set(build_graph(transformed(c, 0.5236, 1.0, 2.0), kind, 2)) == base);
        }
    }
}

TEST_CASE("voronoi_nucleus") {
    const auto two = config_from({{0, 0}, {2, 0}});
    const double q1[2] = {0.9, 0.0}, tie[2] = {1.0, 5.0};
    CHECK(voronoi_nucleus(two, q1) == 0);
    CHECK(voronoi_nucleus(two, two.point(1)) == 1);
    CHECK(voronoi_nucleus(two, tie) == 0);
    Rng rng(6);
    const auto c = testing::uniform_points(100, 1.0, rng);
    for (int t = 0; t < 100; ++t) {
        const double q[2] = {rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2)};
        CHECK(voronoi_nucleus(c, q) == oracle::brute_nearest(c, q));
    }
    PointConfig empty;
    empty.dim = 2;
    CHECK_THROWS_AS(voronoi_nucleus(empty, q1), ParameterError);
}

TEST_CASE("degree statistics") {
    PointConfig ring;
    ring.dim = 2;
    for (int k = 0; k < 6; ++k) {
        const double p[2] = {std::cos(k * std::numbers::pi / 3), std::sin(k * std::numbers::pi / 3)};
        ring.push_back(p);
    }
    const Graph cycle(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
    const auto s = degree_stats(cycle, ring);
    CHECK(s.histogram.at(2) == 6);
    for (int k = 0; k <= 8; ++k) CHECK(s.moments[k] == doctest::Approx(std::pow(2.0, k)));
    for (double l : s.max_edge_length) CHECK(l == doctest::Approx(1.0));

    // origin degree in the planar Palm PPP Delaunay graph has mean 6
    const Rng root(7);
    std::vector<double> deg;
    std::vector<std::size_t> hist(40, 0);
    for (std::size_t r = 0; r < 3000; ++r) {
        Rng g = root.child(r);
        const auto c = palm_version(ProcessSpec{}, Window::cube(2, 5.0), g);
        const auto dt = delaunay(c);
        deg.push_back(static_cast<double>(dt.degree(0)));
        const std::uint32_t origin = 0;
        const auto st = degree_stats(dt, c, std::span<const std::uint32_t>(&origin, 1));
        CHECK(st.n_vertices == 1);
        for (std::size_t d = 1; d < st.tail.size(); ++d) CHECK(st.tail[d] <= st.tail[d - 1]);
    }
    CHECK(testing::within_sigma(stats::mean(deg), 6.0, std::sqrt(stats::variance(deg) / deg.size())));

    Rng g(8);
    const auto c = sample_ppp(1.0, Window::cube(2, 10.0), g);
    const auto st = degree_stats(delaunay(c), c);
    for (std::size_t d = 1; d < st.tail.size(); ++d) CHECK(st.tail[d] <= st.tail[d - 1]);
    CHECK(st.tail[0] == 1.0);
}
