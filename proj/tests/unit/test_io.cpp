#include <doctest.h>

#include <filesystem>
#include <string>

#include "geowalk/error.hpp"
#include "geowalk/io.hpp"
#include "support.hpp"

using namespace geowalk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "geowalk_test_io";
    fs::create_directories(dir);
    return dir / name;
}

bool throws_mentioning(auto&& fn, const std::string& needle) {
    try {
        fn();
    } catch (const FormatError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_CASE("doubles round-trip through text") {
    Rng rng(1);
    for (int t = 0; t < 1000; ++t) {
        const double x = rng.normal() * std::pow(10.0, rng.uniform(-30, 30));
        CHECK(std::stod(io::format_double(x)) == x);
    }
    CHECK(io::sidecar("a/b/points.csv") == fs::path("a/b/points.json"));
}

TEST_CASE("points round-trip") {
    Rng rng(2);
    auto c = sample_ppp(2.0, Window::cube(3, 2.0), rng);
    c.seed = 77;
    const auto path = scratch("points.csv");
    io::write_points(path, c, ProcessSpec{ProcessKind::PPP, 2.0});
    const auto back = io::read_points(path);
    CHECK(back.dim == 3);
    CHECK(back.coords == c.coords);
    CHECK(back.window.lo == c.window.lo);
    CHECK(back.window.hi == c.window.hi);
    CHECK(back.seed == 77);
    const auto meta = io::read_json(io::sidecar(path));
    CHECK(meta["n_points"].get<std::size_t>() == c.size());
    CHECK(meta["kind"] == "ppp");
}

TEST_CASE("edges and networks round-trip") {
    Rng rng(3);
    const auto c = testing::uniform_points(100, 10.0, rng);
    const auto g = delaunay(c);
    const auto path = scratch("edges.csv");
    io::write_graph(path, g);
    CHECK(io::read_graph(path, c.size()).edges() == g.edges());
    CHECK_THROWS_AS(io::read_graph(path, 10), FormatError);

    ResistorNetwork net;
    net.n_nodes = 4;
    net.edges = {{0, 1, 0.1}, {1, 2, 1.0 / 3.0}, {2, 3, 7.25}};
    net.source = {0};
    net.sink = {3, 2};
    const auto np = scratch("network.csv");
    io::write_network(np, net, 5, 1.5, 3);
    const auto back = io::read_network(np);
    CHECK(back.n_nodes == 4);
    CHECK(back.source == net.source);
    CHECK(back.sink == net.sink);
    REQUIRE(back.edges.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.edges[i].c == net.edges[i].c);
    const auto h = io::read_json(io::sidecar(np));
    CHECK(h["N"] == 5);
    CHECK(h["n_identified_nodes"] == 3);
}

TEST_CASE("malformed input names the offending column") {
    CHECK(throws_mentioning([] { io::parse_points_csv("x0,x1\n1,abc\n"); }, "x1"));
    CHECK(throws_mentioning([] { io::parse_points_csv("x0,y\n1,2\n"); }, "y"));
    CHECK(throws_mentioning([] { io::parse_points_csv("x0,x1\n1,2,3\n"); }, "row 1"));
    CHECK(throws_mentioning([] { io::parse_edges_csv("i,j\n0,1.5\n"); }, "j"));
    CHECK(throws_mentioning([] { io::parse_edges_csv("i,j\n2,1\n"); }, "i < j"));
    CHECK(throws_mentioning([] { io::parse_points_csv(""); }, "empty"));
    CHECK_THROWS_AS(io::read_points(scratch("does_not_exist.csv")), FormatError);
    io::write_text(scratch("bad_net.csv"), "i,j,c\n0,1,-2\n");
    io::write_json(scratch("bad_net.json"), io::Json{{"n_nodes", 2}, {"source", {0}}, {"sink", {1}}});
    CHECK_THROWS_AS(io::read_network(scratch("bad_net.csv")), FormatError);
    io::write_text(scratch("orphan.csv"), "i,j,c\n0,1,1\n");
    CHECK(throws_mentioning([&] { io::read_network(scratch("orphan.csv")); }, "missing"));
}

TEST_CASE("report shapes") {
    Sigma2Fit fit;
    fit.per_axis = {1.0, 2.0};
    fit.per_axis_se = {0.1, 0.2};
    fit.r2_per_axis = {0.99, 0.98};
    fit.pooled = 1.5;
    const auto j = io::sigma2_report(fit);
    CHECK(j["pooled"] == 1.5);
    CHECK(j["per_axis"].size() == 2);
    SiteField f({3, 1}, 1);
    const auto rep = lr_crossings(f, 1);
    const auto cj = io::crossing_report(rep);
    CHECK(cj["total"] == 1);
}
