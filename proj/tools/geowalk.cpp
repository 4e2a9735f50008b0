// geowalk: command-line driver for sampling, graph building, walks, sigma^2
// estimation, conductance and box analysis.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "geowalk/diffusion.hpp"
#include "geowalk/error.hpp"
#include "geowalk/graph.hpp"
#include "geowalk/io.hpp"
#include "geowalk/percolation.hpp"
#include "geowalk/point_process.hpp"
#include "geowalk/random_walk.hpp"
#include "geowalk/resistor_network.hpp"
#include "geowalk/rng.hpp"

namespace fs = std::filesystem;
using namespace geowalk;
using io::Json;

namespace {

// Child stream labels under the master seed.
enum StreamLabel : std::uint64_t { kSample = 1, kWalk = 2, kSigma2 = 3, kNetwork = 4, kBoxes = 5, kCrossings = 6 };

struct Globals {
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out = ".";
};

struct ProcessArgs {
    std::string process = "ppp";
    double lambda = 1.0;
    double mu = 0.0;
    double radius = 0.0;
    CLI::Option* mu_opt = nullptr;
    CLI::Option* radius_opt = nullptr;

    ProcessSpec spec() const {
        ProcessSpec s;
        s.kind = parse_process_kind(process);
        s.lambda = lambda;
        s.mu = mu;
        s.R = radius;
        if (s.kind == ProcessKind::MCP && mu_opt->count() == 0) throw CLI::ValidationError("--mu", "required for mcp");
        if (s.kind != ProcessKind::PPP && radius_opt->count() == 0)
            throw CLI::ValidationError("--radius", "required for " + process);
        s.validate();
        return s;
    }
};

void add_process_options(CLI::App* cmd, ProcessArgs& p) {
    cmd->add_option("--process", p.process, "ppp, mcp, mhp1 or mhp2")
        ->check(CLI::IsMember({"ppp", "mcp", "mhp1", "mhp2"}))
        ->capture_default_str();
    cmd->add_option("--lambda", p.lambda, "Intensity (parent intensity for mcp)")->capture_default_str();
    p.mu_opt = cmd->add_option("--mu", p.mu, "Daughter intensity (mcp)");
    p.radius_opt = cmd->add_option("--radius", p.radius, "Cluster or hardcore radius");
}

fs::path out_path(const Globals& g, const std::string& name) {
    fs::create_directories(g.out);
    return fs::path(g.out) / name;
}

void log(const std::string& msg) { std::cerr << "geowalk: " << msg << "\n"; }

std::vector<double> time_grid(double dt, double tmax) {
    if (!(dt > 0.0) || !(tmax >= dt)) throw ParameterError("need 0 < dt <= tmax");
    std::vector<double> t;
    const auto n = static_cast<std::size_t>(std::floor(tmax / dt + 1e-9));
    for (std::size_t i = 1; i <= n; ++i) t.push_back(dt * static_cast<double>(i));
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random walks on random geometric graphs"};
    app.set_config("--config", "", "TOML/INI file mirroring the command-line flags");
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    Globals g;
    app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    app.add_option("--workers", g.workers, "Worker threads (0: all cores)")->capture_default_str();
    app.add_option("--out", g.out, "Output directory")->capture_default_str();

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "Sample a point process");
    ProcessArgs sp;
    double s_window = 10.0;
    int s_dim = 2;
    bool s_palm = false;
    std::string s_name = "points.csv";
    add_process_options(sample_cmd, sp);
    sample_cmd->add_option("--window", s_window, "Half side of the cube window")->capture_default_str();
    sample_cmd->add_option("--dim", s_dim, "Dimension")->check(CLI::Range(1, 8))->capture_default_str();
    sample_cmd->add_flag("--palm", s_palm, "Palm version (point at the origin, row 1)");
    sample_cmd->add_option("--name", s_name, "Output file name")->capture_default_str();

    // graph
    auto* graph_cmd = app.add_subcommand("graph", "Build a geometric graph over a points file");
    std::string gr_points, gr_type = "delaunay", gr_name = "edges.csv";
    int gr_n = 2;
    graph_cmd->add_option("--points", gr_points, "Points CSV")->required()->check(CLI::ExistingFile);
    graph_cmd->add_option("--type", gr_type, "delaunay, gabriel or creek")
        ->check(CLI::IsMember({"delaunay", "dt", "gabriel", "creek"}))
        ->capture_default_str();
    graph_cmd->add_option("--n", gr_n, "Creek-crossing hop bound (>= 2)")->capture_default_str();
    graph_cmd->add_option("--name", gr_name, "Output file name")->capture_default_str();

    // walk
    auto* walk_cmd = app.add_subcommand("walk", "Simulate one variable-speed random walk");
    std::string w_points, w_edges, w_name = "walk.csv";
    std::uint32_t w_start = 0;
    double w_time = 100.0, w_inner = 0.0;
    walk_cmd->add_option("--points", w_points, "Points CSV")->required()->check(CLI::ExistingFile);
    walk_cmd->add_option("--edges", w_edges, "Edges CSV")->required()->check(CLI::ExistingFile);
    walk_cmd->add_option("--start", w_start, "Start vertex")->capture_default_str();
    walk_cmd->add_option("--time", w_time, "Time horizon")->capture_default_str();
    walk_cmd->add_option("--inner", w_inner, "Stop on leaving [-inner, inner]^d (0: never)")->capture_default_str();
    walk_cmd->add_option("--name", w_name, "Output file name")->capture_default_str();

    // sigma2
    auto* sig_cmd = app.add_subcommand("sigma2", "Annealed MSD and sigma^2 estimate");
    ProcessArgs sgp;
    std::string sg_type = "delaunay", sg_boundary = "growing";
    int sg_n = 2, sg_dim = 2;
    double sg_window = 30.0, sg_dt = 10.0, sg_tmax = 500.0, sg_t0 = -1.0, sg_t1 = -1.0, sg_ks_time = 0.0;
    std::size_t sg_configs = 20, sg_walks = 10, sg_ks_samples = 1000;
    add_process_options(sig_cmd, sgp);
    sig_cmd->add_option("--type", sg_type, "delaunay, gabriel, creek or lattice")
        ->check(CLI::IsMember({"delaunay", "dt", "gabriel", "creek", "lattice"}))
        ->capture_default_str();
    sig_cmd->add_option("--n", sg_n, "Creek-crossing hop bound")->capture_default_str();
    sig_cmd->add_option("--dim", sg_dim, "Dimension")->capture_default_str();
    sig_cmd->add_option("--window", sg_window, "Half side of the initial window")->capture_default_str();
    sig_cmd->add_option("--boundary", sg_boundary, "growing or censored")
        ->check(CLI::IsMember({"growing", "censored"}))
        ->capture_default_str();
    sig_cmd->add_option("--configs", sg_configs, "Environments")->capture_default_str();
    sig_cmd->add_option("--walks", sg_walks, "Walks per environment")->capture_default_str();
    sig_cmd->add_option("--dt", sg_dt, "Time grid step")->capture_default_str();
    sig_cmd->add_option("--tmax", sg_tmax, "Last grid time")->capture_default_str();
    sig_cmd->add_option("--t0", sg_t0, "Fit window start (default tmax/10)");
    sig_cmd->add_option("--t1", sg_t1, "Fit window end (default tmax/2)");
    sig_cmd->add_option("--ks-time", sg_ks_time, "Also test Gaussianity of X_t.e1 at this time");
    sig_cmd->add_option("--ks-samples", sg_ks_samples, "Samples for the Gaussianity test")->capture_default_str();

    // conductance
    auto* cond_cmd = app.add_subcommand("conductance", "Effective conductance and D_N");
    std::string c_network, c_points, c_edges, c_type = "delaunay";
    int c_N = 0, c_n = 2;
    double c_rc = 0.0, c_time = 200.0;
    bool c_msd = false, c_write_net = false;
    std::size_t c_samples = 100000;
    cond_cmd->add_option("--network", c_network, "Network CSV with JSON header")->check(CLI::ExistingFile);
    cond_cmd->add_option("--points", c_points, "Points CSV for a periodized network")->check(CLI::ExistingFile);
    cond_cmd->add_option("--edges", c_edges, "Edges CSV (default: build --type over the points)")
        ->check(CLI::ExistingFile);
    cond_cmd->add_option("--type", c_type, "Graph type when no edges file is given")
        ->check(CLI::IsMember({"delaunay", "dt", "gabriel", "creek"}))
        ->capture_default_str();
    cond_cmd->add_option("--n", c_n, "Creek-crossing hop bound")->capture_default_str();
    cond_cmd->add_option("--N", c_N, "Half side of the periodized cube (integer)");
    cond_cmd->add_option("--rc", c_rc, "Edge length cutoff");
    cond_cmd->add_flag("--msd-check", c_msd, "Compare D_N with the Monte Carlo winding slope");
    cond_cmd->add_option("--time", c_time, "Winding time horizon")->capture_default_str();
    cond_cmd->add_option("--samples", c_samples, "Winding samples")->capture_default_str();
    cond_cmd->add_flag("--write-network", c_write_net, "Also write the merged network");

    // boxes
    auto* box_cmd = app.add_subcommand("boxes", "Nice/good box classification or a good-density sweep");
    std::string b_points;
    ProcessArgs bp;
    double b_K = 20.0, b_c2 = 0.0;
    int b_n = 2, b_dim = 2;
    std::vector<double> b_sweep;
    std::size_t b_samples = 100;
    double b_threshold = kSitePercolationThreshold;
    box_cmd->add_option("--points", b_points, "Points CSV to classify")->check(CLI::ExistingFile);
    box_cmd->add_option("--K", b_K, "Box side")->capture_default_str();
    box_cmd->add_option("--c2", b_c2, "Density bound (default: 2 x intensity)");
    box_cmd->add_option("--n", b_n, "Creek-crossing hop bound")->capture_default_str();
    box_cmd->add_option("--sweep", b_sweep, "Box sides for a good-density sweep")->delimiter(',');
    box_cmd->add_option("--samples", b_samples, "Samples per sweep point")->capture_default_str();
    box_cmd->add_option("--dim", b_dim, "Dimension for the sweep")->capture_default_str();
    box_cmd->add_option("--threshold", b_threshold, "Site percolation threshold for the verdict")
        ->capture_default_str();
    add_process_options(box_cmd, bp);

    // crossings
    auto* cross_cmd = app.add_subcommand("crossings", "Count disjoint LR-crossings");
    std::string x_grid;
    int x_N = 4, x_dim = 2;
    double x_p = -1.0;
    cross_cmd->add_option("--grid", x_grid, "Grid report JSON from 'boxes' (good boxes are open)")
        ->check(CLI::ExistingFile);
    cross_cmd->add_option("--N", x_N, "Rectangle half side")->capture_default_str();
    cross_cmd->add_option("--p", x_p, "Open probability for a random field instead of --grid");
    cross_cmd->add_option("--dim", x_dim, "Dimension of the random field")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const Rng master(g.seed);
        if (*sample_cmd) {
            const ProcessSpec spec = sp.spec();
            Rng r = master.child(kSample);
            const Window w = Window::cube(s_dim, s_window);
            PointConfig cfg = s_palm ? palm_version(spec, w, r) : sample(spec, w, r);
            cfg.seed = g.seed;
            const auto path = out_path(g, s_name);
            io::write_points(path, cfg, spec);
            log("wrote " + std::to_string(cfg.size()) + " points to " + path.string());
        } else if (*graph_cmd) {
            const GraphKind kind = parse_graph_kind(gr_type);
            if (kind == GraphKind::Creek && gr_n < 2) throw ParameterError("--n must be >= 2 for creek graphs");
            const PointConfig cfg = io::read_points(gr_points);
            const Graph graph = build_graph(cfg, kind, gr_n);
            const auto path = out_path(g, gr_name);
            io::write_graph(path, graph);
            log("wrote " + std::to_string(graph.n_edges()) + " edges to " + path.string());
        } else if (*walk_cmd) {
            const PointConfig cfg = io::read_points(w_points);
            const Graph graph = io::read_graph(w_edges, cfg.size());
            if (w_start >= cfg.size()) throw ParameterError("--start out of range");
            Rng r = master.child(kWalk);
            std::optional<Window> inner;
            if (w_inner > 0.0) inner = Window::cube(cfg.dim, w_inner);
            const WalkPath path = simulate_vsrw(graph, cfg, w_start, w_time, r, inner ? &*inner : nullptr);
            const auto out = out_path(g, w_name);
            io::write_text(out, io::walk_csv(path, cfg));
            io::write_json(io::sidecar(out), io::walk_meta(path));
            log("wrote " + std::to_string(path.jumps.size()) + " jump records to " + out.string());
        } else if (*sig_cmd) {
            const GraphKind kind = parse_graph_kind(sg_type);
            const ProcessSpec spec = kind == GraphKind::Lattice ? ProcessSpec{} : sgp.spec();
            if (kind == GraphKind::Creek && sg_n < 2) throw ParameterError("--n must be >= 2 for creek graphs");
            const auto times = time_grid(sg_dt, sg_tmax);
            AnnealedOptions opt;
            opt.boundary = sg_boundary == "growing" ? BoundaryMode::Growing : BoundaryMode::Censored;
            opt.workers = g.workers;
            const Window w = Window::cube(sg_dim, sg_window);
            const Rng r = master.child(kSigma2);
            log("running " + std::to_string(sg_configs) + " x " + std::to_string(sg_walks) + " walks");
            const MsdCurve curve = annealed_msd(spec, kind, sg_n, times, sg_configs, sg_walks, w, r.child(0), opt);
            const double t0 = sg_t0 > 0.0 ? sg_t0 : sg_tmax / 10.0;
            const double t1 = sg_t1 > 0.0 ? sg_t1 : sg_tmax / 2.0;
            const Sigma2Fit fit = fit_sigma2(curve, t0, t1);
            Json rep = io::sigma2_report(fit);
            rep["process"] = to_string(spec.kind);
            rep["graph"] = to_string(kind);
            rep["configs"] = sg_configs;
            rep["walks"] = sg_walks;
            rep["mean_jumps"] = curve.mean_jumps;
            rep["resampled_configs"] = curve.resampled_configs;
            if (sg_dim >= 2) {
                const IsotropyReport iso = isotropy_check(curve, t0, t1);
                Json pairs = Json::array();
                for (const auto& p : iso.pairs)
                    pairs.push_back({{"axes", {p.a, p.b}},
                                     {"difference", p.difference},
                                     {"combined_stderr", p.combined_se},
                                     {"statistic", p.statistic},
                                     {"cross_slope", p.cross_slope}});
                rep["isotropy"] = {{"pairs", pairs}, {"max_statistic", iso.max_statistic}, {"pass", iso.pass}};
            }
            if (sg_ks_time > 0.0) {
                const GaussianityReport ks =
                    gaussianity_check(spec, kind, sg_n, sg_ks_time, sg_ks_samples, w, r.child(1), opt);
                rep["gaussianity"] = {{"t", sg_ks_time},
                                      {"ks_statistic", ks.ks.statistic},
                                      {"p_value", ks.ks.p_value},
                                      {"n", ks.ks.n},
                                      {"pass", ks.passes()}};
            }
            io::write_text(out_path(g, "msd.csv"), io::msd_csv(curve));
            io::write_json(out_path(g, "sigma2.json"), rep);
            log("pooled sigma^2 = " + io::format_double(fit.pooled) + " +- " + io::format_double(fit.pooled_se));
        } else if (*cond_cmd) {
            Json rep;
            if (!c_network.empty()) {
                const ResistorNetwork net = io::read_network(c_network);
                const ConductanceResult res = effective_conductance(net);
                const Json header = io::read_json(io::sidecar(c_network));
                const int N = header.value("N", 0);
                double D = 0.0;
                const auto n_nodes = header.value("n_identified_nodes", net.n_nodes);
                if (N > 0) D = 8.0 * N * N * res.kappa / static_cast<double>(n_nodes);
                rep = io::conductance_report(res, D);
            } else {
                if (c_points.empty()) throw ParameterError("give --network or --points");
                if (c_N <= 0 || !(c_rc > 0.0)) throw ParameterError("--N and --rc are required with --points");
                const PointConfig cfg = io::read_points(c_points);
                const GraphKind kind = parse_graph_kind(c_type);
                const Graph graph = c_edges.empty() ? build_graph(cfg, kind, c_n) : io::read_graph(c_edges, cfg.size());
                const PeriodizedNetwork net = build_periodized(cfg, graph, c_N, c_rc);
                const ConductanceResult res = effective_conductance(net.base);
                const double D = diffusion_from_conductance(net, res.kappa);
                rep = io::conductance_report(res, D);
                rep["n_identified_nodes"] = net.n_identified_nodes();
                rep["n_interior_edges"] = net.n_interior_edges;
                rep["empty_slab"] = net.empty_slab;
                if (c_write_net) io::write_network(out_path(g, "network.csv"), net.base, c_N, c_rc, net.n_identified_nodes());
                if (c_msd) {
                    const Estimate e = msd_on_network(net, c_time, c_samples, master.child(kNetwork), g.workers);
                    rep["msd_check"] = {{"t", c_time},
                                        {"samples", c_samples},
                                        {"slope", e.value},
                                        {"stderr", e.se},
                                        {"relative_difference", D > 0.0 ? (e.value - D) / D : 0.0}};
                }
            }
            io::write_json(out_path(g, "conductance.json"), rep);
            log("kappa = " + io::format_double(rep["kappa"].get<double>()));
        } else if (*box_cmd) {
            if (!b_sweep.empty()) {
                const ProcessSpec spec = bp.spec();
                const double c2 = b_c2 > 0.0 ? b_c2 : default_c2(spec, b_dim);
                std::vector<GoodDensity> res;
                const Rng r = master.child(kBoxes);
                for (std::size_t i = 0; i < b_sweep.size(); ++i) {
                    res.push_back(empirical_good_density(spec, b_sweep[i], b_n, c2, b_samples, r.child(i), b_dim,
                                                         g.workers, b_threshold));
                    log("K = " + io::format_double(b_sweep[i]) + ": p_hat = " + io::format_double(res.back().p_hat));
                }
                io::write_text(out_path(g, "sweep.csv"), io::sweep_csv(b_sweep, res));
                Json meta = {{"c2", c2}, {"n", b_n}, {"samples", b_samples}, {"threshold", b_threshold}};
                io::write_json(out_path(g, "sweep.json"), meta);
            } else {
                if (b_points.empty()) throw ParameterError("give --points or --sweep");
                if (b_n < 2) throw ParameterError("--n must be >= 2");
                const PointConfig cfg = io::read_points(b_points);
                const double c2 = b_c2 > 0.0 ? b_c2 : 2.0 * static_cast<double>(cfg.size()) / cfg.window.volume();
                BoxGrid grid = classify_nice(cfg, b_K, c2);
                classify_good(cfg, grid, creek_crossing(cfg, b_n), g.workers);
                io::write_json(out_path(g, "grid.json"), io::grid_report(grid));
                std::size_t n_good = 0;
                for (char c : grid.good) n_good += c != 0;
                log(std::to_string(n_good) + " of " + std::to_string(grid.n_boxes()) + " boxes are good");
            }
        } else if (*cross_cmd) {
            SiteField field;
            if (!x_grid.empty()) {
                const Json j = io::read_json(x_grid);
                BoxGrid grid;
                try {
                    const auto& boxes = j.at("boxes");
                    if (boxes.empty()) throw FormatError("grid report has no boxes");
                    grid.dim = static_cast<int>(boxes[0].at("z").size());
                    grid.z_lo.assign(grid.dim, INT64_MAX);
                    grid.z_hi.assign(grid.dim, INT64_MIN);
                    for (const auto& b : boxes) {
                        const auto z = b.at("z").get<std::vector<std::int64_t>>();
                        for (int k = 0; k < grid.dim; ++k) {
                            grid.z_lo[k] = std::min(grid.z_lo[k], z[k]);
                            grid.z_hi[k] = std::max(grid.z_hi[k], z[k]);
                        }
                    }
                    grid.good.assign(boxes.size(), 0);
                    for (const auto& b : boxes)
                        grid.good[grid.index(b.at("z").get<std::vector<std::int64_t>>())] = b.at("good").get<bool>();
                } catch (const nlohmann::json::exception& e) {
                    throw FormatError(x_grid + ": " + e.what());
                }
                field = good_site_field(grid, x_N);
            } else {
                if (!(x_p >= 0.0 && x_p <= 1.0)) throw ParameterError("give --grid or --p in [0, 1]");
                field = SiteField(crossing_rectangle_dims(x_dim, x_N));
                Rng r = master.child(kCrossings);
                for (auto& o : field.open) o = r.uniform_open() < x_p ? 1 : 0;
            }
            const CrossingReport rep = lr_crossings(field, x_N);
            io::write_json(out_path(g, "crossings.json"), io::crossing_report(rep));
            log(std::to_string(rep.total) + " disjoint LR-crossings");
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "geowalk: usage error: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "geowalk: parameter error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "geowalk: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
