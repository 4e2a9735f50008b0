#include "geowalk/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "geowalk/error.hpp"

namespace geowalk::io {

std::string format_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

std::filesystem::path sidecar(const std::filesystem::path& csv) {
    auto p = csv;
    p.replace_extension(".json");
    return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const std::filesystem::path& path) {
    try {
        return Json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    return s.substr(i);
}

void expect_header(const CsvTable& t, const std::vector<std::string>& cols, const std::string& what) {
    if (t.header.size() != cols.size())
        throw FormatError(what + ": expected " + std::to_string(cols.size()) + " columns, found " +
                          std::to_string(t.header.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
        if (t.header[k] != cols[k])
            throw FormatError(what + ": column " + std::to_string(k) + " is '" + t.header[k] + "', expected '" +
                              cols[k] + "'");
}

std::uint32_t as_index(double v, const std::string& what, std::size_t row, const std::string& col) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 4294967295.0)
        throw FormatError(what + ": row " + std::to_string(row + 1) + " column '" + col + "' is not an index");
    return static_cast<std::uint32_t>(v);
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& what) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(what + ": empty file");
    for (auto& h : split(line)) t.header.push_back(trim(h));
    std::size_t row = 0;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size())
            throw FormatError(what + ": row " + std::to_string(row + 1) + " has " + std::to_string(cells.size()) +
                              " fields, header has " + std::to_string(t.header.size()));
        std::vector<double> vals(cells.size());
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const std::string c = trim(cells[k]);
            const auto r = std::from_chars(c.data(), c.data() + c.size(), vals[k]);
            if (r.ec != std::errc() || r.ptr != c.data() + c.size())
                throw FormatError(what + ": row " + std::to_string(row + 1) + " column '" + t.header[k] +
                                  "' is not a number: '" + c + "'");
        }
        t.rows.push_back(std::move(vals));
        ++row;
    }
    return t;
}

std::string points_csv(const PointConfig& config) {
    std::string s;
    for (int k = 0; k < config.dim; ++k) s += (k ? ",x" : "x") + std::to_string(k);
    s += "\n";
    for (std::size_t i = 0; i < config.size(); ++i) {
        for (int k = 0; k < config.dim; ++k) {
            if (k) s += ",";
            s += format_double(config.coord(i, k));
        }
        s += "\n";
    }
    return s;
}

Json points_meta(const PointConfig& config, const ProcessSpec& spec) {
    Json j;
    j["kind"] = to_string(spec.kind);
    j["lambda"] = spec.lambda;
    j["mu"] = spec.mu;
    j["R"] = spec.R;
    j["window"] = {{"lo", config.window.lo}, {"hi", config.window.hi}};
    j["seed"] = config.seed;
    j["palm"] = config.palm;
    j["dim"] = config.dim;
    j["n_points"] = config.size();
    return j;
}

void write_points(const std::filesystem::path& csv, const PointConfig& config, const ProcessSpec& spec) {
    write_text(csv, points_csv(config));
    write_json(sidecar(csv), points_meta(config, spec));
}

PointConfig parse_points_csv(const std::string& text) {
    const CsvTable t = parse_csv(text, "points CSV");
    const int d = static_cast<int>(t.header.size());
    if (d < 1) throw FormatError("points CSV: no coordinate columns");
    std::vector<std::string> cols;
    for (int k = 0; k < d; ++k) cols.push_back("x" + std::to_string(k));
    expect_header(t, cols, "points CSV");
    PointConfig cfg;
    cfg.dim = d;
    std::vector<double> lo(d, 0.0), hi(d, 0.0);
    for (const auto& r : t.rows) {
        cfg.push_back(r.data());
        for (int k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], r[k]);
            hi[k] = std::max(hi[k], r[k]);
        }
    }
    cfg.window = Window(lo, hi);
    return cfg;
}

PointConfig read_points(const std::filesystem::path& csv) {
    PointConfig cfg = parse_points_csv(read_text(csv));
    const auto meta = sidecar(csv);
    if (std::filesystem::exists(meta)) {
        const Json j = read_json(meta);
        try {
            if (j.contains("window")) {
                cfg.window = Window(j["window"]["lo"].get<std::vector<double>>(),
                                    j["window"]["hi"].get<std::vector<double>>());
                if (cfg.window.dim() != cfg.dim) throw FormatError(meta.string() + ": window dimension mismatch");
            }
            if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
            if (j.contains("palm")) cfg.palm = j["palm"].get<bool>();
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(meta.string() + ": " + e.what());
        }
    }
    return cfg;
}

std::string edges_csv(const Graph& graph) {
    std::string s = "i,j\n";
    for (const auto& [a, b] : graph.edges()) s += std::to_string(a) + "," + std::to_string(b) + "\n";
    return s;
}

Json graph_meta(const Graph& graph) {
    Json j;
    j["kind"] = to_string(graph.kind());
    j["n"] = graph.n_param();
    j["n_vertices"] = graph.n_vertices();
    j["n_edges"] = graph.n_edges();
    return j;
}

void write_graph(const std::filesystem::path& csv, const Graph& graph) {
    write_text(csv, edges_csv(graph));
    write_json(sidecar(csv), graph_meta(graph));
}

std::vector<Edge> parse_edges_csv(const std::string& text) {
    const CsvTable t = parse_csv(text, "edges CSV");
    expect_header(t, {"i", "j"}, "edges CSV");
    std::vector<Edge> edges;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto a = as_index(t.rows[r][0], "edges CSV", r, "i");
        const auto b = as_index(t.rows[r][1], "edges CSV", r, "j");
        if (a >= b) throw FormatError("edges CSV: row " + std::to_string(r + 1) + " needs i < j");
        edges.push_back({a, b});
    }
    return edges;
}

Graph read_graph(const std::filesystem::path& csv, std::size_t n_vertices) {
    auto edges = parse_edges_csv(read_text(csv));
    for (const auto& [a, b] : edges)
        if (b >= n_vertices) throw FormatError("edges CSV: vertex " + std::to_string(b) + " out of range");
    GraphKind kind = GraphKind::Loaded;
    int n = 0;
    const auto meta = sidecar(csv);
    if (std::filesystem::exists(meta)) {
        const Json j = read_json(meta);
        if (j.contains("kind")) kind = parse_graph_kind(j["kind"].get<std::string>());
        if (j.contains("n")) n = j["n"].get<int>();
    }
    return Graph(n_vertices, std::move(edges), kind, n);
}

std::string walk_csv(const WalkPath& path, const PointConfig& config) {
    std::string s = "t,vertex";
    for (int k = 0; k < config.dim; ++k) s += ",x" + std::to_string(k);
    s += "\n";
    for (const auto& j : path.jumps) {
        s += format_double(j.time) + "," + std::to_string(j.vertex);
        for (int k = 0; k < config.dim; ++k) s += "," + format_double(config.coord(j.vertex, k));
        s += "\n";
    }
    return s;
}

Json walk_meta(const WalkPath& path) {
    Json j;
    j["start"] = path.start;
    j["t_end"] = path.t_end;
    j["n_jumps"] = path.jumps.empty() ? 0 : path.jumps.size() - 1;
    j["truncated"] = path.truncated;
    j["exit_time"] = path.truncated ? Json(path.exit_time) : Json(nullptr);
    return j;
}

std::string msd_csv(const MsdCurve& curve) {
    std::string s = "t";
    for (int k = 0; k < curve.dim; ++k) s += ",msd_x" + std::to_string(k);
    for (int k = 0; k < curve.dim; ++k) s += ",stderr_x" + std::to_string(k);
    s += ",count\n";
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        s += format_double(curve.times[i]);
        for (int k = 0; k < curve.dim; ++k) s += "," + format_double(curve.msd[k][i]);
        for (int k = 0; k < curve.dim; ++k) s += "," + format_double(curve.se[k][i]);
        s += "," + std::to_string(curve.counts[i]) + "\n";
    }
    return s;
}

Json sigma2_report(const Sigma2Fit& fit) {
    Json j;
    j["per_axis"] = fit.per_axis;
    j["per_axis_stderr"] = fit.per_axis_se;
    j["pooled"] = fit.pooled;
    j["stderr"] = fit.pooled_se;
    j["r2"] = fit.r2;
    j["r2_per_axis"] = fit.r2_per_axis;
    j["fit_window"] = {fit.t0, fit.t1};
    j["n_points"] = fit.n_points;
    j["censor_fraction"] = fit.censor_fraction;
    j["low_count"] = fit.low_count;
    j["degenerate"] = fit.degenerate;
    return j;
}

std::string network_csv(const ResistorNetwork& net) {
    std::string s = "i,j,c\n";
    for (const auto& e : net.edges)
        s += std::to_string(e.i) + "," + std::to_string(e.j) + "," + format_double(e.c) + "\n";
    return s;
}

Json network_header(const ResistorNetwork& net, int N, double r_c, std::size_t n_identified) {
    Json j;
    j["n_nodes"] = net.n_nodes;
    j["source"] = net.source;
    j["sink"] = net.sink;
    j["N"] = N;
    j["r_c"] = r_c;
    if (n_identified > 0) j["n_identified_nodes"] = n_identified;
    return j;
}

void write_network(const std::filesystem::path& csv, const ResistorNetwork& net, int N, double r_c,
                   std::size_t n_identified) {
    write_text(csv, network_csv(net));
    write_json(sidecar(csv), network_header(net, N, r_c, n_identified));
}

ResistorNetwork read_network(const std::filesystem::path& csv) {
    const CsvTable t = parse_csv(read_text(csv), "network CSV");
    expect_header(t, {"i", "j", "c"}, "network CSV");
    const auto meta = sidecar(csv);
    if (!std::filesystem::exists(meta)) throw FormatError("network header " + meta.string() + " is missing");
    const Json j = read_json(meta);
    ResistorNetwork net;
    try {
        net.n_nodes = j.at("n_nodes").get<std::size_t>();
        net.source = j.at("source").get<std::vector<std::uint32_t>>();
        net.sink = j.at("sink").get<std::vector<std::uint32_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(meta.string() + ": " + e.what());
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        net.edges.push_back({as_index(t.rows[r][0], "network CSV", r, "i"),
                             as_index(t.rows[r][1], "network CSV", r, "j"), t.rows[r][2]});
    try {
        net.validate();
    } catch (const ParameterError& e) {
        throw FormatError(std::string("network CSV: ") + e.what());
    }
    return net;
}

Json conductance_report(const ConductanceResult& res, double D_N) {
    Json j;
    j["kappa"] = res.kappa;
    j["residual"] = res.residual;
    j["iterations"] = res.iterations;
    j["D_N"] = D_N;
    j["converged"] = res.converged;
    j["disconnected"] = res.disconnected;
    j["source_current"] = res.source_current;
    j["sink_current"] = res.sink_current;
    return j;
}

Json grid_report(const BoxGrid& grid) {
    Json j;
    j["K"] = grid.K;
    j["c2"] = grid.c2;
    j["n"] = grid.n_param;
    j["sub_side"] = grid.sub_side();
    Json boxes = Json::array();
    for (std::size_t i = 0; i < grid.n_boxes(); ++i) {
        Json b;
        b["z"] = grid.z_of(i);
        b["nice"] = grid.nice[i] != 0;
        b["good"] = grid.good[i] != 0;
        b["ref_vertex"] = grid.ref_vertex[i] >= 0 ? Json(grid.ref_vertex[i]) : Json(nullptr);
        boxes.push_back(std::move(b));
    }
    j["boxes"] = std::move(boxes);
    return j;
}

Json crossing_report(const CrossingReport& rep) {
    Json j;
    j["N"] = rep.N;
    j["per_slice_counts"] = rep.per_slice_counts;
    j["total"] = rep.total;
    return j;
}

std::string sweep_csv(const std::vector<double>& K, const std::vector<GoodDensity>& results) {
    std::string s = "K,p_hat,stderr\n";
    for (std::size_t i = 0; i < K.size(); ++i)
        s += format_double(K[i]) + "," + format_double(results[i].p_hat) + "," + format_double(results[i].se) + "\n";
    return s;
}

}  // namespace geowalk::io
