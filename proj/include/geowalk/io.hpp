#pragma once

// File formats. Numbers are written with 17 significant digits so that
// every double survives a write/read round trip exactly.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "geowalk/diffusion.hpp"
#include "geowalk/graph.hpp"
#include "geowalk/percolation.hpp"
#include "geowalk/point_process.hpp"
#include "geowalk/random_walk.hpp"
#include "geowalk/resistor_network.hpp"

namespace geowalk::io {

using Json = nlohmann::ordered_json;

std::string format_double(double x);

/// Sidecar path: "points.csv" -> "points.json".
std::filesystem::path sidecar(const std::filesystem::path& csv);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// Parsed CSV: header plus numeric rows. Errors name the offending row or column.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable parse_csv(const std::string& text, const std::string& what);

std::string points_csv(const PointConfig& config);
Json points_meta(const PointConfig& config, const ProcessSpec& spec);
void write_points(const std::filesystem::path& csv, const PointConfig& config, const ProcessSpec& spec);
/// Reads the CSV and, when present, the window/seed/palm fields of its sidecar.
PointConfig read_points(const std::filesystem::path& csv);
PointConfig parse_points_csv(const std::string& text);

std::string edges_csv(const Graph& graph);
Json graph_meta(const Graph& graph);
void write_graph(const std::filesystem::path& csv, const Graph& graph);
Graph read_graph(const std::filesystem::path& csv, std::size_t n_vertices);
std::vector<Edge> parse_edges_csv(const std::string& text);

std::string walk_csv(const WalkPath& path, const PointConfig& config);
Json walk_meta(const WalkPath& path);

std::string msd_csv(const MsdCurve& curve);
Json sigma2_report(const Sigma2Fit& fit);

std::string network_csv(const ResistorNetwork& net);
/// n_identified: node count used for D_N when it differs from n_nodes (0: omit).
Json network_header(const ResistorNetwork& net, int N = 0, double r_c = 0.0, std::size_t n_identified = 0);
void write_network(const std::filesystem::path& csv, const ResistorNetwork& net, int N = 0, double r_c = 0.0,
                   std::size_t n_identified = 0);
ResistorNetwork read_network(const std::filesystem::path& csv);
Json conductance_report(const ConductanceResult& res, double D_N);

Json grid_report(const BoxGrid& grid);
Json crossing_report(const CrossingReport& rep);
std::string sweep_csv(const std::vector<double>& K, const std::vector<GoodDensity>& results);

}  // namespace geowalk::io
