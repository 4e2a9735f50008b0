#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geowalk/graph.hpp"
#include "geowalk/point_process.hpp"
#include "geowalk/rng.hpp"

namespace geowalk {

struct ResistorEdge {
    std::uint32_t i = 0, j = 0;
    double c = 0.0;
};

/// Weighted undirected network with two disjoint electrode node sets.
struct ResistorNetwork {
    std::size_t n_nodes = 0;
    std::vector<ResistorEdge> edges;
    std::vector<std::uint32_t> source;
    std::vector<std::uint32_t> sink;

    void validate() const;
};

struct ConductanceResult {
    double kappa = 0.0;
    double residual = 0.0;  // relative residual of the reduced Laplacian solve
    std::size_t iterations = 0;
    bool converged = true;
    bool disconnected = false;  // no component holds both a source and a sink node
    double source_current = 0.0;
    double sink_current = 0.0;
    std::vector<double> potential;  // per node; 0 on the source set, 1 on the sink set
};

/// Effective conductance between the source set (potential 0) and the sink
/// set (potential 1), via Jacobi-preconditioned conjugate gradient.
ConductanceResult effective_conductance(const ResistorNetwork& net, double tol = 1e-10);

/// Sum over edges of c (g_j - g_i)^2.
double dirichlet_energy(const ResistorNetwork& net, const std::vector<double>& potential);

/// Conductance by repeated series and parallel reductions; nullopt when the
/// network does not reduce to a single source-sink edge.
std::optional<double> series_parallel_oracle(const ResistorNetwork& net);

/// Periodized medium on the cube [-N, N]^d. Node layout of `base` (the
/// merged network): interior points 0..m-1, then the source electrode m and
/// the sink electrode m+1, each joined with conductance 1 to every point of
/// its slab. This has the same effective conductance as the network with
/// #Gamma electrode copies per face and conductance 1/#Gamma per slab edge.
struct PeriodizedNetwork {
    int dim = 0;
    int N = 0;
    double r_c = 0.0;
    std::size_t n_gamma = 0;  // (2N-1)^(d-1) lattice points per face
    ResistorNetwork base;
    std::vector<std::uint32_t> point_index;  // interior node -> config index
    std::vector<double> x1;                  // first coordinate per interior node
    std::vector<std::uint32_t> slab_minus;   // x1 in (-N, -N + r_c]
    std::vector<std::uint32_t> slab_plus;    // x1 in [N - r_c, N)
    std::size_t n_interior_edges = 0;
    bool empty_slab = false;

    std::size_t n_interior() const { return point_index.size(); }
    std::uint32_t source_node() const { return static_cast<std::uint32_t>(n_interior()); }
    std::uint32_t sink_node() const { return static_cast<std::uint32_t>(n_interior() + 1); }
    /// #V: interior points plus one face of identified electrodes.
    std::size_t n_identified_nodes() const { return n_interior() + n_gamma; }
    /// Winding increment along axis 1 for the ordered pair (a, b) of base nodes.
    double d1(std::uint32_t a, std::uint32_t b) const;
    const ResistorNetwork& to_merged_network() const { return base; }
    /// Network with explicit electrode copies (m + 2 #Gamma nodes).
    ResistorNetwork to_full_network() const;
};

/// Requires integer N > 2 r_c so the two slabs are disjoint, and a config
/// window covering [-N, N]^d.
PeriodizedNetwork build_periodized(const PointConfig& config, const Graph& graph, int N, double r_c);
PeriodizedNetwork build_periodized(const PointConfig& config, GraphKind kind, int N, double r_c, int n_param = 2);

/// 8 N^2 kappa / #V
double diffusion_from_conductance(const PeriodizedNetwork& net, double kappa);

/// (1/t) E[(X_t)^2] for the winding X_t along axis 1 of the walk started
/// from the uniform distribution on the identified network.
Estimate msd_on_network(const PeriodizedNetwork& net, double t, std::size_t n_samples, const Rng& rng,
                        int workers = 1);

/// Sum of 1/length over base-network paths from the source electrode to the
/// sink electrode that share no node except the electrodes. The bound is
/// checked against `kappa` (solved here when not supplied).
double crossing_lower_bound(const PeriodizedNetwork& net, const std::vector<std::vector<std::uint32_t>>& paths,
                            std::optional<double> kappa = std::nullopt);

}  // namespace geowalk
