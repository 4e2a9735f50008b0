#pragma once

// Coarse-graining of a configuration into side-K boxes. A box is nice when
// it is not overcrowded and every one of its alpha_d^d sub-boxes is
// occupied; it is good when, in addition, the local G_n connectivity events
// hold along the segments to its axis neighbours. Good boxes behave like
// open sites of a site percolation field, whose disjoint left-right
// crossings translate into disjoint electrode-to-electrode graph paths.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geowalk/graph.hpp"
#include "geowalk/point_process.hpp"
#include "geowalk/resistor_network.hpp"
#include "geowalk/rng.hpp"

namespace geowalk {

/// Site percolation threshold of Z^2 (numerical estimate from the literature).
inline constexpr double kSitePercolationThreshold = 0.592746;

/// Sub-boxes per axis: 4 ceil(sqrt d) + 5.
int alpha_d(int dim);
/// Connectivity events per neighbour direction: 2 ceil(sqrt d) + 3.
int segment_events(int dim);
/// 2 x the mean number of points per unit volume.
double default_c2(const ProcessSpec& spec, int dim);

struct BoxGrid {
    int dim = 0;
    double K = 0.0;
    double c2 = 0.0;
    int n_param = 0;                    // creek parameter used for goodness, 0 before classify_good
    std::vector<std::int64_t> z_lo, z_hi;  // inclusive lattice bounds per axis
    std::vector<char> nice;
    std::vector<char> good;
    std::vector<char> evaluable;        // all axis-neighbour boxes lie inside the window
    std::vector<std::int64_t> ref_vertex;  // -1 unless good
    std::vector<std::uint32_t> counts;  // points per box

    double sub_side() const { return K / alpha_d(dim); }
    std::size_t n_boxes() const { return nice.size(); }
    bool in_range(std::span<const std::int64_t> z) const;
    std::size_t index(std::span<const std::int64_t> z) const;
    std::vector<std::int64_t> z_of(std::size_t index) const;
    bool is_good(std::span<const std::int64_t> z) const { return in_range(z) && good[index(z)] != 0; }
    /// Closed box K z + [-K/2, K/2]^d.
    Window box(std::span<const std::int64_t> z) const;
};

/// Nice classification over every box contained in the config window.
BoxGrid classify_nice(const PointConfig& config, double K, double c2);
/// Same over an explicit inclusive lattice range.
BoxGrid classify_nice(const PointConfig& config, double K, double c2, std::vector<std::int64_t> z_lo,
                      std::vector<std::int64_t> z_hi);

/// Adds goodness for G_n (the supplied graph must be creek_crossing(config, n)).
/// Boxes whose axis neighbours are not inside the window stay not good.
void classify_good(const PointConfig& config, BoxGrid& grid, const Graph& graph, int workers = 1);
BoxGrid classify_good(const PointConfig& config, const BoxGrid& grid, int n);

/// Event A at center c: all vertices in c + [-h, h]^d are joined by graph paths
/// inside c + [-2h, 2h]^d, with h = (1 + sqrt d) s.
bool local_connectivity_event(const PointConfig& config, const KdTree& tree, const Graph& graph, const double* c,
                              double h);

/// Voronoi nucleus of K z; the box must be good.
std::uint32_t reference_vertex(const PointConfig& config, const BoxGrid& grid, std::span<const std::int64_t> z);

/// Simple G_n path from ref_vertex(z1) to ref_vertex(z2) inside B_z1 u B_z2
/// with at most 2 c2 K^d edges. Returned as a vertex sequence (a single
/// vertex when both reference vertices coincide).
std::vector<std::uint32_t> connect_neighbors(const PointConfig& config, const BoxGrid& grid, const Graph& graph,
                                             std::span<const std::int64_t> z1, std::span<const std::int64_t> z2);

/// Boolean site field, axis 0 varying fastest.
struct SiteField {
    std::vector<int> dims;
    std::vector<char> open;

    SiteField() = default;
    explicit SiteField(std::vector<int> dims_, char value = 0);
    std::size_t size() const { return open.size(); }
    std::size_t index(std::span<const int> site) const;
    void validate() const;
};

/// Sites of R_{2N,2(N-1)}: extent 2N+1 along axis 0 and 2N-1 along the others.
std::vector<int> crossing_rectangle_dims(int dim, int N);

struct CrossingReport {
    int N = 0;
    std::vector<std::size_t> per_slice_counts;  // slices ordered by axes 2..d-1, axis 2 fastest
    std::size_t total = 0;
    /// Disjoint crossings, each a list of sites (full coordinates).
    std::vector<std::vector<std::vector<int>>> crossings;
};

/// Maximum number of vertex-disjoint open left-right crossings per 2-d slice
/// (axes 0 and 1), summed over slices. Crossings start in the first column,
/// end in the last and pass only through interior columns in between.
CrossingReport lr_crossings(const SiteField& field, int N);
std::size_t count_disjoint_lr_crossings(const SiteField& field, int N);

/// Goodness of the boxes z in [-N, N] x [-N+1, N-1]^(d-1).
SiteField good_site_field(const BoxGrid& grid, int N);

/// Graph path through the reference vertices of the boxes z_2 .. z_{k-1} of a
/// lattice crossing, with loops removed.
std::vector<std::uint32_t> crossing_graph_path(const PointConfig& config, const BoxGrid& grid, const Graph& graph,
                                               const std::vector<std::vector<int>>& crossing, int N);

/// Electrode-to-electrode path in the periodized network: the graph path is
/// cut to run from its last vertex in the left slab to the first following
/// vertex in the right slab. nullopt if it never reaches both slabs or
/// leaves the interior.
std::optional<std::vector<std::uint32_t>> to_network_path(const PeriodizedNetwork& net,
                                                          const std::vector<std::uint32_t>& graph_path);

struct GoodDensity {
    double p_hat = 0.0;
    double se = 0.0;
    double threshold = kSitePercolationThreshold;
    bool above_threshold = false;
    double c2 = 0.0;
    double nice_fraction = 0.0;
};

/// Monte Carlo estimate of P[B_0 is good] for G_n; samples the process on
/// [-2K, 2K]^d. An indication only, not a proof of domination.
GoodDensity empirical_good_density(const ProcessSpec& spec, double K, int n, double c2, std::size_t n_samples,
                                   const Rng& rng, int dim = 2, int workers = 1,
                                   double threshold = kSitePercolationThreshold);

}  // namespace geowalk
