#pragma once

#include <cstdint>
#include <vector>

#include "geowalk/environment.hpp"
#include "geowalk/graph.hpp"
#include "geowalk/point_process.hpp"
#include "geowalk/rng.hpp"
#include "geowalk/stats.hpp"

namespace geowalk {

/// Mean squared displacement per axis on a time grid. Replicas are grouped
/// into clusters (one per environment); cluster sums are kept so that
/// standard errors account for walks sharing an environment.
struct MsdCurve {
    int dim = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> msd;       // [axis][time]
    std::vector<std::vector<double>> se;        // [axis][time]
    std::vector<std::vector<double>> cross;     // [pair][time], pairs (a,b) with a < b in row-major order
    std::vector<std::vector<double>> cross_se;  // [pair][time]
    std::vector<std::size_t> counts;            // surviving replicas per time
    std::size_t n_replicas = 0;
    std::size_t resampled_configs = 0;          // environments rebuilt after a degenerate sample
    double mean_jumps = 0.0;                    // mean jump count by the last grid time

    // Cluster sums: [cluster][axis * T + i], [cluster][pair * T + i], [cluster][i].
    std::vector<std::vector<double>> cluster_sq;
    std::vector<std::vector<double>> cluster_cross;
    std::vector<std::vector<double>> cluster_n;

    std::size_t n_pairs() const { return static_cast<std::size_t>(dim * (dim - 1) / 2); }
    /// Recomputes means and standard errors from the cluster sums.
    void finalize();
    void validate() const;
};

enum class BoundaryMode {
    Growing,   // environment generated on demand; no censoring
    Censored,  // fixed Palm sample on the window; replicas stop at the inner-window exit
};

struct AnnealedOptions {
    BoundaryMode boundary = BoundaryMode::Growing;
    double outer_margin_fraction = 0.2;  // censored mode: inner window = window minus this fraction of the side on each face
    int workers = 1;
    EnvironmentOptions environment;      // growing mode; initial_half_width is taken from the window
};

/// Annealed MSD: n_configs Palm environments, n_walks VSRW replicas from the origin of each.
/// GraphKind::Lattice runs the walk on Z^d (window only sets the dimension).
MsdCurve annealed_msd(const ProcessSpec& spec, GraphKind kind, int n_param, const std::vector<double>& times,
                      std::size_t n_configs, std::size_t n_walks, const Window& window, const Rng& rng,
                      const AnnealedOptions& options = {});

/// MSD of n_walks walks on one fixed graph (each walk its own cluster).
MsdCurve msd_on_graph(const Graph& graph, const PointConfig& config, std::uint32_t start,
                      const std::vector<double>& times, std::size_t n_walks, const Rng& rng,
                      const Window* inner = nullptr, int workers = 1);

/// Builds a curve directly from per-replica displacements [replica][axis][time]
/// (each replica its own cluster); used for synthetic inputs.
MsdCurve curve_from_displacements(const std::vector<double>& times,
                                  const std::vector<std::vector<std::vector<double>>>& disp);

struct Sigma2Fit {
    std::vector<double> per_axis;
    std::vector<double> per_axis_se;
    std::vector<double> r2_per_axis;
    double pooled = 0.0;
    double pooled_se = 0.0;
    double r2 = 0.0;
    double t0 = 0.0, t1 = 0.0;
    std::size_t n_points = 0;
    bool low_count = false;   // some grid time in the window had < 100 replicas
    bool degenerate = false;  // curve identically zero in the window
    double censor_fraction = 0.0;
};

/// Weighted least squares of msd against t through the origin on [t0, t1].
Sigma2Fit fit_sigma2(const MsdCurve& curve, double t0, double t1);
/// Default window [t_max/10, t_max/2].
Sigma2Fit fit_sigma2(const MsdCurve& curve);

struct AxisPair {
    int a = 0, b = 0;
    double difference = 0.0;   // slope_a - slope_b
    double combined_se = 0.0;  // sqrt(se_a^2 + se_b^2)
    double statistic = 0.0;    // |difference| / combined_se
    double paired_se = 0.0;    // standard error of the difference over clusters
    double cross_slope = 0.0;  // E[X_a X_b] / t
    double cross_se = 0.0;
};

struct IsotropyReport {
    std::vector<AxisPair> pairs;
    double max_statistic = 0.0;
    double threshold = 3.0;
    bool pass = true;
};

IsotropyReport isotropy_check(const MsdCurve& curve, double t0, double t1, double threshold = 3.0);

struct GaussianityReport {
    stats::TestResult ks;
    double sample_mean = 0.0;
    double sample_sd = 0.0;
    double mean_jumps = 0.0;
    bool degenerate = false;
    bool passes(double alpha = 0.01) const { return !degenerate && ks.p_value > alpha; }
};

/// KS test of the standardized samples against N(0, 1).
GaussianityReport gaussianity_from_samples(const std::vector<double>& samples);

/// X_t . e_1 from one walk in each of n_samples independent Palm environments.
GaussianityReport gaussianity_check(const ProcessSpec& spec, GraphKind kind, int n_param, double t,
                                    std::size_t n_samples, const Window& window, const Rng& rng,
                                    const AnnealedOptions& options = {});

struct LocalMoments {
    std::vector<double> phi;  // sum over neighbours of (x - v)
    std::vector<double> psi;  // row-major d x d, sum of (x - v)(x - v)^T
};

LocalMoments local_drift_and_diffusivity(const Graph& graph, const PointConfig& config, std::uint32_t v);

}  // namespace geowalk
