#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geowalk/geometry.hpp"
#include "geowalk/rng.hpp"

namespace geowalk {

enum class ProcessKind { PPP, MCP, MHP1, MHP2 };

std::string to_string(ProcessKind kind);
ProcessKind parse_process_kind(const std::string& name);

struct ProcessSpec {
    ProcessKind kind = ProcessKind::PPP;
    double lambda = 1.0;
    double mu = 0.0;  // daughter intensity, MCP only
    double R = 0.0;   // cluster / hardcore radius

    void validate() const;
    /// Radius of influence: how far outside a region points matter for the
    /// law inside it (R for MCP and MHP, 0 for PPP).
    double interaction_range() const { return kind == ProcessKind::PPP ? 0.0 : R; }
    /// Mean number of points per unit volume.
    double intensity(int dim) const;
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;  // standard error
};

PointConfig sample_ppp(double lambda, const Window& window, Rng& rng);
PointConfig sample_mcp(double lambda, double mu, double R, const Window& window, Rng& rng);
PointConfig sample_mhp1(double lambda, double R, const Window& window, Rng& rng);
PointConfig sample_mhp2(double lambda, double R, const Window& window, Rng& rng);
PointConfig sample(const ProcessSpec& spec, const Window& window, Rng& rng);

/// MCP daughters of the given parents (row-major), kept if inside the window.
PointConfig mcp_daughters(const std::vector<double>& parents, double mu, double R, const Window& window, Rng& rng);

/// Matern I thinning: keep[i] iff no other base point lies within distance R.
std::vector<char> mhp1_keep(const std::vector<double>& base, int dim, double R);
/// Matern II thinning: keep[i] iff marks[i] < marks[j] for every other j with |x_i - x_j| <= R.
std::vector<char> mhp2_keep(const std::vector<double>& base, const std::vector<double>& marks, int dim, double R);

/// Palm version: PPP adds the origin at index 0. MCP and MHP sample on the
/// enlarged window [-2A, 2A] (A = per-axis max |bound|), choose a point
/// uniformly among those in [-A, A] and translate it to the origin.
PointConfig palm_version(const ProcessSpec& spec, const Window& window, Rng& rng, int max_retries = 100);

/// Fraction of replicas whose cube [-L/2, L/2]^dim is empty.
Estimate estimate_void_probability(const ProcessSpec& spec, double L, int dim, std::size_t n_samples, Rng& rng,
                                   int workers = 1);
/// Fraction of replicas with at least c2*L^dim points in the cube [-L/2, L/2]^dim.
Estimate estimate_deviation_probability(const ProcessSpec& spec, double L, int dim, double c2,
                                        std::size_t n_samples, Rng& rng, int workers = 1);

/// Volume of B(x1, R) intersected with B(x2, R) at centre distance `dist`.
double ball_intersection_volume(int dim, double R, double dist);

/// Second factorial moment density of the Matern cluster process.
double mcp_second_moment_density(const double* x1, const double* x2, int dim, const ProcessSpec& spec);

}  // namespace geowalk
