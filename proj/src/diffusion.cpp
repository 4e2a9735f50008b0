#include "geowalk/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geowalk/error.hpp"
#include "geowalk/parallel.hpp"

namespace geowalk {

void MsdCurve::finalize() {
    const std::size_t T = times.size();
    const std::size_t C = cluster_n.size();
    const std::size_t P = n_pairs();
    msd.assign(dim, std::vector<double>(T, 0.0));
    se.assign(dim, std::vector<double>(T, 0.0));
    cross.assign(P, std::vector<double>(T, 0.0));
    cross_se.assign(P, std::vector<double>(T, 0.0));
    counts.assign(T, 0);
    std::vector<double> total(T, 0.0);
    for (const auto& n : cluster_n)
        for (std::size_t i = 0; i < T; ++i) total[i] += n[i];
    for (std::size_t i = 0; i < T; ++i) counts[i] = static_cast<std::size_t>(std::llround(total[i]));

    auto fill = [&](const std::vector<std::vector<double>>& sums, std::size_t row, std::vector<double>& mean,
                    std::vector<double>& err) {
        for (std::size_t i = 0; i < T; ++i) {
            if (total[i] <= 0.0) continue;
            double s = 0.0;
            for (std::size_t c = 0; c < C; ++c) s += sums[c][row * T + i];
            const double m = s / total[i];
            mean[i] = m;
            if (C < 2) continue;
            double v = 0.0;
            for (std::size_t c = 0; c < C; ++c) {
                const double r = sums[c][row * T + i] - cluster_n[c][i] * m;
                v += r * r;
            }
            err[i] = std::sqrt(v * static_cast<double>(C) / static_cast<double>(C - 1)) / total[i];
        }
    };
    for (int k = 0; k < dim; ++k) fill(cluster_sq, static_cast<std::size_t>(k), msd[k], se[k]);
    for (std::size_t p = 0; p < P; ++p) fill(cluster_cross, p, cross[p], cross_se[p]);
}

void MsdCurve::validate() const {
    const std::size_t T = times.size();
    for (std::size_t i = 1; i < T; ++i) {
        if (!(times[i] > times[i - 1])) throw InvariantViolation("MSD times must increase");
        if (counts[i] > counts[i - 1]) throw InvariantViolation("MSD counts must be non-increasing");
    }
    for (int k = 0; k < dim; ++k) {
        if (msd[k].size() != T || se[k].size() != T) throw InvariantViolation("MSD arrays are not congruent");
        for (std::size_t i = 0; i < T; ++i)
            if (msd[k][i] < 0.0 || se[k][i] < 0.0) throw InvariantViolation("MSD values must be nonnegative");
    }
}

namespace {

void check_times(const std::vector<double>& times) {
    if (times.empty()) throw ParameterError("time grid is empty");
    if (!(times[0] > 0.0)) throw ParameterError("time grid must be positive");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ParameterError("time grid must be increasing");
}

struct ClusterAccumulator {
    int dim;
    std::size_t T;
    std::vector<double> sq, cross, n;
    std::vector<double> last;  // most recent recorded displacement
    double jumps = 0.0;

    ClusterAccumulator(int d, std::size_t t)
        : dim(d), T(t), sq(static_cast<std::size_t>(d) * t, 0.0),
          cross(static_cast<std::size_t>(d * (d - 1) / 2) * t, 0.0), n(t, 0.0), last(d, 0.0) {}

    void add(std::size_t i, const double* x) {
        last.assign(x, x + dim);
        std::size_t p = 0;
        for (int a = 0; a < dim; ++a) {
            sq[a * T + i] += x[a] * x[a];
            for (int b = a + 1; b < dim; ++b) cross[(p++) * T + i] += x[a] * x[b];
        }
        n[i] += 1.0;
    }
};

MsdCurve assemble(int dim, const std::vector<double>& times, std::vector<ClusterAccumulator>& acc,
                  std::size_t n_replicas) {
    MsdCurve c;
    c.dim = dim;
    c.times = times;
    c.n_replicas = n_replicas;
    double jumps = 0.0;
    for (auto& a : acc) {
        c.cluster_sq.push_back(std::move(a.sq));
        c.cluster_cross.push_back(std::move(a.cross));
        c.cluster_n.push_back(std::move(a.n));
        jumps += a.jumps;
    }
    c.mean_jumps = n_replicas > 0 ? jumps / static_cast<double>(n_replicas) : 0.0;
    c.finalize();
    return c;
}

// Runs one VSRW from `start` over an environment exposing ensure/neighbors/point
// and records displacements at the grid times. `inside` returning false on a
// vertex censors the walk from the jump onto it. Returns the jump count.
template <class Env, class Inside>
std::size_t record_walk(Env& env, std::uint32_t start, int dim, const std::vector<double>& times, Rng& rng,
                        ClusterAccumulator& acc, Inside&& inside) {
    const std::size_t T = times.size();
    const double* origin = env.point(start);
    std::vector<double> x0(origin, origin + dim), disp(dim, 0.0);
    std::uint32_t v = start;
    double t = 0.0;
    std::size_t idx = 0, jumps = 0;
    while (idx < T) {
        env.ensure(v);
        const auto nb = env.neighbors(v);
        if (nb.empty()) throw InvariantViolation("walk reached an isolated vertex");
        const double t_next = t + rng.exponential(static_cast<double>(nb.size()));
        if (idx < T && times[idx] < t_next) {
            const double* p = env.point(v);
            for (int k = 0; k < dim; ++k) disp[k] = p[k] - x0[k];
            while (idx < T && times[idx] < t_next) acc.add(idx++, disp.data());
        }
        if (idx == T) break;
        v = nb[rng.below(nb.size())];
        t = t_next;
        ++jumps;
        if (!inside(v)) break;
    }
    return jumps;
}

struct FixedGraphEnv {
    const Graph& graph;
    const PointConfig& config;
    void ensure(std::uint32_t) const {}
    std::span<const std::uint32_t> neighbors(std::uint32_t v) const { return graph.neighbors(v); }
    const double* point(std::uint32_t v) const { return config.point(v); }
};

std::size_t record_lattice_walk(int dim, const std::vector<double>& times, Rng& rng, ClusterAccumulator& acc) {
    const std::size_t T = times.size();
    std::vector<double> pos(dim, 0.0);
    const double rate = 2.0 * dim;
    double t = 0.0;
    std::size_t idx = 0, jumps = 0;
    while (idx < T) {
        const double t_next = t + rng.exponential(rate);
        while (idx < T && times[idx] < t_next) acc.add(idx++, pos.data());
        if (idx == T) break;
        const auto move = rng.below(2 * static_cast<std::uint64_t>(dim));
        pos[move / 2] += (move % 2 == 0) ? 1.0 : -1.0;
        t = t_next;
        ++jumps;
    }
    return jumps;
}

double initial_half_width(const Window& w) {
    double h = 0.0;
    for (int k = 0; k < w.dim(); ++k) h = std::max({h, std::fabs(w.lo[k]), std::fabs(w.hi[k])});
    return h;
}

Window inner_window(const Window& w, double fraction) {
    Window in = w;
    for (int k = 0; k < w.dim(); ++k) {
        const double m = fraction * w.side(k);
        in.lo[k] += m;
        in.hi[k] -= m;
    }
    in.validate();
    return in;
}

// Palm sample plus graph, resampling degenerate draws.
std::pair<PointConfig, Graph> fixed_environment(const ProcessSpec& spec, GraphKind kind, int n_param,
                                                const Window& window, Rng& rng, std::size_t& resampled) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        PointConfig cfg = palm_version(spec, window, rng);
        try {
            Graph g = build_graph(cfg, kind, n_param);
            if (g.degree(0) > 0) return {std::move(cfg), std::move(g)};
        } catch (const DegenerateInputError&) {
        }
        ++resampled;
    }
    throw DegenerateInputError("could not draw a usable environment in 100 attempts");
}

}  // namespace

MsdCurve annealed_msd(const ProcessSpec& spec, GraphKind kind, int n_param, const std::vector<double>& times,
                      std::size_t n_configs, std::size_t n_walks, const Window& window, const Rng& rng,
                      const AnnealedOptions& options) {
    check_times(times);
    if (n_configs == 0 || n_walks == 0) throw ParameterError("n_configs and n_walks must be >= 1");
    window.validate();
    const int dim = window.dim();
    const std::size_t T = times.size();
    std::vector<ClusterAccumulator> acc(n_configs, ClusterAccumulator(dim, T));
    std::vector<std::size_t> resampled(n_configs, 0);

    if (kind == GraphKind::Lattice) {
        parallel_for(n_configs, options.workers, [&](std::size_t c) {
            const Rng cfg_rng = rng.child(c);
            for (std::size_t w = 0; w < n_walks; ++w) {
                Rng walk_rng = cfg_rng.child(1 + w);
                acc[c].jumps += static_cast<double>(record_lattice_walk(dim, times, walk_rng, acc[c]));
            }
        });
    } else if (options.boundary == BoundaryMode::Growing) {
        if (dim != 2) throw ParameterError("growing environments are planar");
        EnvironmentOptions env_opt = options.environment;
        env_opt.initial_half_width = initial_half_width(window);
        parallel_for(n_configs, options.workers, [&](std::size_t c) {
            const Rng cfg_rng = rng.child(c);
            Rng seed_rng = cfg_rng.child(0);
            GrowingEnvironment env(spec, kind, n_param, seed_rng(), env_opt);
            for (std::size_t w = 0; w < n_walks; ++w) {
                Rng walk_rng = cfg_rng.child(1 + w);
                acc[c].jumps += static_cast<double>(
                    record_walk(env, env.origin(), 2, times, walk_rng, acc[c], [](std::uint32_t) { return true; }));
            }
        });
    } else {
        const Window inner = inner_window(window, options.outer_margin_fraction);
        parallel_for(n_configs, options.workers, [&](std::size_t c) {
            const Rng cfg_rng = rng.child(c);
            Rng env_rng = cfg_rng.child(0);
            auto [cfg, graph] = fixed_environment(spec, kind, n_param, window, env_rng, resampled[c]);
            FixedGraphEnv env{graph, cfg};
            for (std::size_t w = 0; w < n_walks; ++w) {
                Rng walk_rng = cfg_rng.child(1 + w);
                acc[c].jumps += static_cast<double>(record_walk(env, 0, dim, times, walk_rng, acc[c], [&](std::uint32_t v) {
                    return inner.contains(cfg.point(v));
                }));
            }
        });
    }
    MsdCurve curve = assemble(dim, times, acc, n_configs * n_walks);
    for (auto r : resampled) curve.resampled_configs += r;
    return curve;
}

MsdCurve msd_on_graph(const Graph& graph, const PointConfig& config, std::uint32_t start,
                      const std::vector<double>& times, std::size_t n_walks, const Rng& rng, const Window* inner,
                      int workers) {
    check_times(times);
    if (start >= graph.n_vertices() || graph.degree(start) == 0) throw ParameterError("start must be a non-isolated vertex");
    const int dim = config.dim;
    std::vector<ClusterAccumulator> acc(n_walks, ClusterAccumulator(dim, times.size()));
    FixedGraphEnv env{graph, config};
    parallel_for(n_walks, workers, [&](std::size_t w) {
        Rng walk_rng = rng.child(w);
        acc[w].jumps = static_cast<double>(record_walk(env, start, dim, times, walk_rng, acc[w], [&](std::uint32_t v) {
            return inner == nullptr || inner->contains(config.point(v));
        }));
    });
    return assemble(dim, times, acc, n_walks);
}

MsdCurve curve_from_displacements(const std::vector<double>& times,
                                  const std::vector<std::vector<std::vector<double>>>& disp) {
    check_times(times);
    if (disp.empty()) throw ParameterError("no replicas");
    const int dim = static_cast<int>(disp[0].size());
    std::vector<ClusterAccumulator> acc(disp.size(), ClusterAccumulator(dim, times.size()));
    std::vector<double> x(dim);
    for (std::size_t r = 0; r < disp.size(); ++r)
        for (std::size_t i = 0; i < times.size(); ++i) {
            for (int k = 0; k < dim; ++k) x[k] = disp[r][k][i];
            acc[r].add(i, x.data());
        }
    return assemble(dim, times, acc, disp.size());
}

namespace {

struct LineFit {
    double slope = 0.0, se = 0.0, r2 = 0.0;
    std::vector<double> coef;  // slope = sum_i coef_i * y_i
    bool degenerate = false;
};

// Weighted least squares through the origin over the grid indices `idx`.
LineFit fit_origin(const std::vector<double>& t, const std::vector<double>& y, const std::vector<double>& se,
                   const std::vector<std::size_t>& idx) {
    LineFit f;
    bool weighted = true;
    for (auto i : idx) weighted = weighted && se[i] > 0.0;
    double stt = 0.0;
    for (auto i : idx) stt += (weighted ? 1.0 / (se[i] * se[i]) : 1.0) * t[i] * t[i];
    f.coef.resize(idx.size());
    double var = 0.0;
    bool all_zero = true;
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto i = idx[r];
        const double w = weighted ? 1.0 / (se[i] * se[i]) : 1.0;
        f.coef[r] = w * t[i] / stt;
        f.slope += f.coef[r] * y[i];
        var += f.coef[r] * f.coef[r] * se[i] * se[i];
        all_zero = all_zero && y[i] == 0.0;
    }
    f.se = std::sqrt(var);
    f.degenerate = all_zero;
    double ybar = 0.0;
    for (auto i : idx) ybar += y[i];
    ybar /= static_cast<double>(idx.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (auto i : idx) {
        ss_res += (y[i] - f.slope * t[i]) * (y[i] - f.slope * t[i]);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 && !all_zero ? 1.0 : 0.0);
    return f;
}

// Per-cluster contributions v_c with mean equal to the fitted slope, so that
// sd(v)/sqrt(C) is a cluster-robust standard error.
std::vector<double> cluster_contributions(const MsdCurve& curve, const std::vector<std::vector<double>>& sums,
                                          std::size_t row, const std::vector<std::size_t>& idx,
                                          const std::vector<double>& coef) {
    const std::size_t C = curve.cluster_n.size();
    const std::size_t T = curve.times.size();
    std::vector<double> v(C, 0.0);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const auto i = idx[r];
            const double n = static_cast<double>(curve.counts[i]);
            if (n > 0.0) v[c] += coef[r] * sums[c][row * T + i] * static_cast<double>(C) / n;
        }
    return v;
}

double se_of_mean(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    return std::sqrt(stats::variance(v) / static_cast<double>(v.size()));
}

std::vector<std::size_t> window_indices(const MsdCurve& curve, double t0, double t1) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        if (curve.times[i] >= t0 && curve.times[i] <= t1) idx.push_back(i);
    if (idx.size() < 3) throw ParameterError("fit window must contain at least 3 grid points");
    return idx;
}

}  // namespace

Sigma2Fit fit_sigma2(const MsdCurve& curve, double t0, double t1) {
    const auto idx = window_indices(curve, t0, t1);
    Sigma2Fit out;
    out.t0 = t0;
    out.t1 = t1;
    out.n_points = idx.size();
    const bool clustered = curve.cluster_n.size() >= 2;
    std::vector<std::vector<double>> contrib;
    std::vector<double> weights;
    out.degenerate = true;
    for (int k = 0; k < curve.dim; ++k) {
        const LineFit f = fit_origin(curve.times, curve.msd[k], curve.se[k], idx);
        out.per_axis.push_back(f.slope);
        out.r2_per_axis.push_back(f.r2);
        out.degenerate = out.degenerate && f.degenerate;
        if (clustered) {
            contrib.push_back(cluster_contributions(curve, curve.cluster_sq, static_cast<std::size_t>(k), idx, f.coef));
            out.per_axis_se.push_back(se_of_mean(contrib.back()));
        } else {
            out.per_axis_se.push_back(f.se);
        }
    }
    // Inverse-variance pooling across axes.
    bool use_inv = true;
    for (double s : out.per_axis_se) use_inv = use_inv && s > 0.0;
    double wsum = 0.0;
    for (int k = 0; k < curve.dim; ++k) {
        weights.push_back(use_inv ? 1.0 / (out.per_axis_se[k] * out.per_axis_se[k]) : 1.0);
        wsum += weights.back();
    }
    for (auto& w : weights) w /= wsum;
    for (int k = 0; k < curve.dim; ++k) out.pooled += weights[k] * out.per_axis[k];
    if (clustered) {
        std::vector<double> pooled(curve.cluster_n.size(), 0.0);
        for (int k = 0; k < curve.dim; ++k)
            for (std::size_t c = 0; c < pooled.size(); ++c) pooled[c] += weights[k] * contrib[k][c];
        out.pooled_se = se_of_mean(pooled);
    } else {
        double v = 0.0;
        for (int k = 0; k < curve.dim; ++k) v += weights[k] * weights[k] * out.per_axis_se[k] * out.per_axis_se[k];
        out.pooled_se = std::sqrt(v);
    }
    // r^2 of the axis-averaged curve against the pooled line.
    std::vector<double> avg(curve.times.size(), 0.0);
    for (std::size_t i = 0; i < avg.size(); ++i)
        for (int k = 0; k < curve.dim; ++k) avg[i] += weights[k] * curve.msd[k][i];
    {
        double ybar = 0.0;
        for (auto i : idx) ybar += avg[i];
        ybar /= static_cast<double>(idx.size());
        double ss_res = 0.0, ss_tot = 0.0;
        for (auto i : idx) {
            ss_res += (avg[i] - out.pooled * curve.times[i]) * (avg[i] - out.pooled * curve.times[i]);
            ss_tot += (avg[i] - ybar) * (avg[i] - ybar);
        }
        out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    }
    if (out.degenerate) {
        out.pooled = 0.0;
        out.pooled_se = 0.0;
    }
    for (auto i : idx) out.low_count = out.low_count || curve.counts[i] < 100;
    if (curve.n_replicas > 0)
        out.censor_fraction = 1.0 - static_cast<double>(curve.counts[idx.back()]) / static_cast<double>(curve.n_replicas);
    return out;
}

Sigma2Fit fit_sigma2(const MsdCurve& curve) {
    const double tmax = curve.times.back();
    return fit_sigma2(curve, tmax / 10.0, tmax / 2.0);
}

IsotropyReport isotropy_check(const MsdCurve& curve, double t0, double t1, double threshold) {
    if (curve.dim < 2) throw ParameterError("isotropy check needs d >= 2");
    const auto idx = window_indices(curve, t0, t1);
    const Sigma2Fit fit = fit_sigma2(curve, t0, t1);
    const bool clustered = curve.cluster_n.size() >= 2;
    IsotropyReport rep;
    rep.threshold = threshold;
    std::size_t p = 0;
    for (int a = 0; a < curve.dim; ++a)
        for (int b = a + 1; b < curve.dim; ++b, ++p) {
            AxisPair ap;
            ap.a = a;
            ap.b = b;
            ap.difference = fit.per_axis[a] - fit.per_axis[b];
            ap.combined_se = std::hypot(fit.per_axis_se[a], fit.per_axis_se[b]);
            if (ap.difference == 0.0) ap.statistic = 0.0;
            else if (ap.combined_se > 0.0) ap.statistic = std::fabs(ap.difference) / ap.combined_se;
            else ap.statistic = std::numeric_limits<double>::infinity();
            const LineFit cf = fit_origin(curve.times, curve.cross[p], curve.cross_se[p], idx);
            ap.cross_slope = cf.slope;
            ap.cross_se = cf.se;
            if (clustered) {
                const LineFit fa = fit_origin(curve.times, curve.msd[a], curve.se[a], idx);
                const LineFit fb = fit_origin(curve.times, curve.msd[b], curve.se[b], idx);
                auto va = cluster_contributions(curve, curve.cluster_sq, static_cast<std::size_t>(a), idx, fa.coef);
                const auto vb = cluster_contributions(curve, curve.cluster_sq, static_cast<std::size_t>(b), idx, fb.coef);
                for (std::size_t c = 0; c < va.size(); ++c) va[c] -= vb[c];
                ap.paired_se = se_of_mean(va);
                ap.cross_se = se_of_mean(cluster_contributions(curve, curve.cluster_cross, p, idx, cf.coef));
            }
            rep.max_statistic = std::max(rep.max_statistic, ap.statistic);
            rep.pairs.push_back(ap);
        }
    rep.pass = rep.max_statistic < threshold;
    return rep;
}

GaussianityReport gaussianity_from_samples(const std::vector<double>& samples) {
    GaussianityReport rep;
    if (samples.empty()) throw ParameterError("no samples");
    rep.sample_mean = stats::mean(samples);
    rep.sample_sd = std::sqrt(stats::variance(samples));
    rep.ks.n = samples.size();
    if (!(rep.sample_sd > 0.0)) {
        rep.degenerate = true;
        rep.ks.p_value = 0.0;
        return rep;
    }
    std::vector<double> z(samples.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = (samples[i] - rep.sample_mean) / rep.sample_sd;
    rep.ks = stats::ks_test(std::move(z), stats::normal_cdf);
    return rep;
}

GaussianityReport gaussianity_check(const ProcessSpec& spec, GraphKind kind, int n_param, double t,
                                    std::size_t n_samples, const Window& window, const Rng& rng,
                                    const AnnealedOptions& options) {
    if (n_samples == 0) throw ParameterError("n_samples must be >= 1");
    if (t <= 0.0) return gaussianity_from_samples(std::vector<double>(n_samples, 0.0));
    std::vector<double> x(n_samples, 0.0), jumps(n_samples, 0.0);
    const int dim = window.dim();
    const std::vector<double> grid{t};
    parallel_for(n_samples, options.workers, [&](std::size_t s) {
        const Rng cfg_rng = rng.child(s);
        Rng walk_rng = cfg_rng.child(1);
        ClusterAccumulator acc(dim, 1);
        if (kind == GraphKind::Lattice) {
            jumps[s] = static_cast<double>(record_lattice_walk(dim, grid, walk_rng, acc));
        } else if (options.boundary == BoundaryMode::Growing) {
            EnvironmentOptions env_opt = options.environment;
            env_opt.initial_half_width = initial_half_width(window);
            Rng seed_rng = cfg_rng.child(0);
            GrowingEnvironment env(spec, kind, n_param, seed_rng(), env_opt);
            jumps[s] = static_cast<double>(
                record_walk(env, env.origin(), 2, grid, walk_rng, acc, [](std::uint32_t) { return true; }));
        } else {
            std::size_t resampled = 0;
            Rng env_rng = cfg_rng.child(0);
            auto [cfg, graph] = fixed_environment(spec, kind, n_param, window, env_rng, resampled);
            FixedGraphEnv env{graph, cfg};
            jumps[s] = static_cast<double>(
                record_walk(env, 0, dim, grid, walk_rng, acc, [](std::uint32_t) { return true; }));
        }
        x[s] = acc.last[0];
    });
    GaussianityReport rep = gaussianity_from_samples(x);
    rep.mean_jumps = stats::mean(jumps);
    return rep;
}

LocalMoments local_drift_and_diffusivity(const Graph& graph, const PointConfig& config, std::uint32_t v) {
    if (v >= graph.n_vertices()) throw ParameterError("vertex out of range");
    const int d = config.dim;
    LocalMoments m;
    m.phi.assign(d, 0.0);
    m.psi.assign(static_cast<std::size_t>(d) * d, 0.0);
    const double* xv = config.point(v);
    for (auto w : graph.neighbors(v)) {
        const double* xw = config.point(w);
        for (int a = 0; a < d; ++a) {
            const double da = xw[a] - xv[a];
            m.phi[a] += da;
            for (int b = 0; b < d; ++b) m.psi[a * d + b] += da * (xw[b] - xv[b]);
        }
    }
    return m;
}

}  // namespace geowalk
