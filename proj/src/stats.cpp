#include "geowalk/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geowalk/error.hpp"

namespace geowalk::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double poisson_upper_tail(std::int64_t k, double mean) {
    if (k <= 0) return 1.0;
    return boost::math::gamma_p(static_cast<double>(k), mean);
}

double poisson_pmf(std::int64_t k, double mean) {
    if (k < 0) return 0.0;
    return std::exp(static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0));
}

double kolmogorov_pvalue(double d, std::size_t n) {
    const double rn = std::sqrt(static_cast<double>(n));
    const double lambda = (rn + 0.12 + 0.11 / rn) * d;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

TestResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw ParameterError("KS test needs samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, kolmogorov_pvalue(d, samples.size()), samples.size()};
}

double chi2_upper_tail(double x, double dof) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

TestResult chi2_test(const std::vector<double>& observed, const std::vector<double>& expected, int fitted_params) {
    if (observed.size() != expected.size() || observed.size() < 2) throw ParameterError("chi2 test needs >= 2 matching cells");
    double total = 0.0;
    for (double o : observed) total += o;
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = expected[i] * total;
        if (e <= 0.0) throw ParameterError("chi2 expected count must be positive");
        stat += (observed[i] - e) * (observed[i] - e) / e;
    }
    const double dof = static_cast<double>(observed.size()) - 1.0 - fitted_params;
    return {stat, chi2_upper_tail(stat, dof), static_cast<std::size_t>(total)};
}

double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

}  // namespace geowalk::stats
