#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace geowalk::stats {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

double normal_cdf(double x);
/// P[Poisson(mean) >= k]
double poisson_upper_tail(std::int64_t k, double mean);
double poisson_pmf(std::int64_t k, double mean);

/// Asymptotic Kolmogorov distribution tail with Stephens' small-sample correction.
double kolmogorov_pvalue(double d, std::size_t n);

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
TestResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Pearson chi-square goodness of fit; `expected` are probabilities summing to 1.
/// Degrees of freedom = cells - 1 - fitted_params.
TestResult chi2_test(const std::vector<double>& observed, const std::vector<double>& expected, int fitted_params = 0);

/// Upper tail of the chi-square distribution.
double chi2_upper_tail(double x, double dof);

double mean(const std::vector<double>& x);
/// Unbiased sample variance.
double variance(const std::vector<double>& x);

}  // namespace geowalk::stats
