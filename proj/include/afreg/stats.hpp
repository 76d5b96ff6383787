#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace afreg::stats {

struct RunsTestResult {
    std::size_t runs = 0;
    std::size_t n1 = 0;  // count of true labels
    std::size_t n2 = 0;  // count of false labels
    double z = 0.0;
    double p_value = 1.0;  // two-sided normal approximation, no continuity correction
};

/// Wald-Wolfowitz runs test on a binary sequence. Throws Degenerate when only one label occurs.
RunsTestResult runs_test(const std::vector<bool>& seq);

/// Maximal constant blocks; 0 for an empty sequence.
std::size_t count_runs(const std::vector<bool>& seq);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Two-sided standard normal quantile for a central confidence level, e.g. 0.95 -> 1.959964.
double normal_quantile_two_sided(double confidence);

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t n, double confidence);

/// 2k - 2 loglik
double aic(double loglik, int k);

struct GaussianFit {
    double loglik = 0.0;
    int k_variance_params = 1;
};

/// Zero-mean Gaussian likelihood of the errors at the MLE variance mean(e^2).
GaussianFit gaussian_loglik(const Eigen::VectorXd& errors);

}  // namespace afreg::stats
