#include "afreg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "afreg/error.hpp"

namespace afreg::stats {

std::size_t count_runs(const std::vector<bool>& seq) {
    if (seq.empty()) return 0;
    std::size_t runs = 1;
    for (std::size_t i = 1; i < seq.size(); ++i) {
        if (seq[i] != seq[i - 1]) ++runs;
    }
    return runs;
}

RunsTestResult runs_test(const std::vector<bool>& seq) {
    RunsTestResult r;
    r.runs = count_runs(seq);
    r.n1 = static_cast<std::size_t>(std::count(seq.begin(), seq.end(), true));
    r.n2 = seq.size() - r.n1;
    if (r.n1 == 0 || r.n2 == 0) fail(ErrorCode::Degenerate, "runs test needs both labels");

    const double n1 = static_cast<double>(r.n1);
    const double n2 = static_cast<double>(r.n2);
    const double n = n1 + n2;
    const double mean = 1.0 + 2.0 * n1 * n2 / n;
    const double var = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n) / (n * n * (n - 1.0));
    if (!(var > 0.0)) {
        r.z = 0.0;
        r.p_value = 1.0;
        return r;
    }
    r.z = (static_cast<double>(r.runs) - mean) / std::sqrt(var);
    r.p_value = std::clamp(std::erfc(std::abs(r.z) / std::numbers::sqrt2), 0.0, 1.0);
    return r;
}

double normal_quantile_two_sided(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        fail(ErrorCode::InvalidArgument, fmt::format("confidence {} outside (0, 1)", confidence));
    }
    const boost::math::normal_distribution<double> unit;
    return boost::math::quantile(unit, 0.5 + confidence / 2.0);
}

Interval wilson_interval(std::size_t successes, std::size_t n, double confidence) {
    if (n == 0 || successes > n) fail(ErrorCode::InvalidCounts, fmt::format("{} successes out of {}", successes, n));
    const double z = normal_quantile_two_sided(confidence);
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    Interval out{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    if (successes == 0) out.lo = 0.0;
    if (successes == n) out.hi = 1.0;
    return out;
}

double aic(double loglik, int k) { return 2.0 * static_cast<double>(k) - 2.0 * loglik; }

GaussianFit gaussian_loglik(const Eigen::VectorXd& errors) {
    if (errors.size() < 2) fail(ErrorCode::TooFew, "need at least two errors");
    const double n = static_cast<double>(errors.size());
    const double var = errors.squaredNorm() / n;
    if (!(var > 0.0)) fail(ErrorCode::Degenerate, "all errors are zero");
    return {-0.5 * n * (std::log(2.0 * std::numbers::pi * var) + 1.0), 1};
}

}  // namespace afreg::stats
