#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "afreg/error.hpp"
#include "afreg/regularization.hpp"

using namespace afreg;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

LinearFlowModel random_model(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LinearFlowModel m;
    m.spec = NsBasisSpec::with_default_exponents(n, 0.5 + 2.0 * u(rng));
    m.ou.A = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m.ou.A(i, j) = i == j ? 0.2 + 3.0 * u(rng) : 0.1 * (u(rng) - 0.5);
    }
    m.ou.K = VectorXd::NullaryExpr(n, [&] { return 0.1 * (u(rng) - 0.5); });
    m.ou.sigma = VectorXd::NullaryExpr(n, [&] { return 0.005 + 0.05 * u(rng); });
    return m;
}

// Level-only slice: with K and sigma nonzero only in the first coordinate and A diagonal,
// the curve drift is a(k - beta) + s^2 / 2 at every maturity.
LinearFlowModel level_model(double a, double k, double s) {
    LinearFlowModel m;
    m.spec = NsBasisSpec::with_default_exponents(3, 1.0);
    m.ou.A = Eigen::Vector3d(a, 0.0, 0.0).asDiagonal();
    m.ou.K = Eigen::Vector3d(k, 0.0, 0.0);
    m.ou.sigma = Eigen::Vector3d(s, 1e-200, 1e-200);
    return m;
}

}  // namespace

TEST(DriftResidual, ReducedFormulas) {
    const auto m = level_model(0.8, 0.05, 0.02);
    const Eigen::Vector3d beta(0.03, 0.0, 0.0);
    EXPECT_NEAR(drift_residual(m, beta, 0.3, 7.0, 0.0), 0.8 * (0.05 - 0.03) + 0.5 * 0.02 * 0.02, 1e-15);
    const auto still = level_model(0.0, 0.05, 1e-200);
    EXPECT_EQ(drift_residual(still, beta, 0.3, 7.0, 0.0), 0.0);
    const double drift = curve_drift(m, beta, 7.0);
    EXPECT_NEAR(drift_residual(m, beta, 0.3, 7.0, -drift), 0.0, 1e-12);
}

TEST(OptimalSpread, ClosedFormExamples) {
    const auto m = level_model(0.8, 0.05, 0.02);
    const Eigen::Vector3d beta(0.03, 0.0, 0.0);
    EXPECT_EQ(optimal_spread(m, beta, 0.0, 5.0), 0.0);
    EXPECT_NEAR(optimal_spread(m, beta, 0.7, 5.0), -0.7 * (0.8 * 0.02 + 0.5 * 0.0004), 1e-15);
    const auto quiet = level_model(0.8, 0.05, 1e-200);
    EXPECT_EQ(optimal_spread(quiet, Eigen::Vector3d(0.05, 0.0, 0.0), 0.7, 5.0), 0.0);
}

TEST(OptimalSpread, ResidualCancelsOnRandomModels) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const auto m = random_model(rng, 3 + i % 4);
        const VectorXd beta = VectorXd::NullaryExpr(m.spec.n_factors, [&] { return 0.1 * (u(rng) - 0.5); });
        const double T = 0.1 + 30.0 * u(rng);
        const double r = drift_residual(m, beta, u(rng), T, optimal_spread_time_derivative(m, beta, T));
        EXPECT_LE(std::abs(r), 1e-10);
    }
}

TEST(OptimalSpread, AffineInBeta) {
    std::mt19937_64 rng(2);
    const auto m = random_model(rng, 5);
    const VectorXd b0 = VectorXd::Random(5) * 0.05;
    const VectorXd b1 = VectorXd::Random(5) * 0.05;
    for (double lambda : {-0.5, 0.3, 2.0}) {
        const double mid = optimal_spread(m, (1.0 - lambda) * b0 + lambda * b1, 0.4, 6.0);
        const double line = (1.0 - lambda) * optimal_spread(m, b0, 0.4, 6.0) + lambda * optimal_spread(m, b1, 0.4, 6.0);
        EXPECT_NEAR(mid, line, 1e-15);
    }
}

TEST(AfCurveType, SpreadVanishesAtTimeZeroAndTrivialCurve) {
    std::mt19937_64 rng(3);
    const auto m = random_model(rng, 4);
    const FactorState s{VectorXd::Random(4) * 0.05, 0.0};
    const AfCurve trivial = trivial_curve(m, s);
    EXPECT_TRUE(trivial.alpha.isZero(0.0));
    EXPECT_FALSE(trivial.with_spread);
    EXPECT_NEAR(trivial.value(3.0), curve_eval(m.spec, s, 3.0), 1e-16);
    AfCurve with = trivial;
    with.with_spread = true;
    for (double T : {1.0, 10.0}) EXPECT_EQ(with.spread(0.0, T), 0.0);
}

TEST(ModelDeviation, Properties) {
    const auto spec = NsBasisSpec::with_default_exponents(3, 1.0);
    const FactorCurve a = [&](const VectorXd& b, double T) { return curve_eval(spec, {b, 0.0}, T); };
    const FactorCurve b = [&](const VectorXd& beta, double T) { return curve_eval(spec, {beta, 0.0}, T) + 0.01 * T; };
    const FactorCurve c = [](const VectorXd&, double T) { return 0.002 * T * T; };
    const MatrixXd path = MatrixXd::Random(6, 3) * 0.05;
    const VectorXd grid = Eigen::Vector3d(1.0, 5.0, 10.0);
    const VectorXd w = Eigen::Vector3d(1.0, 2.0, 0.5);
    EXPECT_EQ(model_deviation(a, a, path, grid, w), 0.0);
    EXPECT_DOUBLE_EQ(model_deviation(a, b, path, grid, w), model_deviation(b, a, path, grid, w));
    // hand sum: (0.01 T)^2 weighted, identical for every path row
    const double hand = (1.0 * 1e-4 + 2.0 * 25e-4 + 0.5 * 1e-2) / 3.5;
    EXPECT_NEAR(model_deviation(a, b, path, grid, w), hand, 1e-16);
    for (double lambda : {0.0, 0.25, 0.5, 1.0}) {
        const FactorCurve mix = [&](const VectorXd& beta, double T) { return (1 - lambda) * a(beta, T) + lambda * b(beta, T); };
        EXPECT_LE(model_deviation(mix, c, path, grid, w),
                  (1 - lambda) * model_deviation(a, c, path, grid, w) + lambda * model_deviation(b, c, path, grid, w) + 1e-16);
    }
    EXPECT_THROW(model_deviation(a, b, path, VectorXd(0), VectorXd(0)), Error);
    EXPECT_THROW(model_deviation(a, b, path, grid, Eigen::Vector3d(1.0, -1.0, 1.0)), Error);
}

TEST(ArbitragePenalty, ZeroWithSpreadPositiveWithoutAndQuadratic) {
    std::mt19937_64 rng(4);
    const auto m = random_model(rng, 4);
    AfCurve curve = trivial_curve(m, {VectorXd::Random(4) * 0.05, 0.5});
    const VectorXd tg = Eigen::Vector3d(0.1, 0.5, 1.0);
    const VectorXd Tg = (VectorXd(4) << 1, 2, 10, 30).finished();
    const VectorXd w = VectorXd::Ones(4);
    const double naive = arbitrage_penalty(curve, tg, Tg, w);
    EXPECT_GT(naive, 0.0);
    curve.with_spread = true;
    EXPECT_LE(arbitrage_penalty(curve, tg, Tg, w), 1e-16);

    // doubling the drift (A, K held) doubles every residual of the spread-free curve
    AfCurve doubled = trivial_curve(m, curve.base);
    doubled.model.ou.A *= 2.0;
    doubled.model.ou.sigma *= std::sqrt(2.0);
    EXPECT_NEAR(arbitrage_penalty(doubled, tg, Tg, w), 4.0 * naive, 1e-12 * naive);
    EXPECT_THROW(arbitrage_penalty(curve, VectorXd(0), Tg, w), Error);
}
