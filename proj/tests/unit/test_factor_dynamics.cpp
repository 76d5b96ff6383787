#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "afreg/error.hpp"
#include "afreg/factor_dynamics.hpp"

using namespace afreg;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

OuParams scalar(double a, double k, double s) {
    OuParams p;
    p.A = MatrixXd::Constant(1, 1, a);
    p.K = VectorXd::Constant(1, k);
    p.sigma = VectorXd::Constant(1, s);
    return p;
}

}  // namespace

TEST(Discretization, DriftlessLimit) {
    OuParams p;
    p.A = MatrixXd::Zero(2, 2);
    p.K = Eigen::Vector2d(0.1, 0.2);
    p.sigma = Eigen::Vector2d(0.3, 0.4);
    const auto d = exact_discretization(p, 0.5);
    EXPECT_TRUE(d.Phi.isIdentity(0.0));
    EXPECT_TRUE(d.c.isZero(0.0));
    EXPECT_NEAR(d.Q(0, 0), 0.09 * 0.5, 1e-15);
    EXPECT_NEAR(d.Q(1, 1), 0.16 * 0.5, 1e-15);
    EXPECT_EQ(d.Q(0, 1), 0.0);
}

TEST(Discretization, ScalarClosedFormAgainstQuadrature) {
    const double a = 1.7;
    const double s = 0.25;
    const double dt = 0.3;
    const auto d = exact_discretization(scalar(a, 0.04, s), dt);
    EXPECT_NEAR(d.Phi(0, 0), std::exp(-a * dt), 1e-15);
    EXPECT_NEAR(d.c[0], 0.04 * (1.0 - std::exp(-a * dt)), 1e-15);
    const double q = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double u) { return std::exp(-2.0 * a * u) * s * s; }, 0.0, dt, 10, 1e-15);
    EXPECT_NEAR(d.Q(0, 0), q, 1e-14);
    EXPECT_NEAR(d.Q(0, 0), s * s * (1.0 - std::exp(-2.0 * a * dt)) / (2.0 * a), 1e-15);
}

TEST(Discretization, QuadratureMatchesClosedFormForDiagonalA) {
    OuParams p;
    p.A = Eigen::Vector3d(0.5, 3.0, 40.0).asDiagonal();
    p.K = Eigen::Vector3d::Zero();
    p.sigma = Eigen::Vector3d(0.01, 0.02, 0.05);
    for (double dt : {1.0 / 252.0, 1.0 / 6.0, 1.0}) {
        EXPECT_LE((discretize_noise_by_quadrature(p, dt) - exact_discretization(p, dt).Q).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Discretization, FullMatrixIsSymmetricPsdAndSmallStepLimit) {
    OuParams p;
    p.A = (MatrixXd(2, 2) << 1.0, 0.4, -0.3, 2.0).finished();
    p.K = Eigen::Vector2d(0.01, 0.02);
    p.sigma = Eigen::Vector2d(0.1, 0.2);
    const auto d = exact_discretization(p, 0.25);
    EXPECT_LE((d.Q - d.Q.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<MatrixXd>(d.Q).eigenvalues().minCoeff(), -1e-12);
    EXPECT_LE((d.Phi - MatrixXd((-0.25 * p.A).eval()).exp()).cwiseAbs().maxCoeff(), 1e-12);
    const auto tiny = exact_discretization(p, 1e-10);
    EXPECT_LE((tiny.Phi - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(tiny.Q.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Simulate, DeterministicAndNoiselessLimit) {
    const auto p = scalar(2.0, 0.05, 1e-12);
    const MatrixXd a = simulate(p, VectorXd::Constant(1, 0.01), 0.1, 50, 9);
    EXPECT_EQ(a, simulate(p, VectorXd::Constant(1, 0.01), 0.1, 50, 9));
    EXPECT_EQ(a.rows(), 51);
    EXPECT_EQ(a(0, 0), 0.01);
    double mean = 0.01;
    for (int k = 1; k <= 50; ++k) {
        mean = 0.05 + (mean - 0.05) * std::exp(-0.2);
        EXPECT_NEAR(a(k, 0), mean, 1e-8);
    }
}

TEST(Simulate, StationaryVarianceMatchesClosedForm) {
    const auto p = scalar(1.0, 0.0, 0.5);
    const int n = 1000000;
    const MatrixXd path = simulate(p, VectorXd::Zero(1), 0.05, n, 1234);
    const VectorXd x = path.col(0).tail(n);
    const double mean = x.mean();
    const double var = (x.array() - mean).square().mean();
    // AR(1) with phi = e^-0.05: effective sample size n (1 - phi^2) / (1 + phi^2)
    const double phi = std::exp(-0.05);
    const double se = 0.125 * std::sqrt(2.0 * (1.0 + phi * phi) / ((1.0 - phi * phi) * n));
    EXPECT_NEAR(var, 0.125, 3.0 * se);
}

TEST(Mle, RecoversScalarParameters) {
    const auto truth = scalar(0.5, 0.03, 0.01);
    const MatrixXd path = simulate(truth, VectorXd::Constant(1, 0.03), 1.0 / 252.0, 100000, 77);
    const auto fit = mle_fit(path, 1.0 / 252.0);
    EXPECT_NEAR(fit.params.A(0, 0), 0.5, 0.05);
    EXPECT_NEAR(fit.params.K[0], 0.03, 0.003);
    EXPECT_NEAR(fit.params.sigma[0], 0.01, 0.001);
    EXPECT_FALSE(fit.non_stationary);
    EXPECT_GE(fit.loglik, ou_loglik(truth, path, 1.0 / 252.0) - 1e-8);
}

TEST(Mle, DiagonalModeSeparates) {
    OuParams p;
    p.A = Eigen::Vector2d(3.0, 6.0).asDiagonal();
    p.K = Eigen::Vector2d(0.02, -0.01);
    p.sigma = Eigen::Vector2d(0.02, 0.04);
    const MatrixXd path = simulate(p, p.K, 1.0 / 52.0, 3000, 5);
    const auto joint = mle_fit(path, 1.0 / 52.0);
    for (int i = 0; i < 2; ++i) {
        const auto single = mle_fit(path.col(i), 1.0 / 52.0);
        EXPECT_NEAR(joint.params.A(i, i), single.params.A(0, 0), 1e-12);
        EXPECT_NEAR(joint.params.K[i], single.params.K[0], 1e-12);
        EXPECT_NEAR(joint.params.sigma[i], single.params.sigma[0], 1e-12);
    }
    EXPECT_EQ(joint.params.A(0, 1), 0.0);
}

TEST(Mle, FullModeNeverWorseThanDiagonalStart) {
    OuParams p;
    p.A = (MatrixXd(2, 2) << 4.0, 1.0, -1.0, 5.0).finished();
    p.K = Eigen::Vector2d(0.02, -0.01);
    p.sigma = Eigen::Vector2d(0.02, 0.04);
    const MatrixXd path = simulate(p, p.K, 1.0 / 52.0, 2000, 6);
    const auto diag = mle_fit(path, 1.0 / 52.0, OuMode::Diagonal);
    const auto full = mle_fit(path, 1.0 / 52.0, OuMode::Full);
    EXPECT_GE(full.loglik, diag.loglik - 1e-8);
    EXPECT_NEAR(full.loglik, ou_loglik(full.params, path, 1.0 / 52.0), 1e-6);
}

TEST(Mle, Errors) {
    try {
        mle_fit(MatrixXd::Constant(20, 2, 0.03), 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegeneratePath);
    }
    try {
        mle_fit(MatrixXd::Random(3, 2), 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewObservations);
    }
}

TEST(Mle, NegativeArCoefficientIsClampedAndFlagged) {
    MatrixXd path(40, 1);
    for (int i = 0; i < 40; ++i) path(i, 0) = (i % 2 == 0 ? 1.0 : -1.0) + 0.01 * i;
    const auto fit = mle_fit(path, 0.1);
    EXPECT_TRUE(fit.non_stationary);
    EXPECT_NEAR(fit.params.A(0, 0), -std::log(1e-8) / 0.1, 1e-9);
}

TEST(Stationary, CovarianceSolvesLyapunov) {
    OuParams p;
    p.A = (MatrixXd(2, 2) << 2.0, 0.5, 0.1, 1.0).finished();
    p.K = Eigen::Vector2d::Zero();
    p.sigma = Eigen::Vector2d(0.3, 0.2);
    const MatrixXd S = stationary_covariance(p);
    const MatrixXd SS = p.sigma.cwiseAbs2().asDiagonal();
    EXPECT_LE((p.A * S + S * p.A.transpose() - SS).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(ou_parameter_count(3, OuMode::Diagonal), 9);
    EXPECT_EQ(ou_parameter_count(3, OuMode::Full), 15);
}
