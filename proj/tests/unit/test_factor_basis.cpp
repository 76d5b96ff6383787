#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "afreg/error.hpp"
#include "afreg/factor_basis.hpp"

using namespace afreg;

TEST(Basis, KnownValuesAndConstantLevel) {
    const auto spec = NsBasisSpec::with_default_exponents(3, 1.0);
    const Eigen::VectorXd phi = basis_eval(spec, 1.0);
    EXPECT_EQ(phi[0], 1.0);
    EXPECT_NEAR(phi[1], 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(phi[2], 1.0 - 2.0 * std::exp(-1.0), 1e-15);
    EXPECT_NEAR(phi[1], 0.6321206, 1e-7);
    EXPECT_NEAR(phi[2], 0.2642411, 1e-7);
    for (double T : {0.1, 3.0, 30.0}) EXPECT_EQ(basis_eval(spec, T)[0], 1.0);
}

TEST(Basis, ExtraLoadingsUseExponents) {
    const auto spec = NsBasisSpec::with_default_exponents(5, 2.0);
    ASSERT_EQ(spec.exponents.size(), 2u);
    EXPECT_DOUBLE_EQ(spec.exponents[0], 1.5);
    EXPECT_DOUBLE_EQ(spec.exponents[1], 2.0);
    const double T = 3.0;
    const Eigen::VectorXd phi = basis_eval(spec, T);
    for (int i = 0; i < 2; ++i) {
        const double y = std::pow(T, spec.exponents[static_cast<std::size_t>(i)]) / 2.0;
        EXPECT_NEAR(phi[3 + i], (1.0 - std::exp(-y)) / y, 1e-15);
    }
}

TEST(Basis, LimitAtZeroIsContinuous) {
    const auto spec = NsBasisSpec::with_default_exponents(6, 0.7);
    const Eigen::VectorXd at0 = basis_eval(spec, 0.0);
    EXPECT_EQ(at0[1], 1.0);
    EXPECT_EQ(at0[2], 0.0);
    EXPECT_LE((at0 - basis_eval(spec, 1e-8)).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_THROW(basis_eval(spec, -1.0), Error);
}

TEST(Basis, SpecValidation) {
    NsBasisSpec bad = NsBasisSpec::with_default_exponents(4, 1.0);
    bad.exponents.clear();
    EXPECT_THROW(bad.validate(), Error);
    EXPECT_THROW(NsBasisSpec::with_default_exponents(3, -1.0), Error);
    EXPECT_THROW(NsBasisSpec::with_default_exponents(2, 1.0), Error);
}

TEST(Curve, LinearInBetaAndMatchesDotProduct) {
    const auto spec = NsBasisSpec::with_default_exponents(5, 1.3);
    const Eigen::VectorXd b1 = Eigen::VectorXd::Random(5);
    const Eigen::VectorXd b2 = Eigen::VectorXd::Random(5);
    for (double T : {0.5, 2.0, 17.0}) {
        const Eigen::VectorXd phi = basis_eval(spec, T);
        double dot = 0.0;
        for (int i = 0; i < 5; ++i) dot += b1[i] * phi[i];
        EXPECT_NEAR(curve_eval(spec, {b1, 0.0}, T), dot, 1e-15);
        EXPECT_NEAR(curve_eval(spec, {2.0 * b1 - 3.0 * b2, 0.0}, T),
                    2.0 * curve_eval(spec, {b1, 0.0}, T) - 3.0 * curve_eval(spec, {b2, 0.0}, T), 1e-14);
    }
    EXPECT_EQ(curve_eval(spec, {Eigen::VectorXd::Zero(5), 0.0}, 4.0), 0.0);
    const auto spec3 = NsBasisSpec::with_default_exponents(3, 1.0);
    EXPECT_DOUBLE_EQ(curve_eval(spec3, {Eigen::Vector3d(0.05, 0, 0), 0.0}, 9.0), 0.05);
    EXPECT_THROW(curve_eval(spec3, {Eigen::VectorXd::Zero(4), 0.0}, 1.0), Error);
}

TEST(BondPrice, FlatCurveAndEdgeCases) {
    const auto spec = NsBasisSpec::with_default_exponents(3, 1.0);
    const FactorState flat{Eigen::Vector3d(0.03, 0, 0), 0.0};
    EXPECT_NEAR(bond_price(spec, flat, 1.0, 6.0), std::exp(-0.15), 1e-12);
    EXPECT_EQ(bond_price(spec, flat, 2.0, 2.0), 1.0);
    EXPECT_THROW(bond_price(spec, flat, 2.0, 1.0), Error);
}

TEST(BondPrice, SlopeLoadingAgainstQuadrature) {
    const auto spec = NsBasisSpec::with_default_exponents(3, 1.0);
    const FactorState slope{Eigen::Vector3d(0, 1, 0), 0.0};
    // with tau = 1, phi2 = (1 - e^-s)/s; its integral over [0, 2] by an independent rule
    const auto phi2 = [](double s) { return s == 0.0 ? 1.0 : -std::expm1(-s) / s; };
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(phi2, 0.0, 2.0, 20, 1e-14);
    EXPECT_NEAR(bond_price(spec, slope, 0.0, 2.0), std::exp(-I), 1e-11);
}

TEST(BondPrice, SpreadAndMonotonicity) {
    const auto spec = NsBasisSpec::with_default_exponents(3, 2.0);
    const FactorState s{Eigen::Vector3d(0.04, -0.01, 0.02), 0.0};
    double prev = 1.0;
    for (double T = 0.5; T <= 30.0; T += 0.5) {
        const double p = bond_price(spec, s, 0.0, T);
        EXPECT_GT(p, 0.0);
        EXPECT_LT(p, prev);
        prev = p;
    }
    const CurveFunction bump = [](double) { return 0.01; };
    EXPECT_NEAR(bond_price(spec, s, 0.0, 5.0, bump), bond_price(spec, s, 0.0, 5.0) * std::exp(-0.05), 1e-12);
}

TEST(CrossSection, RecoversExactBetaAndMatchesNormalEquations) {
    const auto spec = NsBasisSpec::with_default_exponents(4, 1.5);
    const Eigen::VectorXd m = (Eigen::VectorXd(8) << 1, 2, 3, 5, 7, 10, 20, 30).finished();
    const Eigen::VectorXd beta = (Eigen::VectorXd(4) << 0.05, -0.02, 0.01, 0.003).finished();
    const Eigen::MatrixXd X = design_matrix(spec, m);
    EXPECT_LE((fit_cross_section(spec, m, X * beta).beta - beta).cwiseAbs().maxCoeff(), 1e-10);

    const Eigen::VectorXd y = X * beta + 1e-3 * Eigen::VectorXd::Random(8);
    const Eigen::VectorXd oracle = (X.transpose() * X).inverse() * X.transpose() * y;
    const Eigen::VectorXd fitted = fit_cross_section(spec, m, y).beta;
    EXPECT_LE((fitted - oracle).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((X.transpose() * (y - X * fitted)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(CrossSection, TooFewObservations) {
    const auto spec = NsBasisSpec::with_default_exponents(3, 1.0);
    try {
        fit_cross_section(spec, Eigen::Vector2d(1, 2), Eigen::Vector2d(0.01, 0.02));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewObservations);
    }
}
