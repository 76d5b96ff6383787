#include "afreg/factor_basis.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "afreg/error.hpp"

namespace afreg {

namespace {

// (1 - e^{-x}) / x, with the series branch near zero.
double decay_loading(double x) {
    if (x < 1e-6) return 1.0 - x / 2.0 + x * x / 6.0;
    return -std::expm1(-x) / x;
}

}  // namespace

NsBasisSpec NsBasisSpec::with_default_exponents(int n_factors, double tau) {
    NsBasisSpec spec;
    spec.n_factors = n_factors;
    spec.tau = tau;
    for (int i = 4; i <= n_factors; ++i) spec.exponents.push_back(1.0 + (i - 3) / 2.0);
    spec.validate();
    return spec;
}

void NsBasisSpec::validate() const {
    if (n_factors < 3) fail(ErrorCode::InvalidArgument, fmt::format("n_factors = {} < 3", n_factors));
    if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "tau must be positive");
    if (static_cast<int>(exponents.size()) != n_factors - 3) {
        fail(ErrorCode::DimensionMismatch, "exponents must have n_factors - 3 entries");
    }
    for (double k : exponents) {
        if (!(k > 0.0)) fail(ErrorCode::InvalidArgument, "basis exponents must be positive");
    }
}

Eigen::VectorXd basis_eval(const NsBasisSpec& spec, double maturity) {
    if (maturity < 0.0 || std::isnan(maturity)) {
        fail(ErrorCode::NonPositiveMaturity, fmt::format("maturity {} < 0", maturity));
    }
    Eigen::VectorXd phi(spec.n_factors);
    const double x = maturity / spec.tau;
    phi[0] = 1.0;
    phi[1] = decay_loading(x);
    phi[2] = phi[1] - std::exp(-x);
    for (int i = 3; i < spec.n_factors; ++i) {
        const double k = spec.exponents[static_cast<std::size_t>(i - 3)];
        phi[i] = decay_loading(std::pow(maturity, k) / spec.tau);
    }
    return phi;
}

Eigen::MatrixXd design_matrix(const NsBasisSpec& spec, const Eigen::VectorXd& maturities) {
    Eigen::MatrixXd x(maturities.size(), spec.n_factors);
    for (Eigen::Index j = 0; j < maturities.size(); ++j) x.row(j) = basis_eval(spec, maturities[j]).transpose();
    return x;
}

double curve_eval(const NsBasisSpec& spec, const FactorState& state, double maturity) {
    if (state.beta.size() != spec.n_factors) {
        fail(ErrorCode::DimensionMismatch,
             fmt::format("state has {} factors, basis has {}", state.beta.size(), spec.n_factors));
    }
    return state.beta.dot(basis_eval(spec, maturity));
}

double bond_price(const CurveFunction& forward, double t, double maturity_date) {
    if (maturity_date < t) fail(ErrorCode::MaturityBeforeValuation, fmt::format("T = {} < t = {}", maturity_date, t));
    if (maturity_date == t) return 1.0;
    double error = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double s) { return forward(s - t); }, t, maturity_date, 20, 1e-13, &error);
    return std::exp(-integral);
}

double bond_price(const NsBasisSpec& spec, const FactorState& state, double t, double maturity_date,
                  const std::optional<CurveFunction>& spread) {
    if (state.beta.size() != spec.n_factors) fail(ErrorCode::DimensionMismatch, "state/basis dimension mismatch");
    if (spread) {
        return bond_price([&](double x) { return curve_eval(spec, state, x) + (*spread)(x); }, t, maturity_date);
    }
    return bond_price([&](double x) { return curve_eval(spec, state, x); }, t, maturity_date);
}

FactorState fit_cross_section(const NsBasisSpec& spec, const Eigen::VectorXd& maturities,
                              const Eigen::VectorXd& observed) {
    if (maturities.size() != observed.size()) fail(ErrorCode::DimensionMismatch, "maturities/observations size mismatch");
    if (maturities.size() < spec.n_factors) {
        fail(ErrorCode::TooFewObservations,
             fmt::format("{} observations for {} factors", maturities.size(), spec.n_factors));
    }
    const Eigen::MatrixXd x = design_matrix(spec, maturities);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-12);
    if (qr.rank() < spec.n_factors) fail(ErrorCode::RankDeficient, "design matrix is not full column rank");
    return FactorState{qr.solve(observed), 0.0};
}

}  // namespace afreg
