#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace afreg {

/// Extended Nelson-Siegel basis: level, slope, curvature, then extra decay
/// loadings (1 - exp(-T^k / tau)) / (T^k / tau), one per exponent k.
struct NsBasisSpec {
    int n_factors = 3;
    double tau = 1.0;
    std::vector<double> exponents;  // size n_factors - 3

    /// Default exponents k_i = 1 + (i - 3) / 2 for factor index i > 3 (1-based).
    static NsBasisSpec with_default_exponents(int n_factors, double tau);

    void validate() const;
    bool operator==(const NsBasisSpec&) const = default;
};

struct FactorState {
    Eigen::VectorXd beta;
    double time = 0.0;  // years
};

/// A curve in maturity, e.g. a spread term added to the factor curve.
using CurveFunction = std::function<double(double)>;

/// (phi_1(T), ..., phi_N(T)); T = 0 takes the analytic limit.
Eigen::VectorXd basis_eval(const NsBasisSpec& spec, double maturity);

/// Rows are basis_eval at each maturity.
Eigen::MatrixXd design_matrix(const NsBasisSpec& spec, const Eigen::VectorXd& maturities);

double curve_eval(const NsBasisSpec& spec, const FactorState& state, double maturity);

/// Zero-coupon price exp(-int_t^T f(t, s) ds), where the curve (plus optional spread)
/// is indexed by time to maturity s - t.
double bond_price(const NsBasisSpec& spec, const FactorState& state, double t, double maturity_date,
                  const std::optional<CurveFunction>& spread = std::nullopt);

/// Same, for an arbitrary forward curve indexed by time to maturity.
double bond_price(const CurveFunction& forward, double t, double maturity_date);

/// Ordinary least squares of the observed curve on the basis.
FactorState fit_cross_section(const NsBasisSpec& spec, const Eigen::VectorXd& maturities,
                              const Eigen::VectorXd& observed);

}  // namespace afreg
