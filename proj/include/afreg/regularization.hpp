#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "afreg/factor_basis.hpp"
#include "afreg/factor_dynamics.hpp"

namespace afreg {

/// Linear factor curve f(T) = phi(T)^T beta on flat (Euclidean) factor space,
/// with OU factor dynamics.
struct LinearFlowModel {
    NsBasisSpec spec;
    OuParams ou;

    void validate() const;
};

/// Factor drift A (K - beta).
Eigen::VectorXd factor_drift(const LinearFlowModel& model, const Eigen::VectorXd& beta);

/// Jacobian of the factor drift with respect to beta (-A).
Eigen::MatrixXd factor_drift_jacobian(const LinearFlowModel& model);

/// phi(T)^T A (K - beta) + 1/2 (phi(T)^T sigma)^2: the instantaneous drift the spread must cancel.
double curve_drift(const LinearFlowModel& model, const Eigen::VectorXd& beta, double maturity);

/// dC/dt + phi(T)^T A (K - beta) + 1/2 (phi(T)^T sigma)^2. Zero iff the curve plus
/// spread is locally consistent with no arbitrage at (t, T, beta).
double drift_residual(const LinearFlowModel& model, const Eigen::VectorXd& beta, double t, double maturity,
                      double spread_time_derivative);

/// C(t, T; beta) = -t [phi(T)^T A (K - beta) + 1/2 (phi(T)^T sigma)^2], beta held fixed over [0, t].
double optimal_spread(const LinearFlowModel& model, const Eigen::VectorXd& beta, double t, double maturity);

/// dC/dt of the spread above (independent of t).
double optimal_spread_time_derivative(const LinearFlowModel& model, const Eigen::VectorXd& beta, double maturity);

/// A factor curve with a shift alpha and (optionally) the closed-form spread evaluated
/// at the shifted factors.
struct AfCurve {
    LinearFlowModel model;
    FactorState base;
    Eigen::VectorXd alpha;
    double t = 0.0;
    bool with_spread = true;

    Eigen::VectorXd shifted() const { return base.beta + alpha; }

    /// Spread at an arbitrary time; zero at time 0 and when the curve carries no spread.
    double spread(double time, double maturity) const;
    double spread_time_derivative(double maturity) const;

    /// phi(T)^T (beta + alpha) + C(t, T; beta + alpha)
    double value(double maturity) const;
    Eigen::VectorXd values(const Eigen::VectorXd& maturities) const;

    /// Drift residual of the curve at (time, T).
    double residual(double time, double maturity) const;
};

/// The unregularized curve: alpha = 0, no spread.
AfCurve trivial_curve(const LinearFlowModel& model, const FactorState& state);

using FactorCurve = std::function<double(const Eigen::VectorXd& beta, double maturity)>;

/// Weighted mean over (path rows x grid) of (a - b)^2; weights are per grid maturity.
double model_deviation(const FactorCurve& curve_a, const FactorCurve& curve_b, const Eigen::MatrixXd& beta_path,
                       const Eigen::VectorXd& grid, const Eigen::VectorXd& weights);

/// sum_T w_T * mean_t residual(t, T)^2 over the grids.
double arbitrage_penalty(const AfCurve& curve, const Eigen::VectorXd& t_grid, const Eigen::VectorXd& maturity_grid,
                         const Eigen::VectorXd& weights);

}  // namespace afreg
