#include "afreg/regularization.hpp"

#include <fmt/format.h>

#include "afreg/error.hpp"

namespace afreg {

namespace {

void check_beta(const LinearFlowModel& model, const Eigen::VectorXd& beta) {
    if (beta.size() != model.ou.dim()) {
        fail(ErrorCode::DimensionMismatch, fmt::format("beta has {} entries, model has {}", beta.size(), model.ou.dim()));
    }
}

void check_weights(const Eigen::VectorXd& weights, Eigen::Index expected) {
    if (weights.size() != expected) fail(ErrorCode::DimensionMismatch, "one weight per grid maturity expected");
    if ((weights.array() < 0.0).any() || !(weights.sum() > 0.0)) {
        fail(ErrorCode::InvalidArgument, "weights must be nonnegative with a positive sum");
    }
}

}  // namespace

void LinearFlowModel::validate() const {
    spec.validate();
    const Eigen::Index d = ou.dim();
    if (d != spec.n_factors || ou.A.rows() != d || ou.A.cols() != d || ou.sigma.size() != d) {
        fail(ErrorCode::DimensionMismatch, "basis and OU dimensions differ");
    }
}

Eigen::VectorXd factor_drift(const LinearFlowModel& model, const Eigen::VectorXd& beta) {
    check_beta(model, beta);
    return model.ou.A * (model.ou.K - beta);
}

Eigen::MatrixXd factor_drift_jacobian(const LinearFlowModel& model) { return -model.ou.A; }

double curve_drift(const LinearFlowModel& model, const Eigen::VectorXd& beta, double maturity) {
    const Eigen::VectorXd phi = basis_eval(model.spec, maturity);
    const double vol = phi.dot(model.ou.sigma);
    return phi.dot(factor_drift(model, beta)) + 0.5 * vol * vol;
}

double drift_residual(const LinearFlowModel& model, const Eigen::VectorXd& beta, double /*t*/, double maturity,
                      double spread_time_derivative) {
    return spread_time_derivative + curve_drift(model, beta, maturity);
}

double optimal_spread(const LinearFlowModel& model, const Eigen::VectorXd& beta, double t, double maturity) {
    if (t == 0.0) return 0.0;
    return -t * curve_drift(model, beta, maturity);
}

double optimal_spread_time_derivative(const LinearFlowModel& model, const Eigen::VectorXd& beta, double maturity) {
    return -curve_drift(model, beta, maturity);
}

double AfCurve::spread(double time, double maturity) const {
    return with_spread ? optimal_spread(model, shifted(), time, maturity) : 0.0;
}

double AfCurve::spread_time_derivative(double maturity) const {
    return with_spread ? optimal_spread_time_derivative(model, shifted(), maturity) : 0.0;
}

double AfCurve::value(double maturity) const {
    const Eigen::VectorXd b = shifted();
    return basis_eval(model.spec, maturity).dot(b) + spread(t, maturity);
}

Eigen::VectorXd AfCurve::values(const Eigen::VectorXd& maturities) const {
    Eigen::VectorXd out(maturities.size());
    for (Eigen::Index j = 0; j < maturities.size(); ++j) out[j] = value(maturities[j]);
    return out;
}

double AfCurve::residual(double time, double maturity) const {
    return drift_residual(model, shifted(), time, maturity, spread_time_derivative(maturity));
}

AfCurve trivial_curve(const LinearFlowModel& model, const FactorState& state) {
    AfCurve c;
    c.model = model;
    c.base = state;
    c.alpha = Eigen::VectorXd::Zero(state.beta.size());
    c.t = state.time;
    c.with_spread = false;
    return c;
}

double model_deviation(const FactorCurve& curve_a, const FactorCurve& curve_b, const Eigen::MatrixXd& beta_path,
                       const Eigen::VectorXd& grid, const Eigen::VectorXd& weights) {
    if (grid.size() == 0 || beta_path.rows() == 0) fail(ErrorCode::EmptyGrid, "deviation needs a grid and a path");
    check_weights(weights, grid.size());
    double total = 0.0;
    for (Eigen::Index k = 0; k < beta_path.rows(); ++k) {
        const Eigen::VectorXd beta = beta_path.row(k).transpose();
        for (Eigen::Index j = 0; j < grid.size(); ++j) {
            const double diff = curve_a(beta, grid[j]) - curve_b(beta, grid[j]);
            total += weights[j] * diff * diff;
        }
    }
    return total / (static_cast<double>(beta_path.rows()) * weights.sum());
}

double arbitrage_penalty(const AfCurve& curve, const Eigen::VectorXd& t_grid, const Eigen::VectorXd& maturity_grid,
                         const Eigen::VectorXd& weights) {
    if (t_grid.size() == 0 || maturity_grid.size() == 0) fail(ErrorCode::EmptyGrid, "penalty grids must be nonempty");
    check_weights(weights, maturity_grid.size());
    double total = 0.0;
    for (Eigen::Index j = 0; j < maturity_grid.size(); ++j) {
        double inner = 0.0;
        for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
            const double r = curve.residual(t_grid[i], maturity_grid[j]);
            inner += r * r;
        }
        total += weights[j] * inner / static_cast<double>(t_grid.size());
    }
    return total;
}

}  // namespace afreg
