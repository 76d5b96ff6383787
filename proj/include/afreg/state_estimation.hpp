#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "afreg/factor_basis.hpp"
#include "afreg/factor_dynamics.hpp"
#include "afreg/market_data.hpp"

namespace afreg {

/// x_k = Phi x_{k-1} + c + w_k,  y_k = H x_k + v_k,  v_k ~ N(0, R),  x_0 ~ N(init_mean, init_cov)
struct StateSpaceModel {
    DiscreteOu dyn;
    Eigen::MatrixXd H;
    Eigen::MatrixXd R;
    Eigen::VectorXd init_mean;
    Eigen::MatrixXd init_cov;

    void validate() const;
};

struct StatePath {
    Eigen::MatrixXd means;  // T x d (filtered or smoothed)
    std::vector<Eigen::MatrixXd> covs;
    Eigen::MatrixXd predicted_means;  // one-step-ahead, row k is the prediction of x_k
    std::vector<Eigen::MatrixXd> predicted_covs;
    double loglik = 0.0;
};

StatePath kalman_filter(const StateSpaceModel& model, const Eigen::MatrixXd& obs);

/// Rauch-Tung-Striebel pass over the filter output; predicted_* and loglik are the filter's.
StatePath kalman_smoother(const StateSpaceModel& model, const Eigen::MatrixXd& obs);
StatePath kalman_smoother(const StateSpaceModel& model, const StatePath& filtered);

enum class EstimationMode { Daily, Bimonthly };

std::string_view to_string(EstimationMode mode) noexcept;
EstimationMode parse_estimation_mode(std::string_view text);

struct PipelineOptions {
    EstimationMode mode = EstimationMode::Daily;
    double dt = 1.0 / 252.0;  // years per panel row
    int window_len = 42;      // rows per bimonthly window
    OuMode ou_mode = OuMode::Diagonal;
    bool state_space_ml = true;  // refine OU parameters on the filter likelihood
    double r_floor = 1e-12;
};

struct CrossSectionFit {
    Eigen::MatrixXd betas;      // one row per observed curve
    Eigen::VectorXd residual_variance;  // per maturity, mean squared residual
};

/// Ordinary least squares of every row on the basis (shared design matrix).
CrossSectionFit regress_rows(const NsBasisSpec& spec, const Eigen::VectorXd& maturities, const Eigen::MatrixXd& rows);

/// Non-overlapping windows of `window_len` rows; a short tail is dropped.
std::vector<std::size_t> window_starts(std::size_t n_rows, int window_len);

struct PipelineFit {
    NsBasisSpec spec;
    PipelineOptions options;
    double step = 0.0;  // years between consecutive state-space observations
    Eigen::VectorXd maturities;
    OuParams ou;
    bool non_stationary = false;
    StateSpaceModel model;
    Eigen::MatrixXd observations;      // rates (daily) or window-mean curves (bimonthly)
    Eigen::MatrixXd regression_betas;  // one row per observation
    StatePath filtered;
    StatePath smoothed;
    double loglik_initial = 0.0;  // filter loglik at the regression-based OU estimate
    std::vector<std::size_t> windows;  // bimonthly window start rows
};

/// Cross-section regressions -> OU maximum likelihood -> Kalman filter -> RTS smoother.
PipelineFit fit_pipeline(const CurvePanel& panel, const NsBasisSpec& spec, const PipelineOptions& options = {});

/// Builds the state-space model used by the pipeline for given OU parameters.
StateSpaceModel make_state_space(const NsBasisSpec& spec, const Eigen::VectorXd& maturities, const OuParams& ou,
                                 double step, const Eigen::MatrixXd& R, const Eigen::MatrixXd& regression_betas);

}  // namespace afreg
