#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "afreg/market_data.hpp"
#include "afreg/regularization.hpp"
#include "afreg/state_estimation.hpp"
#include "afreg/stats.hpp"

namespace afreg {

/// Where step 1a takes its factor estimate from.
enum class FactorSource { Regression, Filter, Smoother };

std::string_view to_string(FactorSource source) noexcept;
FactorSource parse_factor_source(std::string_view text);

struct AfEstimatorConfig {
    std::vector<double> gamma_grid{0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5};
    std::vector<int> n_factor_grid{3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    double gamma_default = 0.7;
    int n_default = 10;
    int cv_folds = 5;
    std::uint64_t seed = 0;  // recorded with the run; every step here is deterministic

    EstimationMode mode = EstimationMode::Daily;
    double tau = 1.0;
    std::vector<double> exponents;  // empty: default decay exponents
    double dt = 1.0 / 252.0;
    int window_len = 42;
    int warmup = 20;  // daily rows consumed before the first forecast
    FactorSource estimator = FactorSource::Smoother;
    OuMode ou_mode = OuMode::Diagonal;
    bool state_space_ml = true;
    double confidence = 0.999;  // Wilson interval level for proportions

    void validate() const;
};

/// Basis with n factors and the configured shape.
NsBasisSpec basis_for(const AfEstimatorConfig& config, int n_factors);

/// Largest usable factor count for a maturity grid: at most n_maturities - 1 (and at least 3).
int effective_factor_count(int requested, std::size_t n_maturities);

PipelineOptions pipeline_options(const AfEstimatorConfig& config);

LinearFlowModel flow_model(const PipelineFit& fit);

/// sum_j C(t, T_j; beta + alpha)^2 + gamma |alpha|^2
double alpha_objective(const LinearFlowModel& model, const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& maturities,
                       double gamma, double t, const Eigen::VectorXd& alpha);

/// Exact ridge solution: the spread is affine in the shift for OU drift.
Eigen::VectorXd optimize_alpha(const LinearFlowModel& model, const Eigen::VectorXd& beta_hat,
                               const Eigen::VectorXd& maturities, double gamma, double t);

/// Quasi-Newton descent from alpha = 0 (for drifts that are not affine; agrees with the ridge solve otherwise).
Eigen::VectorXd optimize_alpha_iterative(const LinearFlowModel& model, const Eigen::VectorXd& beta_hat,
                                         const Eigen::VectorXd& maturities, double gamma, double t,
                                         double grad_tol = 1e-10);

/// Shift the estimate, attach the matched spread.
AfCurve af_curve(const LinearFlowModel& model, const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& maturities,
                 double gamma, double t);

/// One-step-ahead factor prediction for row t_index from row t_index - 1, using the chosen source.
Eigen::VectorXd predicted_factors(const PipelineFit& fit, FactorSource source, std::size_t t_index);

/// The regularized curve for row t_index, horizon one step.
AfCurve af_estimate_step(const PipelineFit& fit, const AfEstimatorConfig& config, std::size_t t_index, double gamma);

/// The regularized curve values are affine in the raw estimate b: values = G b + h.
struct AffineCurveMap {
    Eigen::MatrixXd G;  // n_maturities x d
    Eigen::VectorXd h;
};

AffineCurveMap af_affine_map(const LinearFlowModel& model, const Eigen::VectorXd& maturities, double gamma, double t);

/// Per-window comparison of the regularized and empirical estimators.
struct WindowComparison {
    std::vector<std::size_t> window_starts;
    Eigen::MatrixXd sse_regularized;  // windows x maturities
    Eigen::MatrixXd sse_empirical;
    Eigen::MatrixXd beta_regularized;  // windows x d
    Eigen::MatrixXd beta_empirical;

    /// Strict improvement; ties count as losses.
    std::vector<bool> wins(Eigen::Index maturity_index) const;
};

/// Inside each window the spread clock runs from the window's first row. Both estimators
/// pool every row of the window; the regularized one fits through the affine curve map.
WindowComparison compare_windows(const CurvePanel& panel, const LinearFlowModel& model, double gamma,
                                 const std::vector<std::size_t>& starts, int window_len, double dt);

struct ProportionRow {
    double maturity = 0.0;
    std::size_t n_windows = 0;
    std::size_t wins = 0;
    double p_hat = 0.0;
    double stdev = 0.0;
    stats::Interval wilson;
    std::size_t runs = 0;
    std::optional<stats::RunsTestResult> runs_test;  // empty when every window has the same outcome
};

struct ProportionReport {
    double gamma = 0.0;
    int n_factors = 0;
    double confidence = 0.999;
    OuParams ou;
    std::vector<ProportionRow> rows;
    WindowComparison comparison;
};

ProportionReport run_bimonthly_estimate(const CurvePanel& panel, const AfEstimatorConfig& config);

/// Same evaluation with the OU parameters supplied instead of estimated.
ProportionReport bimonthly_report(const CurvePanel& panel, const NsBasisSpec& spec, const OuParams& ou,
                                  const AfEstimatorConfig& config, double gamma);

enum class ForecastModel { Regularized, Spread, Empirical };

std::string_view to_string(ForecastModel model) noexcept;

struct ForecastRow {
    double maturity = 0.0;
    ForecastModel model = ForecastModel::Empirical;
    double mean = 0.0;
    double stdev = 0.0;
    stats::Interval ci95;
    stats::Interval ci99;
    double aic = 0.0;
    int k = 0;
};

/// Per-step forecasts; row s predicts target_dates[s].
struct ForecastSeries {
    std::vector<Date> target_dates;
    Eigen::MatrixXd observed;
    Eigen::MatrixXd regularized;
    Eigen::MatrixXd spread;
    Eigen::MatrixXd empirical;

    const Eigen::MatrixXd& prediction(ForecastModel model) const;
};

struct ForecastReport {
    double gamma = 0.0;
    int n_factors = 0;
    Eigen::VectorXd maturities;
    std::vector<ForecastRow> rows;
    ForecastSeries series;
};

ForecastReport run_daily_forecast(const CurvePanel& panel, const AfEstimatorConfig& config);

/// Forecast rows from a fitted pipeline (the one-step-ahead loop without refitting).
ForecastSeries forecast_series(const CurvePanel& panel, const PipelineFit& fit, const AfEstimatorConfig& config,
                               double gamma);

struct CvResult {
    double gamma_star = 0.0;
    int n_star = 0;
    std::vector<double> gamma_scores;  // aligned with gamma_grid
    std::vector<std::optional<double>> n_scores;  // aligned with n_factor_grid; empty if infeasible
};

/// Mean validation SSE of the regularized model over forward-chaining folds.
double validation_sse(const CurvePanel& panel, const AfEstimatorConfig& config, double gamma, int n_factors);

CvResult cross_validate(const CurvePanel& panel, const AfEstimatorConfig& config);

void write_forecast_report(std::ostream& out, const ForecastReport& report);
void write_forecast_series(std::ostream& out, const ForecastReport& report);
void write_proportion_report(std::ostream& out, const ProportionReport& report);

}  // namespace afreg
