#include "afreg/af_estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "afreg/error.hpp"
#include "afreg/optim.hpp"

namespace afreg {

namespace {

// Runs fn(i) for i in [0, count) on a few worker threads. Results are written by index,
// so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, Fn fn) {
    const std::size_t workers = std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

Eigen::VectorXd spread_vector(const LinearFlowModel& model, const Eigen::VectorXd& beta,
                              const Eigen::VectorXd& maturities, double t) {
    Eigen::VectorXd c(maturities.size());
    for (Eigen::Index j = 0; j < maturities.size(); ++j) c[j] = optimal_spread(model, beta, t, maturities[j]);
    return c;
}

// d C(t, T_j; beta) / d beta, one row per maturity
Eigen::MatrixXd spread_jacobian(const LinearFlowModel& model, const Eigen::VectorXd& maturities, double t) {
    return -t * design_matrix(model.spec, maturities) * factor_drift_jacobian(model);
}

Eigen::MatrixXd ridge_normal_matrix(const Eigen::MatrixXd& M, double gamma) {
    if (gamma < 0.0) fail(ErrorCode::InvalidArgument, "gamma must be positive");
    return M.transpose() * M + gamma * Eigen::MatrixXd::Identity(M.cols(), M.cols());
}

Eigen::LDLT<Eigen::MatrixXd> factor_normal(const Eigen::MatrixXd& N) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(N);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
        fail(ErrorCode::SingularNormalEquations, "ridge normal equations are singular");
    }
    return ldlt;
}

Eigen::VectorXd stack_rows(const Eigen::MatrixXd& rows) {
    const Eigen::MatrixXd t = rows.transpose();
    return t.reshaped();
}

struct ValidationFold {
    LinearFlowModel model;
    Eigen::VectorXd maturities;
    // daily: one-step prediction target
    Eigen::VectorXd beta_hat;
    Eigen::VectorXd target;
    double horizon = 0.0;
    // bimonthly: the held-out window
    CurvePanel panel;
    std::size_t window_start = 0;
};

std::vector<std::size_t> fold_points(std::size_t available, std::size_t min_train, int folds) {
    if (folds < 1) fail(ErrorCode::InvalidArgument, "cv_folds must be positive");
    const auto f = static_cast<std::size_t>(folds);
    if (available <= min_train || available - min_train < f) {
        fail(ErrorCode::InsufficientData,
             fmt::format("{} units cannot hold {} sequential folds after {} training units", available, folds, min_train));
    }
    std::vector<std::size_t> points;
    const std::size_t span = available - 1 - min_train;
    for (std::size_t k = 0; k < f; ++k) {
        points.push_back(min_train + (f == 1 ? span : k * span / (f - 1)));
    }
    return points;
}

std::vector<ValidationFold> build_folds(const CurvePanel& panel, const AfEstimatorConfig& config, int n_factors) {
    const NsBasisSpec spec = basis_for(config, n_factors);
    const PipelineOptions options = pipeline_options(config);
    const auto d = static_cast<std::size_t>(n_factors);
    std::vector<ValidationFold> folds;
    if (config.mode == EstimationMode::Daily) {
        const std::size_t min_train = std::max(3 * d, panel.n_dates() / 2);
        for (const std::size_t v : fold_points(panel.n_dates(), min_train, config.cv_folds)) {
            const PipelineFit fit = fit_pipeline(slice_rows(panel, 0, v), spec, options);
            ValidationFold fold;
            fold.model = flow_model(fit);
            fold.maturities = panel.maturities;
            fold.beta_hat = predicted_factors(fit, config.estimator, v);
            fold.target = panel.rates.row(static_cast<Eigen::Index>(v)).transpose();
            fold.horizon = fit.step;
            folds.push_back(std::move(fold));
        }
    } else {
        const auto starts = window_starts(panel.n_dates(), config.window_len);
        const std::size_t min_train = std::max(d + 3, starts.size() / 2);
        for (const std::size_t v : fold_points(starts.size(), min_train, config.cv_folds)) {
            const PipelineFit fit = fit_pipeline(slice_rows(panel, 0, starts[v]), spec, options);
            ValidationFold fold;
            fold.model = flow_model(fit);
            fold.maturities = panel.maturities;
            fold.panel = slice_rows(panel, starts[v], static_cast<std::size_t>(config.window_len));
            fold.window_start = 0;
            folds.push_back(std::move(fold));
        }
    }
    return folds;
}

double score_folds(const std::vector<ValidationFold>& folds, const AfEstimatorConfig& config, double gamma) {
    double total = 0.0;
    for (const auto& fold : folds) {
        if (config.mode == EstimationMode::Daily) {
            const AfCurve curve = af_curve(fold.model, fold.beta_hat, fold.maturities, gamma, fold.horizon);
            total += (curve.values(fold.maturities) - fold.target).squaredNorm();
        } else {
            const WindowComparison cmp =
                compare_windows(fold.panel, fold.model, gamma, {fold.window_start}, config.window_len, config.dt);
            total += cmp.sse_regularized.sum();
        }
    }
    return total / static_cast<double>(folds.size());
}

std::string num(double x) { return fmt::format("{}", x); }

}  // namespace

std::string_view to_string(FactorSource source) noexcept {
    switch (source) {
        case FactorSource::Regression: return "regression";
        case FactorSource::Filter: return "filter";
        case FactorSource::Smoother: return "smoother";
    }
    return "smoother";
}

FactorSource parse_factor_source(std::string_view text) {
    if (text == "regression") return FactorSource::Regression;
    if (text == "filter") return FactorSource::Filter;
    if (text == "smoother") return FactorSource::Smoother;
    fail(ErrorCode::Config, fmt::format("unknown factor estimator '{}'", text));
}

void AfEstimatorConfig::validate() const {
    if (gamma_grid.empty() || n_factor_grid.empty()) fail(ErrorCode::Config, "grids must be nonempty");
    for (double g : gamma_grid) {
        if (!(g > 0.0)) fail(ErrorCode::Config, fmt::format("gamma {} must be positive", g));
    }
    for (int n : n_factor_grid) {
        if (n < 3 || n > 20) fail(ErrorCode::Config, fmt::format("factor count {} outside [3, 20]", n));
    }
    if (std::find(gamma_grid.begin(), gamma_grid.end(), gamma_default) == gamma_grid.end()) {
        fail(ErrorCode::Config, "gamma_default must be on gamma_grid");
    }
    if (std::find(n_factor_grid.begin(), n_factor_grid.end(), n_default) == n_factor_grid.end()) {
        fail(ErrorCode::Config, "n_default must be on n_factor_grid");
    }
    if (!(tau > 0.0) || !(dt > 0.0) || window_len < 2 || warmup < 0 || cv_folds < 1) {
        fail(ErrorCode::Config, "tau, dt, window_len, warmup or cv_folds out of range");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) fail(ErrorCode::Config, "confidence must lie in (0, 1)");
}

NsBasisSpec basis_for(const AfEstimatorConfig& config, int n_factors) {
    NsBasisSpec spec = NsBasisSpec::with_default_exponents(n_factors, config.tau);
    const auto extra = static_cast<std::size_t>(std::max(0, n_factors - 3));
    if (!config.exponents.empty()) {
        if (config.exponents.size() < extra) {
            fail(ErrorCode::Config, fmt::format("{} exponents given, {} factors need {}", config.exponents.size(),
                                                n_factors, extra));
        }
        spec.exponents.assign(config.exponents.begin(), config.exponents.begin() + static_cast<std::ptrdiff_t>(extra));
    }
    spec.validate();
    return spec;
}

int effective_factor_count(int requested, std::size_t n_maturities) {
    const int cap = static_cast<int>(n_maturities) - 1;
    return std::max(3, std::min(requested, cap));
}

PipelineOptions pipeline_options(const AfEstimatorConfig& config) {
    PipelineOptions o;
    o.mode = config.mode;
    o.dt = config.dt;
    o.window_len = config.window_len;
    o.ou_mode = config.ou_mode;
    o.state_space_ml = config.state_space_ml;
    return o;
}

LinearFlowModel flow_model(const PipelineFit& fit) { return LinearFlowModel{fit.spec, fit.ou}; }

double alpha_objective(const LinearFlowModel& model, const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& maturities,
                       double gamma, double t, const Eigen::VectorXd& alpha) {
    return spread_vector(model, beta_hat + alpha, maturities, t).squaredNorm() + gamma * alpha.squaredNorm();
}

Eigen::VectorXd optimize_alpha(const LinearFlowModel& model, const Eigen::VectorXd& beta_hat,
                               const Eigen::VectorXd& maturities, double gamma, double t) {
    const Eigen::MatrixXd M = spread_jacobian(model, maturities, t);
    const Eigen::VectorXd c = spread_vector(model, beta_hat, maturities, t);
    return -factor_normal(ridge_normal_matrix(M, gamma)).solve(M.transpose() * c);
}

Eigen::VectorXd optimize_alpha_iterative(const LinearFlowModel& model, const Eigen::VectorXd& beta_hat,
                                         const Eigen::VectorXd& maturities, double gamma, double t, double grad_tol) {
    if (!(gamma > 0.0)) fail(ErrorCode::InvalidArgument, "gamma must be positive");
    const Eigen::MatrixXd M = spread_jacobian(model, maturities, t);
    const auto f = [&](const Eigen::VectorXd& a) {
        return alpha_objective(model, beta_hat, maturities, gamma, t, a);
    };
    const auto g = [&](const Eigen::VectorXd& a) -> Eigen::VectorXd {
        const Eigen::VectorXd c = spread_vector(model, beta_hat + a, maturities, t);
        return 2.0 * (M.transpose() * c + gamma * a);
    };
    optim::BfgsOptions opts;
    opts.max_iter = 500;
    opts.grad_tol = grad_tol;
    opts.f_tol = 0.0;
    return optim::minimize_bfgs(f, Eigen::VectorXd::Zero(beta_hat.size()), opts, g).x;
}

AfCurve af_curve(const LinearFlowModel& model, const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& maturities,
                 double gamma, double t) {
    AfCurve curve;
    curve.model = model;
    curve.base = FactorState{beta_hat, t};
    curve.alpha = optimize_alpha(model, beta_hat, maturities, gamma, t);
    curve.t = t;
    curve.with_spread = true;
    return curve;
}

Eigen::VectorXd predicted_factors(const PipelineFit& fit, FactorSource source, std::size_t t_index) {
    const auto rows = static_cast<std::size_t>(fit.observations.rows());
    if (t_index < 1 || t_index > rows) {
        fail(ErrorCode::InvalidArgument, fmt::format("step {} outside [1, {}]", t_index, rows));
    }
    const auto prev = static_cast<Eigen::Index>(t_index - 1);
    Eigen::VectorXd state;
    switch (source) {
        case FactorSource::Regression: state = fit.regression_betas.row(prev).transpose(); break;
        case FactorSource::Filter: state = fit.filtered.means.row(prev).transpose(); break;
        case FactorSource::Smoother: state = fit.smoothed.means.row(prev).transpose(); break;
    }
    return fit.model.dyn.Phi * state + fit.model.dyn.c;
}

AfCurve af_estimate_step(const PipelineFit& fit, const AfEstimatorConfig& config, std::size_t t_index, double gamma) {
    const Eigen::VectorXd beta_hat = predicted_factors(fit, config.estimator, t_index);
    return af_curve(flow_model(fit), beta_hat, fit.maturities, gamma, fit.step);
}

AffineCurveMap af_affine_map(const LinearFlowModel& model, const Eigen::VectorXd& maturities, double gamma, double t) {
    const Eigen::MatrixXd X = design_matrix(model.spec, maturities);
    const Eigen::MatrixXd M = spread_jacobian(model, maturities, t);
    const Eigen::VectorXd c0 = spread_vector(model, Eigen::VectorXd::Zero(X.cols()), maturities, t);
    const auto ldlt = factor_normal(ridge_normal_matrix(M, gamma));
    // beta + alpha = (I - N^-1 M^T M) b - N^-1 M^T c0; the spread is c0 + M (beta + alpha)
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(X.cols(), X.cols());
    const Eigen::MatrixXd shift_slope = eye - ldlt.solve(M.transpose() * M);
    const Eigen::VectorXd shift_offset = -ldlt.solve(M.transpose() * c0);
    const Eigen::MatrixXd total = X + M;
    return AffineCurveMap{total * shift_slope, total * shift_offset + c0};
}

std::vector<bool> WindowComparison::wins(Eigen::Index maturity_index) const {
    std::vector<bool> out(static_cast<std::size_t>(sse_regularized.rows()));
    for (Eigen::Index w = 0; w < sse_regularized.rows(); ++w) {
        out[static_cast<std::size_t>(w)] = sse_regularized(w, maturity_index) < sse_empirical(w, maturity_index);
    }
    return out;
}

WindowComparison compare_windows(const CurvePanel& panel, const LinearFlowModel& model, double gamma,
                                 const std::vector<std::size_t>& starts, int window_len, double dt) {
    if (window_len < 1) fail(ErrorCode::InvalidArgument, "window length must be positive");
    const Eigen::Index m = panel.maturities.size();
    const Eigen::Index d = model.spec.n_factors;
    const Eigen::Index W = window_len;

    const Eigen::MatrixXd X = design_matrix(model.spec, panel.maturities);
    Eigen::MatrixXd G(W * m, d);
    Eigen::MatrixXd Xs(W * m, d);
    Eigen::VectorXd h(W * m);
    for (Eigen::Index k = 0; k < W; ++k) {
        const AffineCurveMap map = af_affine_map(model, panel.maturities, gamma, static_cast<double>(k) * dt);
        G.middleRows(k * m, m) = map.G;
        h.segment(k * m, m) = map.h;
        Xs.middleRows(k * m, m) = X;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_reg(G);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_emp(Xs);
    qr_reg.setThreshold(1e-12);
    qr_emp.setThreshold(1e-12);
    if (qr_reg.rank() < d || qr_emp.rank() < d) fail(ErrorCode::RankDeficient, "pooled window design is rank deficient");

    WindowComparison out;
    out.window_starts = starts;
    const auto nw = static_cast<Eigen::Index>(starts.size());
    out.sse_regularized.resize(nw, m);
    out.sse_empirical.resize(nw, m);
    out.beta_regularized.resize(nw, d);
    out.beta_empirical.resize(nw, d);
    for (Eigen::Index w = 0; w < nw; ++w) {
        const auto s = starts[static_cast<std::size_t>(w)];
        if (s + static_cast<std::size_t>(W) > panel.n_dates()) fail(ErrorCode::EmptyWindow, "window runs past the panel");
        const Eigen::VectorXd y = stack_rows(panel.rates.middleRows(static_cast<Eigen::Index>(s), W));
        const Eigen::VectorXd b_reg = qr_reg.solve(y - h);
        const Eigen::VectorXd b_emp = qr_emp.solve(y);
        const Eigen::VectorXd r_reg = G * b_reg + h - y;
        const Eigen::VectorXd r_emp = Xs * b_emp - y;
        out.sse_regularized.row(w) = r_reg.cwiseAbs2().reshaped(m, W).rowwise().sum().transpose();
        out.sse_empirical.row(w) = r_emp.cwiseAbs2().reshaped(m, W).rowwise().sum().transpose();
        out.beta_regularized.row(w) = b_reg.transpose();
        out.beta_empirical.row(w) = b_emp.transpose();
    }
    return out;
}

ProportionReport bimonthly_report(const CurvePanel& panel, const NsBasisSpec& spec, const OuParams& ou,
                                  const AfEstimatorConfig& config, double gamma) {
    ProportionReport report;
    report.gamma = gamma;
    report.n_factors = spec.n_factors;
    report.confidence = config.confidence;
    report.ou = ou;
    const auto starts = window_starts(panel.n_dates(), config.window_len);
    if (starts.empty()) fail(ErrorCode::InsufficientData, "panel shorter than one window");
    report.comparison = compare_windows(panel, LinearFlowModel{spec, ou}, gamma, starts, config.window_len, config.dt);
    for (Eigen::Index j = 0; j < panel.maturities.size(); ++j) {
        const auto seq = report.comparison.wins(j);
        ProportionRow row;
        row.maturity = panel.maturities[j];
        row.n_windows = seq.size();
        row.wins = static_cast<std::size_t>(std::count(seq.begin(), seq.end(), true));
        row.p_hat = static_cast<double>(row.wins) / static_cast<double>(row.n_windows);
        row.stdev = std::sqrt(row.p_hat * (1.0 - row.p_hat) / static_cast<double>(row.n_windows));
        row.wilson = stats::wilson_interval(row.wins, row.n_windows, config.confidence);
        row.runs = stats::count_runs(seq);
        if (row.wins > 0 && row.wins < row.n_windows) row.runs_test = stats::runs_test(seq);
        report.rows.push_back(row);
    }
    return report;
}

ProportionReport run_bimonthly_estimate(const CurvePanel& panel, const AfEstimatorConfig& config) {
    config.validate();
    AfEstimatorConfig cfg = config;
    cfg.mode = EstimationMode::Bimonthly;
    const int n = effective_factor_count(cfg.n_default, panel.n_maturities());
    const NsBasisSpec spec = basis_for(cfg, n);
    const PipelineFit fit = fit_pipeline(panel, spec, pipeline_options(cfg));
    return bimonthly_report(panel, spec, fit.ou, cfg, cfg.gamma_default);
}

std::string_view to_string(ForecastModel model) noexcept {
    switch (model) {
        case ForecastModel::Regularized: return "regularized";
        case ForecastModel::Spread: return "spread";
        case ForecastModel::Empirical: return "empirical";
    }
    return "empirical";
}

const Eigen::MatrixXd& ForecastSeries::prediction(ForecastModel model) const {
    switch (model) {
        case ForecastModel::Regularized: return regularized;
        case ForecastModel::Spread: return spread;
        case ForecastModel::Empirical: return empirical;
    }
    return empirical;
}

ForecastSeries forecast_series(const CurvePanel& panel, const PipelineFit& fit, const AfEstimatorConfig& config,
                               double gamma) {
    const auto T = panel.n_dates();
    const auto warm = static_cast<std::size_t>(config.warmup);
    if (T < warm + 3) fail(ErrorCode::InsufficientData, fmt::format("{} rows leave fewer than two forecasts after warmup {}", T, warm));
    const Eigen::Index m = panel.maturities.size();
    const auto steps = static_cast<Eigen::Index>(T - 1 - warm);
    const LinearFlowModel model = flow_model(fit);
    const Eigen::MatrixXd X = design_matrix(fit.spec, panel.maturities);

    ForecastSeries s;
    s.observed.resize(steps, m);
    s.regularized.resize(steps, m);
    s.spread.resize(steps, m);
    s.empirical.resize(steps, m);
    for (Eigen::Index k = 0; k < steps; ++k) {
        const std::size_t target = warm + 1 + static_cast<std::size_t>(k);
        const Eigen::VectorXd beta_hat = predicted_factors(fit, config.estimator, target);
        s.target_dates.push_back(panel.dates[target]);
        s.observed.row(k) = panel.rates.row(static_cast<Eigen::Index>(target));
        s.empirical.row(k) = (X * beta_hat).transpose();
        s.spread.row(k) = (X * beta_hat + spread_vector(model, beta_hat, panel.maturities, fit.step)).transpose();
        s.regularized.row(k) = af_curve(model, beta_hat, panel.maturities, gamma, fit.step).values(panel.maturities).transpose();
    }
    return s;
}

ForecastReport run_daily_forecast(const CurvePanel& panel, const AfEstimatorConfig& config) {
    config.validate();
    AfEstimatorConfig cfg = config;
    cfg.mode = EstimationMode::Daily;
    const int n = effective_factor_count(cfg.n_default, panel.n_maturities());
    const NsBasisSpec spec = basis_for(cfg, n);
    const PipelineFit fit = fit_pipeline(panel, spec, pipeline_options(cfg));

    ForecastReport report;
    report.gamma = cfg.gamma_default;
    report.n_factors = n;
    report.maturities = panel.maturities;
    report.series = forecast_series(panel, fit, cfg, cfg.gamma_default);

    const double z95 = stats::normal_quantile_two_sided(0.95);
    const double z99 = stats::normal_quantile_two_sided(0.99);
    const int k_base = ou_parameter_count(n, cfg.ou_mode) + n + 1;
    for (Eigen::Index j = 0; j < panel.maturities.size(); ++j) {
        for (const ForecastModel which : {ForecastModel::Regularized, ForecastModel::Spread, ForecastModel::Empirical}) {
            const Eigen::VectorXd err = report.series.prediction(which).col(j) - report.series.observed.col(j);
            ForecastRow row;
            row.maturity = panel.maturities[j];
            row.model = which;
            const double n_err = static_cast<double>(err.size());
            row.mean = err.mean();
            row.stdev = std::sqrt((err.array() - row.mean).square().sum() / (n_err - 1.0));
            row.ci95 = {row.mean - z95 * row.stdev, row.mean + z95 * row.stdev};
            row.ci99 = {row.mean - z99 * row.stdev, row.mean + z99 * row.stdev};
            row.k = k_base + (which == ForecastModel::Regularized ? 1 : 0);
            const double ms = err.squaredNorm();
            row.aic = ms > 0.0 ? stats::aic(stats::gaussian_loglik(err).loglik, row.k)
                               : -std::numeric_limits<double>::infinity();
            report.rows.push_back(row);
        }
    }
    return report;
}

double validation_sse(const CurvePanel& panel, const AfEstimatorConfig& config, double gamma, int n_factors) {
    return score_folds(build_folds(panel, config, n_factors), config, gamma);
}

CvResult cross_validate(const CurvePanel& panel, const AfEstimatorConfig& config) {
    config.validate();
    CvResult out;
    const int n_start = effective_factor_count(config.n_default, panel.n_maturities());
    const auto folds = build_folds(panel, config, n_start);

    out.gamma_scores.resize(config.gamma_grid.size());
    parallel_for(config.gamma_grid.size(), [&](std::size_t i) {
        out.gamma_scores[i] = score_folds(folds, config, config.gamma_grid[i]);
    });
    std::size_t best_g = 0;
    for (std::size_t i = 1; i < out.gamma_scores.size(); ++i) {
        const double a = out.gamma_scores[i];
        const double b = out.gamma_scores[best_g];
        if (a < b || (a == b && config.gamma_grid[i] < config.gamma_grid[best_g])) best_g = i;
    }
    out.gamma_star = config.gamma_grid[best_g];

    out.n_scores.resize(config.n_factor_grid.size());
    parallel_for(config.n_factor_grid.size(), [&](std::size_t i) {
        const int n = config.n_factor_grid[i];
        if (n != effective_factor_count(n, panel.n_maturities())) return;  // more factors than the grid supports
        try {
            out.n_scores[i] = score_folds(build_folds(panel, config, n), config, out.gamma_star);
        } catch (const Error&) {
            out.n_scores[i].reset();
        }
    });
    std::optional<std::size_t> best_n;
    for (std::size_t i = 0; i < out.n_scores.size(); ++i) {
        if (!out.n_scores[i] || !std::isfinite(*out.n_scores[i])) continue;
        if (!best_n) {
            best_n = i;
            continue;
        }
        const double a = *out.n_scores[i];
        const double b = *out.n_scores[*best_n];
        if (a < b || (a == b && config.n_factor_grid[i] < config.n_factor_grid[*best_n])) best_n = i;
    }
    if (!best_n) fail(ErrorCode::InsufficientData, "no factor count on the grid could be validated");
    out.n_star = config.n_factor_grid[*best_n];
    return out;
}

void write_forecast_report(std::ostream& out, const ForecastReport& report) {
    out << "maturity,model,mean,stdev,ci95_lo,ci95_hi,ci99_lo,ci99_hi,aic\n";
    for (const auto& r : report.rows) {
        out << num(r.maturity) << ',' << to_string(r.model) << ',' << num(r.mean) << ',' << num(r.stdev) << ','
            << num(r.ci95.lo) << ',' << num(r.ci95.hi) << ',' << num(r.ci99.lo) << ',' << num(r.ci99.hi) << ','
            << num(r.aic) << '\n';
    }
}

void write_forecast_series(std::ostream& out, const ForecastReport& report) {
    const auto& s = report.series;
    out << "date,maturity,observed,regularized,spread,empirical\n";
    for (Eigen::Index k = 0; k < s.observed.rows(); ++k) {
        const std::string date = format_date(s.target_dates[static_cast<std::size_t>(k)]);
        for (Eigen::Index j = 0; j < s.observed.cols(); ++j) {
            out << date << ',' << num(report.maturities[j]) << ',' << num(s.observed(k, j)) << ','
                << num(s.regularized(k, j)) << ',' << num(s.spread(k, j)) << ',' << num(s.empirical(k, j)) << '\n';
        }
    }
}

void write_proportion_report(std::ostream& out, const ProportionReport& report) {
    out << "maturity,n_windows,wins,p_hat,stdev,wilson_lo,wilson_hi,runs,runs_z,runs_p\n";
    for (const auto& r : report.rows) {
        out << num(r.maturity) << ',' << r.n_windows << ',' << r.wins << ',' << num(r.p_hat) << ',' << num(r.stdev)
            << ',' << num(r.wilson.lo) << ',' << num(r.wilson.hi) << ',' << r.runs << ',';
        if (r.runs_test) {
            out << num(r.runs_test->z) << ',' << num(r.runs_test->p_value) << '\n';
        } else {
            out << "NA,NA\n";
        }
    }
}

}  // namespace afreg
