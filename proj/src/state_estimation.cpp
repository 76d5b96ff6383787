#include "afreg/state_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "afreg/error.hpp"
#include "afreg/optim.hpp"

namespace afreg {

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return (m + m.transpose()) / 2.0; }

Eigen::VectorXd pack(const OuParams& p, OuMode mode) {
    const Eigen::Index d = p.dim();
    if (mode == OuMode::Diagonal) {
        Eigen::VectorXd theta(3 * d);
        theta << p.A.diagonal(), p.K, p.sigma.array().log().matrix();
        return theta;
    }
    Eigen::VectorXd theta(d * d + 2 * d);
    theta << p.A.reshaped(), p.K, p.sigma.array().log().matrix();
    return theta;
}

OuParams unpack(const Eigen::VectorXd& theta, Eigen::Index d, OuMode mode) {
    OuParams p;
    Eigen::Index off = 0;
    if (mode == OuMode::Diagonal) {
        p.A = theta.head(d).asDiagonal();
        off = d;
    } else {
        p.A = theta.head(d * d).reshaped(d, d);
        off = d * d;
    }
    p.K = theta.segment(off, d);
    p.sigma = theta.segment(off + d, d).array().exp().matrix();
    return p;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& rows) {
    const Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
    const double denom = std::max<double>(1.0, static_cast<double>(rows.rows() - 1));
    return centered.transpose() * centered / denom;
}

}  // namespace

void StateSpaceModel::validate() const {
    const Eigen::Index d = dyn.Phi.rows();
    const Eigen::Index m = H.rows();
    if (dyn.Phi.cols() != d || dyn.c.size() != d || dyn.Q.rows() != d || dyn.Q.cols() != d || H.cols() != d ||
        R.rows() != m || R.cols() != m || init_mean.size() != d || init_cov.rows() != d || init_cov.cols() != d) {
        fail(ErrorCode::DimensionMismatch, "state-space model dimensions are inconsistent");
    }
}

StatePath kalman_filter(const StateSpaceModel& model, const Eigen::MatrixXd& obs) {
    model.validate();
    const Eigen::Index T = obs.rows();
    const Eigen::Index d = model.H.cols();
    const Eigen::Index m = model.H.rows();
    if (T < 1) fail(ErrorCode::InsufficientData, "filter needs at least one observation");
    if (obs.cols() != m) fail(ErrorCode::DimensionMismatch, "observation width does not match H");

    StatePath out;
    out.means.resize(T, d);
    out.predicted_means.resize(T, d);
    out.covs.reserve(static_cast<std::size_t>(T));
    out.predicted_covs.reserve(static_cast<std::size_t>(T));
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
    const double log_2pi = std::log(2.0 * std::numbers::pi);

    Eigen::VectorXd x = model.init_mean;
    Eigen::MatrixXd P = model.init_cov;
    for (Eigen::Index t = 0; t < T; ++t) {
        if (t > 0) {
            x = model.dyn.Phi * x + model.dyn.c;
            P = symmetrize(model.dyn.Phi * P * model.dyn.Phi.transpose() + model.dyn.Q);
        }
        out.predicted_means.row(t) = x.transpose();
        out.predicted_covs.push_back(P);

        const Eigen::VectorXd v = obs.row(t).transpose() - model.H * x;
        const Eigen::MatrixXd S = symmetrize(model.H * P * model.H.transpose() + model.R);
        const Eigen::LLT<Eigen::MatrixXd> llt(S);
        if (llt.info() != Eigen::Success) {
            fail(ErrorCode::SingularInnovationCovariance, fmt::format("innovation covariance singular at step {}", t));
        }
        const Eigen::MatrixXd L = llt.matrixL();
        const double logdet = 2.0 * L.diagonal().array().log().sum();
        const Eigen::MatrixXd gain = llt.solve(model.H * P).transpose();  // P H^T S^-1
        out.loglik += -0.5 * (static_cast<double>(m) * log_2pi + logdet + v.dot(llt.solve(v)));

        x += gain * v;
        const Eigen::MatrixXd IKH = eye - gain * model.H;
        P = symmetrize(IKH * P * IKH.transpose() + gain * model.R * gain.transpose());
        out.means.row(t) = x.transpose();
        out.covs.push_back(P);
    }
    return out;
}

StatePath kalman_smoother(const StateSpaceModel& model, const StatePath& filtered) {
    StatePath out = filtered;
    const Eigen::Index T = filtered.means.rows();
    for (Eigen::Index t = T - 2; t >= 0; --t) {
        const auto k = static_cast<std::size_t>(t);
        const Eigen::MatrixXd& P = filtered.covs[k];
        const Eigen::MatrixXd& P_next = filtered.predicted_covs[k + 1];
        // G = P Phi^T P_next^-1
        const Eigen::MatrixXd G = P_next.ldlt().solve(model.dyn.Phi * P).transpose();
        const Eigen::VectorXd diff = (out.means.row(t + 1) - filtered.predicted_means.row(t + 1)).transpose();
        out.means.row(t) = filtered.means.row(t) + (G * diff).transpose();
        out.covs[k] = symmetrize(P + G * (out.covs[k + 1] - P_next) * G.transpose());
    }
    return out;
}

StatePath kalman_smoother(const StateSpaceModel& model, const Eigen::MatrixXd& obs) {
    return kalman_smoother(model, kalman_filter(model, obs));
}

std::string_view to_string(EstimationMode mode) noexcept {
    return mode == EstimationMode::Daily ? "daily" : "bimonthly";
}

EstimationMode parse_estimation_mode(std::string_view text) {
    if (text == "daily") return EstimationMode::Daily;
    if (text == "bimonthly") return EstimationMode::Bimonthly;
    fail(ErrorCode::Config, fmt::format("unknown estimation mode '{}'", text));
}

CrossSectionFit regress_rows(const NsBasisSpec& spec, const Eigen::VectorXd& maturities, const Eigen::MatrixXd& rows) {
    const Eigen::Index d = spec.n_factors;
    if (maturities.size() < d) {
        fail(ErrorCode::TooFewObservations, fmt::format("{} maturities for {} factors", maturities.size(), d));
    }
    const Eigen::MatrixXd X = design_matrix(spec, maturities);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-12);
    if (qr.rank() < d) fail(ErrorCode::RankDeficient, "design matrix is rank deficient");
    CrossSectionFit out;
    out.betas = qr.solve(rows.transpose()).transpose();
    const Eigen::MatrixXd resid = rows - out.betas * X.transpose();
    // mean squared residual over (1 - leverage) is unbiased per maturity
    const Eigen::MatrixXd XtX_inv = (X.transpose() * X).inverse();
    const Eigen::VectorXd leverage = (X * XtX_inv * X.transpose()).diagonal();
    out.residual_variance = resid.colwise().squaredNorm().transpose() / static_cast<double>(rows.rows());
    for (Eigen::Index j = 0; j < leverage.size(); ++j) {
        if (1.0 - leverage[j] > 1e-10) out.residual_variance[j] /= 1.0 - leverage[j];
    }
    return out;
}

std::vector<std::size_t> window_starts(std::size_t n_rows, int window_len) {
    if (window_len < 1) fail(ErrorCode::InvalidArgument, "window length must be positive");
    std::vector<std::size_t> starts;
    const auto w = static_cast<std::size_t>(window_len);
    for (std::size_t s = 0; s + w <= n_rows; s += w) starts.push_back(s);
    return starts;
}

StateSpaceModel make_state_space(const NsBasisSpec& spec, const Eigen::VectorXd& maturities, const OuParams& ou,
                                 double step, const Eigen::MatrixXd& R, const Eigen::MatrixXd& regression_betas) {
    StateSpaceModel model;
    model.dyn = exact_discretization(ou, step);
    model.H = design_matrix(spec, maturities);
    model.R = R;
    model.init_mean = regression_betas.row(0).transpose();
    const Eigen::Index d = ou.dim();
    Eigen::MatrixXd base;
    const Eigen::VectorXcd eig = ou.A.eigenvalues();
    if (eig.real().minCoeff() > 0.0) {
        base = stationary_covariance(ou);
    } else {
        base = sample_covariance(regression_betas) + 1e-12 * Eigen::MatrixXd::Identity(d, d);
    }
    model.init_cov = 10.0 * base;
    return model;
}

PipelineFit fit_pipeline(const CurvePanel& panel, const NsBasisSpec& spec, const PipelineOptions& options) {
    spec.validate();
    panel.validate();
    const auto d = static_cast<std::size_t>(spec.n_factors);
    if (panel.n_dates() < 3 * d) {
        fail(ErrorCode::InsufficientData, fmt::format("{} rows, need at least {}", panel.n_dates(), 3 * d));
    }

    PipelineFit fit;
    fit.spec = spec;
    fit.options = options;
    fit.maturities = panel.maturities;
    if (options.mode == EstimationMode::Daily) {
        fit.step = options.dt;
        fit.observations = panel.rates;
    } else {
        fit.step = options.dt * options.window_len;
        fit.windows = window_starts(panel.n_dates(), options.window_len);
        fit.observations.resize(static_cast<Eigen::Index>(fit.windows.size()), panel.rates.cols());
        for (std::size_t w = 0; w < fit.windows.size(); ++w) {
            fit.observations.row(static_cast<Eigen::Index>(w)) =
                panel.rates.middleRows(static_cast<Eigen::Index>(fit.windows[w]), options.window_len).colwise().mean();
        }
    }

    const CrossSectionFit xs = regress_rows(spec, panel.maturities, fit.observations);
    fit.regression_betas = xs.betas;
    const Eigen::MatrixXd R = xs.residual_variance.cwiseMax(options.r_floor).asDiagonal();

    const OuFit ou_fit = mle_fit(xs.betas, fit.step, options.ou_mode);
    fit.ou = ou_fit.params;
    fit.non_stationary = ou_fit.non_stationary;
    fit.model = make_state_space(spec, panel.maturities, fit.ou, fit.step, R, xs.betas);
    fit.filtered = kalman_filter(fit.model, fit.observations);
    fit.loglik_initial = fit.filtered.loglik;

    if (options.state_space_ml) {
        const auto dim = static_cast<Eigen::Index>(d);
        const double scale = static_cast<double>(fit.observations.rows());
        // search in units where every coordinate moves on a comparable scale
        const Eigen::VectorXd start = pack(fit.ou, options.ou_mode);
        Eigen::VectorXd unit = Eigen::VectorXd::Ones(start.size());
        const Eigen::Index n_a = options.ou_mode == OuMode::Diagonal ? dim : dim * dim;
        const double a_scale = std::max(fit.ou.A.diagonal().cwiseAbs().mean(), 1e-8);
        unit.head(n_a).setConstant(a_scale);
        for (Eigen::Index i = 0; i < dim; ++i) {
            const Eigen::VectorXd col = xs.betas.col(i);
            const double sd = std::sqrt((col.array() - col.mean()).square().mean());
            unit[n_a + i] = std::max(sd, 1e-8);
        }
        const auto objective = [&](const Eigen::VectorXd& z) {
            const OuParams p = unpack(start + unit.cwiseProduct(z), dim, options.ou_mode);
            try {
                const StateSpaceModel m = make_state_space(spec, panel.maturities, p, fit.step, R, xs.betas);
                const double ll = kalman_filter(m, fit.observations).loglik;
                return std::isfinite(ll) ? -ll / scale : std::numeric_limits<double>::infinity();
            } catch (const Error&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        optim::BfgsOptions opts;
        opts.max_iter = 100;
        opts.grad_tol = 1e-7;
        const auto res = optim::minimize_bfgs(objective, Eigen::VectorXd::Zero(start.size()), opts);
        if (-res.value * scale > fit.filtered.loglik) {
            fit.ou = unpack(start + unit.cwiseProduct(res.x), dim, options.ou_mode);
            fit.model = make_state_space(spec, panel.maturities, fit.ou, fit.step, R, xs.betas);
            fit.filtered = kalman_filter(fit.model, fit.observations);
            const Eigen::VectorXcd eig = fit.model.dyn.Phi.eigenvalues();
            fit.non_stationary = eig.cwiseAbs().maxCoeff() >= 1.0;
        }
    }
    fit.smoothed = kalman_smoother(fit.model, fit.filtered);
    return fit;
}

}  // namespace afreg
