#include "afreg/factor_dynamics.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "afreg/error.hpp"
#include "afreg/optim.hpp"

namespace afreg {

namespace {

// (1 - exp(-2 a dt)) / (2 a), continuous through a = 0.
double ou_variance_factor(double a, double dt) {
    if (std::abs(a * dt) < 1e-12) return dt;
    return -std::expm1(-2.0 * a * dt) / (2.0 * a);
}

Eigen::MatrixXd transition(const Eigen::MatrixXd& A, double dt) {
    if (A.isDiagonal(0.0)) {
        Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(A.rows(), A.cols());
        for (Eigen::Index i = 0; i < A.rows(); ++i) phi(i, i) = std::exp(-A(i, i) * dt);
        return phi;
    }
    const Eigen::MatrixXd scaled = -A * dt;
    return scaled.exp();
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& Q) {
    Eigen::LLT<Eigen::MatrixXd> llt(Q);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q);
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

struct Ar1 {
    double phi;
    double c;
    double s2;
};

Ar1 fit_ar1(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double n = static_cast<double>(x.size());
    const double mx = x.mean();
    const double my = y.mean();
    const double sxx = (x.array() - mx).square().sum();
    const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
    if (!(sxx > 0.0)) fail(ErrorCode::DegeneratePath, "coordinate has zero variance");
    const double phi = sxy / sxx;
    const double c = my - phi * mx;
    const double s2 = (y.array() - c - phi * x.array()).square().sum() / n;
    return {phi, c, s2};
}

void check_nondegenerate(const Eigen::MatrixXd& path) {
    const Eigen::Index n = path.rows() - 1;
    const Eigen::MatrixXd inc = path.bottomRows(n) - path.topRows(n);
    const Eigen::MatrixXd centered = inc.rowwise() - inc.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov, Eigen::EigenvaluesOnly).eigenvalues();
    if (!(eig.maxCoeff() > 0.0) || eig.minCoeff() <= 1e-13 * eig.maxCoeff()) {
        fail(ErrorCode::DegeneratePath, "sample covariance of increments is singular");
    }
}

OuFit fit_diagonal(const Eigen::MatrixXd& path, double dt) {
    const Eigen::Index d = path.cols();
    const Eigen::Index n = path.rows() - 1;
    OuFit fit;
    fit.params.A = Eigen::MatrixXd::Zero(d, d);
    fit.params.K.resize(d);
    fit.params.sigma.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        auto ar = fit_ar1(path.col(i).head(n), path.col(i).tail(n));
        if (ar.phi <= 0.0) {
            ar.phi = 1e-8;
            fit.non_stationary = true;
        }
        if (ar.phi >= 1.0) fit.non_stationary = true;
        const double a = -std::log(ar.phi) / dt;
        const double gap = 1.0 - ar.phi;
        fit.params.A(i, i) = a;
        fit.params.K[i] = std::abs(gap) > 1e-12 ? ar.c / gap : path.col(i).mean();
        fit.params.sigma[i] = std::sqrt(ar.s2 / ou_variance_factor(a, dt));
    }
    return fit;
}

Eigen::VectorXd pack(const OuParams& p) {
    const Eigen::Index d = p.dim();
    Eigen::VectorXd theta(d * d + 2 * d);
    theta.head(d * d) = p.A.reshaped();
    theta.segment(d * d, d) = p.K;
    theta.tail(d) = p.sigma.array().log().matrix();
    return theta;
}

OuParams unpack(const Eigen::VectorXd& theta, Eigen::Index d) {
    OuParams p;
    p.A = theta.head(d * d).reshaped(d, d);
    p.K = theta.segment(d * d, d);
    p.sigma = theta.tail(d).array().exp().matrix();
    return p;
}

}  // namespace

bool OuParams::is_diagonal() const { return A.isDiagonal(0.0); }

void OuParams::validate() const {
    const Eigen::Index d = K.size();
    if (d < 1 || A.rows() != d || A.cols() != d || sigma.size() != d) {
        fail(ErrorCode::DimensionMismatch, "OU parameter dimensions are inconsistent");
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        if (!(sigma[i] > 0.0)) fail(ErrorCode::InvalidArgument, "OU volatilities must be positive");
    }
}

DiscreteOu exact_discretization(const OuParams& params, double dt) {
    if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "time step must be positive");
    const Eigen::Index d = params.dim();
    DiscreteOu out;
    out.dt = dt;
    out.Phi = transition(params.A, dt);
    out.c = (Eigen::MatrixXd::Identity(d, d) - out.Phi) * params.K;
    if (params.is_diagonal()) {
        out.Q = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            out.Q(i, i) = params.sigma[i] * params.sigma[i] * ou_variance_factor(params.A(i, i), dt);
        }
    } else {
        out.Q = discretize_noise_by_quadrature(params, dt);
    }
    return out;
}

Eigen::MatrixXd discretize_noise_by_quadrature(const OuParams& params, double dt) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const Eigen::Index d = params.dim();
    const Eigen::MatrixXd S = params.sigma.cwiseAbs2().asDiagonal();
    // The integrand is entire; a few panels per unit of |A| dt keep the rule exact to rounding.
    const double spread = params.A.cwiseAbs().rowwise().sum().maxCoeff() * dt;
    const int panels = std::max(1, static_cast<int>(std::ceil(spread * 2.0)));
    const double h = dt / panels;
    const auto& nodes = Rule::abscissa();
    const auto& weights = Rule::weights();

    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(d, d);
    auto accumulate = [&](double s, double w) {
        const Eigen::MatrixXd E = transition(params.A, s);
        Q += w * (E * S * E.transpose());
    };
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double off = nodes[k] * h / 2.0;
            const double w = weights[k] * h / 2.0;
            accumulate(mid + off, w);
            if (nodes[k] != 0.0) accumulate(mid - off, w);
        }
    }
    return (Q + Q.transpose()) / 2.0;
}

Eigen::MatrixXd simulate(const OuParams& params, const Eigen::VectorXd& beta0, double dt, int n_steps,
                         std::uint64_t seed) {
    if (n_steps < 0) fail(ErrorCode::InvalidArgument, "n_steps must be nonnegative");
    if (beta0.size() != params.dim()) fail(ErrorCode::DimensionMismatch, "beta0 dimension");
    const DiscreteOu disc = exact_discretization(params, dt);
    const Eigen::MatrixXd root = symmetric_sqrt(disc.Q);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const Eigen::Index d = params.dim();
    Eigen::MatrixXd path(n_steps + 1, d);
    path.row(0) = beta0.transpose();
    Eigen::VectorXd z(d);
    for (int k = 0; k < n_steps; ++k) {
        for (Eigen::Index i = 0; i < d; ++i) z[i] = normal(rng);
        path.row(k + 1) = (disc.Phi * path.row(k).transpose() + disc.c + root * z).transpose();
    }
    return path;
}

double ou_loglik(const OuParams& params, const Eigen::MatrixXd& path, double dt) {
    const DiscreteOu disc = exact_discretization(params, dt);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(disc.Q);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
        return -std::numeric_limits<double>::infinity();
    }
    const double logdet = ldlt.vectorD().array().log().sum();
    const Eigen::Index d = params.dim();
    const Eigen::Index n = path.rows() - 1;
    const Eigen::MatrixXd pred = (path.topRows(n) * disc.Phi.transpose()).rowwise() + disc.c.transpose();
    const Eigen::MatrixXd resid = path.bottomRows(n) - pred;
    const Eigen::MatrixXd solved = ldlt.solve(resid.transpose());
    const double quad = (resid.transpose().array() * solved.array()).sum();
    return -0.5 * (static_cast<double>(n) * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + logdet) + quad);
}

OuFit mle_fit(const Eigen::MatrixXd& path, double dt, OuMode mode) {
    if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "time step must be positive");
    const Eigen::Index d = path.cols();
    if (d < 1 || path.rows() < d + 2) {
        fail(ErrorCode::TooFewObservations, fmt::format("need at least {} rows, got {}", d + 2, path.rows()));
    }
    check_nondegenerate(path);
    OuFit fit = fit_diagonal(path, dt);
    fit.loglik = ou_loglik(fit.params, path, dt);
    if (mode == OuMode::Full) {
        const double scale = static_cast<double>(path.rows() - 1);
        const auto objective = [&](const Eigen::VectorXd& theta) {
            const double ll = ou_loglik(unpack(theta, d), path, dt);
            return std::isfinite(ll) ? -ll / scale : std::numeric_limits<double>::infinity();
        };
        optim::BfgsOptions opts;
        opts.max_iter = 300;
        opts.grad_tol = 1e-9;
        const auto res = optim::minimize_bfgs(objective, pack(fit.params), opts);
        const double ll = -res.value * scale;
        if (ll > fit.loglik) {
            fit.params = unpack(res.x, d);
            fit.loglik = ll;
        }
    }
    const Eigen::MatrixXd phi = transition(fit.params.A, dt);
    const double radius = phi.eigenvalues().cwiseAbs().maxCoeff();
    if (radius >= 1.0) fit.non_stationary = true;
    return fit;
}

Eigen::MatrixXd stationary_covariance(const OuParams& params) {
    const Eigen::Index d = params.dim();
    const Eigen::VectorXcd eig = params.A.eigenvalues();
    if (!(eig.real().minCoeff() > 0.0)) fail(ErrorCode::InvalidArgument, "mean reversion matrix is not stable");
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
    // vec(A S + S A^T) = (I (x) A + A (x) I) vec(S)
    Eigen::MatrixXd lyap = Eigen::MatrixXd::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            lyap.block(i * d, j * d, d, d) += eye(i, j) * params.A;
            lyap.block(i * d, j * d, d, d) += params.A(i, j) * eye;
        }
    }
    const Eigen::MatrixXd rhs = params.sigma.cwiseAbs2().asDiagonal();
    const Eigen::VectorXd s = lyap.partialPivLu().solve(rhs.reshaped());
    const Eigen::MatrixXd S = s.reshaped(d, d);
    return (S + S.transpose()) / 2.0;
}

int ou_parameter_count(Eigen::Index dim, OuMode mode) {
    const auto d = static_cast<int>(dim);
    return mode == OuMode::Diagonal ? 3 * d : d * d + 2 * d;
}

}  // namespace afreg
