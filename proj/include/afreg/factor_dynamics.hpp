#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace afreg {

/// dbeta = A (K - beta) dt + diag(sigma) dW
struct OuParams {
    Eigen::MatrixXd A;
    Eigen::VectorXd K;
    Eigen::VectorXd sigma;

    Eigen::Index dim() const noexcept { return K.size(); }
    bool is_diagonal() const;
    void validate() const;
};

/// beta_{k+1} = Phi beta_k + c + eps,  eps ~ N(0, Q)
struct DiscreteOu {
    Eigen::MatrixXd Phi;
    Eigen::VectorXd c;
    Eigen::MatrixXd Q;
    double dt = 0.0;
};

enum class OuMode { Diagonal, Full };

/// Closed form for diagonal A; otherwise the noise covariance integral is done by
/// composite Gauss-Legendre quadrature.
DiscreteOu exact_discretization(const OuParams& params, double dt);

/// Always uses quadrature for Q (also for diagonal A).
Eigen::MatrixXd discretize_noise_by_quadrature(const OuParams& params, double dt);

/// Rows are beta_0 .. beta_n_steps.
Eigen::MatrixXd simulate(const OuParams& params, const Eigen::VectorXd& beta0, double dt, int n_steps,
                         std::uint64_t seed);

struct OuFit {
    OuParams params;
    bool non_stationary = false;  // a fitted AR coefficient was clamped or |eig(Phi)| >= 1
    double loglik = 0.0;
};

/// Conditional Gaussian log-likelihood of the path under the exact discretization.
double ou_loglik(const OuParams& params, const Eigen::MatrixXd& path, double dt);

/// Maximum likelihood. Diagonal mode fits each coordinate by AR(1) least squares;
/// full mode refines that start with a quasi-Newton search over (A, K, log sigma).
OuFit mle_fit(const Eigen::MatrixXd& path, double dt, OuMode mode = OuMode::Diagonal);

/// Stationary covariance solving A S + S A^T = Sigma Sigma^T (requires a stable A).
Eigen::MatrixXd stationary_covariance(const OuParams& params);

/// Number of free parameters in the given mode.
int ou_parameter_count(Eigen::Index dim, OuMode mode);

}  // namespace afreg
