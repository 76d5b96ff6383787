#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "afreg/factor_basis.hpp"
#include "afreg/factor_dynamics.hpp"
#include "afreg/market_data.hpp"

namespace afreg::synthetic {

struct SyntheticPanel {
    CurvePanel panel;
    Eigen::MatrixXd betas;  // true factors, one row per panel row (or per window)
};

/// Daily OU factors observed through the basis with iid Gaussian noise.
SyntheticPanel factor_panel(const NsBasisSpec& spec, const OuParams& ou, const Eigen::VectorXd& maturities,
                            int n_days, double dt, double noise_sd, std::uint64_t seed,
                            const std::optional<Eigen::VectorXd>& beta0 = std::nullopt);

/// Window-level OU factors, held for window_len rows; each row is the regularized curve
/// (shift plus spread, clock restarting at the window's first row) plus iid noise.
/// betas holds one row per window.
SyntheticPanel regularized_panel(const NsBasisSpec& spec, const OuParams& ou, double gamma,
                                 const Eigen::VectorXd& maturities, int n_windows, int window_len, double dt,
                                 double noise_sd, std::uint64_t seed);

/// The maturity grid 1, 2, 3, 5, 7, 10, 20, 30 years.
Eigen::VectorXd standard_maturities();

}  // namespace afreg::synthetic
