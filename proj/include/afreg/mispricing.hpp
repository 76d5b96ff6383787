#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "afreg/stats.hpp"

namespace afreg {

/// epsilon in basis points of the forward rate; delta is a plain ratio margin.
struct MispricingThresholds {
    double epsilon_bp = 2.0;
    double delta = 0.8;

    void validate() const;
    double epsilon_decimal() const noexcept { return epsilon_bp * 1e-4; }

    /// (0.1, 0), (1, 0.1), (2, 0.8)
    static std::array<MispricingThresholds, 3> presets();
};

enum class MispricingLabel { Underpriced, Overpriced, Rational };
enum class PairState { AGreaterB = 0, ALessB = 1, Neutral = 2 };

std::string_view to_string(MispricingLabel label) noexcept;
std::string_view to_string(PairState state) noexcept;
PairState parse_pair_state(std::string_view text);

/// Rows are past dates, columns maturities. Counts entries whose squared deviation from the
/// overall mean error exceeds that of the same date's entry at `maturity_index`, per date.
double tail_count(const Eigen::MatrixXd& errors, Eigen::Index maturity_index);

/// Naive tail count over regularized tail count (+inf when only the latter is zero, NaN when both are).
double tail_ratio(const Eigen::MatrixXd& err_regularized, const Eigen::MatrixXd& err_naive,
                  Eigen::Index maturity_index);

MispricingLabel classify_point(double af_value, double naive_value, const Eigen::MatrixXd& err_af_history,
                               const Eigen::MatrixXd& err_naive_history, Eigen::Index maturity_index,
                               const MispricingThresholds& thresholds);

PairState pair_state(MispricingLabel a, MispricingLabel b) noexcept;

/// Labels for every date from `warmup` on and every maturity; the error history for date t
/// is rows 0..t of (model - observed).
std::vector<std::vector<MispricingLabel>> classify_panel(const Eigen::MatrixXd& observed,
                                                         const Eigen::MatrixXd& af_values,
                                                         const Eigen::MatrixXd& naive_values,
                                                         const MispricingThresholds& thresholds, std::size_t warmup);

std::vector<PairState> state_sequence(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& af_values,
                                      const Eigen::MatrixXd& naive_values,
                                      std::pair<Eigen::Index, Eigen::Index> pair,
                                      const MispricingThresholds& thresholds, std::size_t warmup);

struct PiEstimate {
    std::size_t n = 0;
    std::size_t mispriced = 0;
    double pi_hat = 0.0;
    double sd = 0.0;
    stats::Interval wilson;
};

PiEstimate estimate_pi(const std::vector<MispricingLabel>& labels, double confidence = 0.999);

}  // namespace afreg
