#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "afreg/market_data.hpp"
#include "afreg/mispricing.hpp"

namespace afreg::backtest {

struct StrategyConfig {
    double initial_capital = 1'000'000.0;
    double trade_units = 1000.0;  // K
    bool allow_short = true;
    bool nonneg_value_floor = true;

    void validate() const;
};

struct Trade {
    std::size_t step = 0;
    int leg = 0;  // 0: T_a, 1: T_b
    double units = 0.0;
    double price = 0.0;
};

/// Two legs; buy-and-hold uses leg 0 only.
struct PortfolioLedger {
    std::vector<Date> dates;
    std::vector<double> cash;
    Eigen::MatrixXd positions;  // units held after trading at each step
    Eigen::MatrixXd prices;     // marks of the instruments held after trading
    Eigen::MatrixXd carried;    // marks at step t of the instruments held over (t-1, t]
    std::vector<Trade> trades;
    std::vector<double> wealth;
    double initial_capital = 0.0;

    std::size_t size() const noexcept { return wealth.size(); }
};

/// max_t |w_t - w_{t-1} - positions_{t-1} . (carried_t - prices_{t-1})|
double self_financing_residual(const PortfolioLedger& ledger);

/// Sum of squared off-diagonal transition probabilities.
double fluctuation_score(const Eigen::MatrixXd& transition);

using PairKey = std::pair<double, double>;

/// The pair whose state chain switches most; ties go to the smallest (T_a, T_b).
PairKey select_pair(const std::map<PairKey, Eigen::MatrixXd>& transition_matrices);

/// Short T_a / long T_b by K units on a_gt_b when flat; unwind on a_lt_b once both legs trade
/// above their entry prices. With the value floor, entries need wealth >= K (P_a + P_b) and an open
/// trade is closed if wealth turns negative. Without short sales the strategy never enters.
PortfolioLedger run_pairs_strategy(const std::vector<Date>& dates, const Eigen::MatrixXd& prices,
                                   const std::vector<PairState>& states, const StrategyConfig& config);

/// Price of a zero-coupon bond at `row` with the given time to maturity (years).
using BondPricer = std::function<double(std::size_t row, double time_to_maturity)>;

/// Prices from each row's forward curve, linearly interpolated in maturity (flat outside the grid).
BondPricer panel_pricer(const CurvePanel& forward_panel);

/// All wealth in the bond maturing `maturity` years ahead; at the first row on or after expiry the
/// bond pays par and the proceeds buy a new one. `times` are row times in years.
PortfolioLedger run_buy_and_hold(const std::vector<Date>& dates, const std::vector<double>& times,
                                 const BondPricer& pricer, double maturity, const StrategyConfig& config);

/// Mean of the worst ceil((1 - level) n) losses, losses = -returns.
double expected_shortfall(const std::vector<double>& returns, double level);

inline constexpr std::array<double, 5> kEsLevels{0.5, 0.9, 0.95, 0.99, 0.999};

struct MetricsRow {
    double terminal_wealth = 0.0;
    double min_excess = 0.0;
    double max_excess = 0.0;
    std::array<double, 5> es{};  // at kEsLevels; NaN for a one-step ledger
    double prop_active = 0.0;
};

/// Per-step simple wealth returns.
std::vector<double> wealth_returns(const PortfolioLedger& ledger);

MetricsRow portfolio_metrics(const PortfolioLedger& ledger);

void write_ledger(std::ostream& out, const PortfolioLedger& ledger);
void write_metrics(std::ostream& out, const std::vector<std::pair<std::string, MetricsRow>>& rows);

}  // namespace afreg::backtest
