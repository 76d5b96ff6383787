#include "afreg/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "afreg/error.hpp"
#include "afreg/factor_basis.hpp"

namespace afreg::backtest {

namespace {

PortfolioLedger empty_ledger(const std::vector<Date>& dates, double capital) {
    PortfolioLedger l;
    l.dates = dates;
    l.initial_capital = capital;
    const auto n = static_cast<Eigen::Index>(dates.size());
    l.positions = Eigen::MatrixXd::Zero(n, 2);
    l.prices = Eigen::MatrixXd::Zero(n, 2);
    l.carried = Eigen::MatrixXd::Zero(n, 2);
    l.cash.reserve(dates.size());
    l.wealth.reserve(dates.size());
    return l;
}

double mark(const PortfolioLedger& l, Eigen::Index t, double cash) {
    return cash + l.positions(t, 0) * l.prices(t, 0) + l.positions(t, 1) * l.prices(t, 1);
}

std::string num(double x) { return fmt::format("{}", x); }

}  // namespace

void StrategyConfig::validate() const {
    if (!(initial_capital > 0.0)) fail(ErrorCode::InvalidArgument, "initial capital must be positive");
    if (!(trade_units > 0.0)) fail(ErrorCode::InvalidArgument, "trade units must be positive");
}

double self_financing_residual(const PortfolioLedger& ledger) {
    double worst = 0.0;
    for (std::size_t t = 1; t < ledger.size(); ++t) {
        const auto i = static_cast<Eigen::Index>(t);
        const double pnl = ledger.positions.row(i - 1).dot(ledger.carried.row(i) - ledger.prices.row(i - 1));
        worst = std::max(worst, std::abs(ledger.wealth[t] - ledger.wealth[t - 1] - pnl));
    }
    return worst;
}

double fluctuation_score(const Eigen::MatrixXd& transition) {
    return transition.squaredNorm() - transition.diagonal().squaredNorm();
}

PairKey select_pair(const std::map<PairKey, Eigen::MatrixXd>& transition_matrices) {
    if (transition_matrices.empty()) fail(ErrorCode::NoCandidates, "no candidate pairs");
    auto best = transition_matrices.begin();
    double best_score = fluctuation_score(best->second);
    for (auto it = std::next(best); it != transition_matrices.end(); ++it) {
        const double s = fluctuation_score(it->second);
        if (s > best_score) {
            best = it;
            best_score = s;
        }
    }
    return best->first;
}

PortfolioLedger run_pairs_strategy(const std::vector<Date>& dates, const Eigen::MatrixXd& prices,
                                   const std::vector<PairState>& states, const StrategyConfig& config) {
    config.validate();
    if (prices.rows() != static_cast<Eigen::Index>(dates.size()) || states.size() != dates.size() || prices.cols() != 2) {
        fail(ErrorCode::MisalignedSeries, "prices, states and dates must align with two price columns");
    }
    PortfolioLedger l = empty_ledger(dates, config.initial_capital);
    const double K = config.trade_units;
    double cash = config.initial_capital;
    bool open = false;
    double entry_a = 0.0;
    double entry_b = 0.0;

    for (std::size_t t = 0; t < dates.size(); ++t) {
        const auto i = static_cast<Eigen::Index>(t);
        const double pa = prices(i, 0);
        const double pb = prices(i, 1);
        l.carried.row(i) = prices.row(i);
        if (t > 0) l.positions.row(i) = l.positions.row(i - 1);
        l.prices.row(i) = prices.row(i);
        const double before = mark(l, i, cash);

        const auto close = [&] {
            cash -= K * pa;
            cash += K * pb;
            l.trades.push_back({t, 0, K, pa});
            l.trades.push_back({t, 1, -K, pb});
            l.positions.row(i).setZero();
            open = false;
        };
        if (!open && states[t] == PairState::AGreaterB && config.allow_short &&
            (!config.nonneg_value_floor || before >= K * (pa + pb))) {
            cash += K * pa;
            cash -= K * pb;
            l.trades.push_back({t, 0, -K, pa});
            l.trades.push_back({t, 1, K, pb});
            l.positions(i, 0) = -K;
            l.positions(i, 1) = K;
            entry_a = pa;
            entry_b = pb;
            open = true;
        } else if (open && states[t] == PairState::ALessB && pb > entry_b && pa > entry_a) {
            close();
        } else if (open && config.nonneg_value_floor && before < 0.0) {
            close();
        }
        l.cash.push_back(cash);
        l.wealth.push_back(mark(l, i, cash));
    }
    return l;
}

BondPricer panel_pricer(const CurvePanel& forward_panel) {
    if (forward_panel.quote_kind != QuoteKind::Forward) {
        fail(ErrorCode::InvalidArgument, "bond prices need a forward-rate panel");
    }
    const CurvePanel panel = forward_panel;
    return [panel](std::size_t row, double ttm) {
        const Eigen::VectorXd& m = panel.maturities;
        const Eigen::VectorXd f = panel.rates.row(static_cast<Eigen::Index>(row)).transpose();
        const CurveFunction curve = [&m, f](double s) {
            const Eigen::Index n = m.size();
            if (s <= m[0]) return f[0];
            if (s >= m[n - 1]) return f[n - 1];
            const auto* it = std::upper_bound(m.data(), m.data() + n, s);
            const auto j = static_cast<Eigen::Index>(it - m.data());
            const double w = (s - m[j - 1]) / (m[j] - m[j - 1]);
            return f[j - 1] + w * (f[j] - f[j - 1]);
        };
        return bond_price(curve, 0.0, ttm);
    };
}

PortfolioLedger run_buy_and_hold(const std::vector<Date>& dates, const std::vector<double>& times,
                                 const BondPricer& pricer, double maturity, const StrategyConfig& config) {
    config.validate();
    if (times.size() != dates.size()) fail(ErrorCode::MisalignedSeries, "times and dates must align");
    if (dates.empty()) fail(ErrorCode::EmptyLedger, "no dates");
    if (!(maturity > 0.0)) fail(ErrorCode::NonPositiveMaturity, "bond maturity must be positive");
    PortfolioLedger l = empty_ledger(dates, config.initial_capital);
    double cash = config.initial_capital;
    double units = 0.0;
    double expiry = 0.0;

    const auto buy = [&](std::size_t t) {
        const double p = pricer(t, maturity);
        units = cash / p;
        cash -= units * p;
        expiry = times[t] + maturity;
        l.trades.push_back({t, 0, units, p});
        return p;
    };
    for (std::size_t t = 0; t < dates.size(); ++t) {
        const auto i = static_cast<Eigen::Index>(t);
        double price = 0.0;
        if (t == 0) {
            price = buy(t);
            l.carried(i, 0) = price;
        } else {
            const double ttm = expiry - times[t];
            if (ttm <= 1e-12) {
                l.carried(i, 0) = 1.0;  // redeemed at par
                cash += units;
                l.trades.push_back({t, 0, -units, 1.0});
                price = buy(t);
            } else {
                price = pricer(t, ttm);
                l.carried(i, 0) = price;
            }
        }
        l.positions(i, 0) = units;
        l.prices(i, 0) = price;
        l.cash.push_back(cash);
        l.wealth.push_back(mark(l, i, cash));
    }
    return l;
}

double expected_shortfall(const std::vector<double>& returns, double level) {
    if (returns.empty()) fail(ErrorCode::EmptyReturns, "no returns");
    if (!(level >= 0.0 && level < 1.0)) fail(ErrorCode::InvalidArgument, "level must lie in [0, 1)");
    std::vector<double> losses(returns.size());
    std::transform(returns.begin(), returns.end(), losses.begin(), [](double r) { return -r; });
    std::sort(losses.begin(), losses.end(), std::greater<>());
    const double n = static_cast<double>(losses.size());
    // the tiny slack keeps e.g. (1 - 0.9) * 10 from rounding up to 2
    auto k = static_cast<std::size_t>(std::ceil((1.0 - level) * n - 1e-9));
    k = std::clamp<std::size_t>(k, 1, losses.size());
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) total += losses[i];
    return total / static_cast<double>(k);
}

std::vector<double> wealth_returns(const PortfolioLedger& ledger) {
    std::vector<double> r;
    for (std::size_t t = 1; t < ledger.size(); ++t) {
        const double prev = ledger.wealth[t - 1];
        r.push_back(prev != 0.0 ? (ledger.wealth[t] - prev) / prev : 0.0);
    }
    return r;
}

MetricsRow portfolio_metrics(const PortfolioLedger& ledger) {
    if (ledger.size() == 0) fail(ErrorCode::EmptyLedger, "ledger has no steps");
    MetricsRow m;
    m.terminal_wealth = ledger.wealth.back();
    m.min_excess = std::numeric_limits<double>::infinity();
    m.max_excess = -std::numeric_limits<double>::infinity();
    std::size_t active = 0;
    for (std::size_t t = 0; t < ledger.size(); ++t) {
        const double excess = ledger.wealth[t] - ledger.initial_capital;
        m.min_excess = std::min(m.min_excess, excess);
        m.max_excess = std::max(m.max_excess, excess);
        if ((ledger.positions.row(static_cast<Eigen::Index>(t)).array() != 0.0).any()) ++active;
    }
    m.prop_active = static_cast<double>(active) / static_cast<double>(ledger.size());
    const auto returns = wealth_returns(ledger);
    for (std::size_t k = 0; k < kEsLevels.size(); ++k) {
        m.es[k] = returns.empty() ? std::numeric_limits<double>::quiet_NaN() : expected_shortfall(returns, kEsLevels[k]);
    }
    return m;
}

void write_ledger(std::ostream& out, const PortfolioLedger& ledger) {
    out << "timestamp,cash,position_Ta,position_Tb,wealth\n";
    for (std::size_t t = 0; t < ledger.size(); ++t) {
        const auto i = static_cast<Eigen::Index>(t);
        out << format_date(ledger.dates[t]) << ',' << num(ledger.cash[t]) << ',' << num(ledger.positions(i, 0)) << ','
            << num(ledger.positions(i, 1)) << ',' << num(ledger.wealth[t]) << '\n';
    }
}

void write_metrics(std::ostream& out, const std::vector<std::pair<std::string, MetricsRow>>& rows) {
    out << "strategy,terminal_wealth,min_excess_wealth,max_excess_wealth";
    for (double level : kEsLevels) out << ",es_" << num(level);
    out << ",prop_active\n";
    for (const auto& [name, m] : rows) {
        out << name << ',' << num(m.terminal_wealth) << ',' << num(m.min_excess) << ',' << num(m.max_excess);
        for (double v : m.es) out << ',' << (std::isnan(v) ? std::string("NA") : num(v));
        out << ',' << num(m.prop_active) << '\n';
    }
}

}  // namespace afreg::backtest
