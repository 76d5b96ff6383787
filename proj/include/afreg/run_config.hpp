#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "afreg/af_estimator.hpp"
#include "afreg/backtest.hpp"
#include "afreg/market_data.hpp"
#include "afreg/mispricing.hpp"

namespace afreg {

struct HmmSettings {
    int max_iter = 500;
    double tol = 1e-8;
};

struct ClassifySettings {
    int warmup = 20;                          // forecast steps used only as error history
    std::vector<double> candidate_maturities;  // empty: every maturity in the series
};

struct BacktestSettings {
    backtest::StrategyConfig strategy;
    std::vector<double> benchmark_maturities{2.0, 10.0};
    std::vector<double> pair;  // empty: the pair chosen from the HMM fits
};

/// Every knob of a batch run. JSON keys mirror the field names; absent keys keep the defaults.
struct RunConfig {
    std::string data;
    PanelSchema schema;
    AfEstimatorConfig estimator;
    bool cross_validate = false;
    MispricingThresholds thresholds;  // labels and states; the pi tables also sweep the presets
    ClassifySettings classify;
    HmmSettings hmm;
    BacktestSettings backtest;
    std::vector<double> maturities{1, 2, 3, 5, 7, 10, 20, 30};  // synthetic panels
    std::uint64_t seed = 0;
    std::string out = "out";

    void validate() const;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(std::istream& in);
void write_run_config(std::ostream& out, const RunConfig& config);

}  // namespace afreg
