#include "afreg/run_config.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "afreg/error.hpp"

namespace afreg {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) fail(ErrorCode::Config, fmt::format("unknown key '{}' in {}", key, where));
    }
}

template <typename T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json to_json(const RunConfig& c) {
    const auto& e = c.estimator;
    json j;
    j["data"] = c.data;
    j["quote_kind"] = std::string(to_string(c.schema.quote_kind));
    j["rates_in_percent"] = c.schema.rates_in_percent;
    j["basis"] = {{"n_factors", e.n_default}, {"tau", e.tau}, {"exponents", e.exponents}};
    j["estimator"] = {{"mode", std::string(to_string(e.mode))},
                      {"gamma_grid", e.gamma_grid},
                      {"n_factor_grid", e.n_factor_grid},
                      {"gamma_default", e.gamma_default},
                      {"cv_folds", e.cv_folds},
                      {"cross_validate", c.cross_validate},
                      {"dt", e.dt},
                      {"window_len", e.window_len},
                      {"warmup", e.warmup},
                      {"factor_source", std::string(to_string(e.estimator))},
                      {"ou_mode", e.ou_mode == OuMode::Diagonal ? "diagonal" : "full"},
                      {"state_space_ml", e.state_space_ml},
                      {"confidence", e.confidence}};
    j["thresholds"] = {{"epsilon_bp", c.thresholds.epsilon_bp}, {"delta", c.thresholds.delta}};
    j["classify"] = {{"warmup", c.classify.warmup}, {"candidate_maturities", c.classify.candidate_maturities}};
    j["hmm"] = {{"max_iter", c.hmm.max_iter}, {"tol", c.hmm.tol}};
    const auto& s = c.backtest.strategy;
    j["strategy"] = {{"initial_capital", s.initial_capital},
                     {"trade_units", s.trade_units},
                     {"allow_short", s.allow_short},
                     {"nonneg_value_floor", s.nonneg_value_floor},
                     {"benchmark_maturities", c.backtest.benchmark_maturities},
                     {"pair", c.backtest.pair}};
    j["maturities"] = c.maturities;
    j["seed"] = c.seed;
    j["out"] = c.out;
    return j;
}

}  // namespace

void RunConfig::validate() const {
    estimator.validate();
    thresholds.validate();
    backtest.strategy.validate();
    if (classify.warmup < 0) fail(ErrorCode::Config, "classify.warmup must be nonnegative");
    if (hmm.max_iter < 1 || !(hmm.tol >= 0.0)) fail(ErrorCode::Config, "hmm settings out of range");
    if (!backtest.pair.empty() && backtest.pair.size() != 2) fail(ErrorCode::Config, "strategy.pair needs two maturities");
}

RunConfig parse_run_config(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::Config, fmt::format("malformed config: {}", e.what()));
    }
    RunConfig c;
    try {
        reject_unknown(j, {"data", "quote_kind", "rates_in_percent", "basis", "estimator", "thresholds", "classify", "hmm",
                           "strategy", "maturities", "seed", "out"},
                       "config");
        take(j, "data", c.data);
        if (j.contains("quote_kind")) c.schema.quote_kind = parse_quote_kind(j.at("quote_kind").get<std::string>());
        take(j, "rates_in_percent", c.schema.rates_in_percent);
        take(j, "maturities", c.maturities);
        take(j, "seed", c.seed);
        take(j, "out", c.out);
        auto& e = c.estimator;
        if (j.contains("basis")) {
            const auto& b = j.at("basis");
            reject_unknown(b, {"n_factors", "tau", "exponents"}, "basis");
            take(b, "n_factors", e.n_default);
            take(b, "tau", e.tau);
            take(b, "exponents", e.exponents);
        }
        if (j.contains("estimator")) {
            const auto& s = j.at("estimator");
            reject_unknown(s, {"mode", "gamma_grid", "n_factor_grid", "gamma_default", "cv_folds", "cross_validate", "dt",
                               "window_len", "warmup", "factor_source", "ou_mode", "state_space_ml", "confidence"},
                           "estimator");
            if (s.contains("mode")) e.mode = parse_estimation_mode(s.at("mode").get<std::string>());
            take(s, "gamma_grid", e.gamma_grid);
            take(s, "n_factor_grid", e.n_factor_grid);
            take(s, "gamma_default", e.gamma_default);
            take(s, "cv_folds", e.cv_folds);
            take(s, "cross_validate", c.cross_validate);
            take(s, "dt", e.dt);
            take(s, "window_len", e.window_len);
            take(s, "warmup", e.warmup);
            if (s.contains("factor_source")) e.estimator = parse_factor_source(s.at("factor_source").get<std::string>());
            if (s.contains("ou_mode")) {
                const auto mode = s.at("ou_mode").get<std::string>();
                if (mode != "diagonal" && mode != "full") fail(ErrorCode::Config, fmt::format("unknown ou_mode '{}'", mode));
                e.ou_mode = mode == "full" ? OuMode::Full : OuMode::Diagonal;
            }
            take(s, "state_space_ml", e.state_space_ml);
            take(s, "confidence", e.confidence);
        }
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            reject_unknown(t, {"epsilon_bp", "delta"}, "thresholds");
            take(t, "epsilon_bp", c.thresholds.epsilon_bp);
            take(t, "delta", c.thresholds.delta);
        }
        if (j.contains("classify")) {
            const auto& t = j.at("classify");
            reject_unknown(t, {"warmup", "candidate_maturities"}, "classify");
            take(t, "warmup", c.classify.warmup);
            take(t, "candidate_maturities", c.classify.candidate_maturities);
        }
        if (j.contains("hmm")) {
            const auto& t = j.at("hmm");
            reject_unknown(t, {"max_iter", "tol"}, "hmm");
            take(t, "max_iter", c.hmm.max_iter);
            take(t, "tol", c.hmm.tol);
        }
        if (j.contains("strategy")) {
            const auto& t = j.at("strategy");
            reject_unknown(t, {"initial_capital", "trade_units", "allow_short", "nonneg_value_floor",
                               "benchmark_maturities", "pair"},
                           "strategy");
            auto& s = c.backtest.strategy;
            take(t, "initial_capital", s.initial_capital);
            take(t, "trade_units", s.trade_units);
            take(t, "allow_short", s.allow_short);
            take(t, "nonneg_value_floor", s.nonneg_value_floor);
            take(t, "benchmark_maturities", c.backtest.benchmark_maturities);
            take(t, "pair", c.backtest.pair);
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::Config, fmt::format("config field error: {}", e.what()));
    }
    c.validate();
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, fmt::format("cannot open config '{}'", path));
    return parse_run_config(in);
}

void write_run_config(std::ostream& out, const RunConfig& config) { out << to_json(config).dump(2) << '\n'; }

}  // namespace afreg
