#include "afreg/cli.hpp"

#include <array>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "afreg/af_estimator.hpp"
#include "afreg/backtest.hpp"
#include "afreg/error.hpp"
#include "afreg/hmm.hpp"
#include "afreg/mispricing.hpp"
#include "afreg/model_io.hpp"
#include "afreg/run_config.hpp"
#include "afreg/synthetic.hpp"

namespace afreg::cli {

namespace {

namespace fs = std::filesystem;

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool rates_in_percent = false;
    std::string quote_kind;
};

std::string num(double x) { return fmt::format("{}", x); }

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
    body(out);
    out.flush();
    if (!out) fail(ErrorCode::Io, fmt::format("write to '{}' failed", path.string()));
    spdlog::info("wrote {}", path.string());
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, fmt::format("cannot open '{}'", path));
    return in;
}

RunConfig resolve_config(const Globals& g) {
    RunConfig c = g.config_path.empty() ? RunConfig{} : load_run_config(g.config_path);
    if (g.seed) c.seed = *g.seed;
    c.estimator.seed = c.seed;
    if (!g.out.empty()) c.out = g.out;
    if (g.rates_in_percent) c.schema.rates_in_percent = true;
    if (!g.quote_kind.empty()) c.schema.quote_kind = parse_quote_kind(g.quote_kind);
    c.validate();
    fs::create_directories(c.out);
    return c;
}

std::string input_or(const std::string& given, const fs::path& fallback) {
    return given.empty() ? fallback.string() : given;
}

CurvePanel load_forward_panel(const RunConfig& c, const std::string& data) {
    const std::string path = data.empty() ? c.data : data;
    if (path.empty()) fail(ErrorCode::Io, "no input panel given (--data or config 'data')");
    return to_forward_rates(load_panel(path, c.schema));
}

int factor_count(const RunConfig& c, const CurvePanel& panel) {
    const int n = effective_factor_count(c.estimator.n_default, panel.n_maturities());
    if (n != c.estimator.n_default) {
        spdlog::warn("{} factors requested but the grid has {} maturities; using {}", c.estimator.n_default,
                     panel.n_maturities(), n);
    }
    return n;
}

// Applies cross-validated (gamma, n) to the estimator settings when requested.
void prepare_estimator(RunConfig& c, const CurvePanel& panel, EstimationMode mode) {
    c.estimator.mode = mode;
    if (!c.cross_validate) {
        c.estimator.n_default = factor_count(c, panel);
        if (std::find(c.estimator.n_factor_grid.begin(), c.estimator.n_factor_grid.end(), c.estimator.n_default) ==
            c.estimator.n_factor_grid.end()) {
            c.estimator.n_factor_grid.push_back(c.estimator.n_default);
        }
        return;
    }
    const CvResult cv = cross_validate(panel, c.estimator);
    spdlog::info("cross-validation picked gamma {} and {} factors", cv.gamma_star, cv.n_star);
    write_file(fs::path(c.out) / "cv_scores.csv", [&](std::ostream& out) {
        out << "parameter,value,mean_validation_sse\n";
        for (std::size_t i = 0; i < cv.gamma_scores.size(); ++i) {
            out << "gamma," << num(c.estimator.gamma_grid[i]) << ',' << num(cv.gamma_scores[i]) << '\n';
        }
        for (std::size_t i = 0; i < cv.n_scores.size(); ++i) {
            out << "n_factors," << c.estimator.n_factor_grid[i] << ','
                << (cv.n_scores[i] ? num(*cv.n_scores[i]) : std::string("NA")) << '\n';
        }
    });
    c.estimator.gamma_default = cv.gamma_star;
    c.estimator.n_default = cv.n_star;
}

// ---- small CSV helpers for the files this tool writes itself

std::vector<std::string_view> split(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(',', pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
}

double to_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) fail(ErrorCode::MalformedNumber, fmt::format("'{}'", s));
    return v;
}

struct SeriesTable {
    std::vector<Date> dates;
    Eigen::VectorXd maturities;
    Eigen::MatrixXd observed;
    Eigen::MatrixXd regularized;
    Eigen::MatrixXd empirical;
};

SeriesTable read_series(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    std::getline(in, line);
    if (split(line) != std::vector<std::string_view>{"date", "maturity", "observed", "regularized", "spread", "empirical"}) {
        fail(ErrorCode::MalformedHeader, fmt::format("'{}' is not a forecast series file", path));
    }
    std::vector<double> mats;
    std::vector<std::array<double, 3>> rows;
    SeriesTable s;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != 6) fail(ErrorCode::MalformedNumber, fmt::format("bad series row '{}'", line));
        const Date d = parse_date(cells[0]);
        if (s.dates.empty() || s.dates.back() != d) s.dates.push_back(d);
        if (s.dates.size() == 1) mats.push_back(to_double(cells[1]));
        rows.push_back({to_double(cells[2]), to_double(cells[3]), to_double(cells[5])});
    }
    const auto n = static_cast<Eigen::Index>(s.dates.size());
    const auto m = static_cast<Eigen::Index>(mats.size());
    if (n == 0 || static_cast<std::size_t>(n * m) != rows.size()) {
        fail(ErrorCode::MisalignedSeries, fmt::format("'{}' does not hold a full date x maturity grid", path));
    }
    s.maturities = Eigen::Map<Eigen::VectorXd>(mats.data(), m);
    s.observed.resize(n, m);
    s.regularized.resize(n, m);
    s.empirical.resize(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto& r = rows[static_cast<std::size_t>(i * m + j)];
            s.observed(i, j) = r[0];
            s.regularized(i, j) = r[1];
            s.empirical(i, j) = r[2];
        }
    }
    return s;
}

Eigen::Index maturity_index(const Eigen::VectorXd& maturities, double m) {
    for (Eigen::Index j = 0; j < maturities.size(); ++j) {
        if (maturities[j] == m) return j;
    }
    fail(ErrorCode::InvalidArgument, fmt::format("maturity {} is not on the grid", m));
}

std::string pair_label(double a, double b) { return fmt::format("{}-{}", a, b); }

backtest::PairKey parse_pair_label(std::string_view label) {
    const auto dash = label.find('-', 1);
    if (dash == std::string_view::npos) fail(ErrorCode::MalformedHeader, fmt::format("bad pair label '{}'", label));
    return {to_double(label.substr(0, dash)), to_double(label.substr(dash + 1))};
}

struct StatesTable {
    std::vector<Date> dates;
    std::vector<std::string> labels;
    std::vector<std::vector<PairState>> columns;
};

StatesTable read_states(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    std::getline(in, line);
    const auto header = split(line);
    if (header.size() < 2 || header[0] != "date") fail(ErrorCode::MalformedHeader, fmt::format("'{}' is not a states file", path));
    StatesTable t;
    for (std::size_t k = 1; k < header.size(); ++k) t.labels.emplace_back(header[k]);
    t.columns.resize(t.labels.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) fail(ErrorCode::MisalignedSeries, fmt::format("bad states row '{}'", line));
        t.dates.push_back(parse_date(cells[0]));
        for (std::size_t k = 1; k < cells.size(); ++k) t.columns[k - 1].push_back(parse_pair_state(cells[k]));
    }
    return t;
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> candidate_pairs(const RunConfig& c, const Eigen::VectorXd& maturities) {
    std::vector<Eigen::Index> idx;
    if (c.classify.candidate_maturities.empty()) {
        for (Eigen::Index j = 0; j < maturities.size(); ++j) idx.push_back(j);
    } else {
        for (double m : c.classify.candidate_maturities) idx.push_back(maturity_index(maturities, m));
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    }
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) pairs.emplace_back(idx[a], idx[b]);
    }
    if (pairs.empty()) fail(ErrorCode::NoCandidates, "need at least two candidate maturities");
    return pairs;
}

// ---- commands

int cmd_ingest(const Globals& g, const std::string& data) {
    const RunConfig c = resolve_config(g);
    const CurvePanel panel = load_forward_panel(c, data);
    std::cout << fmt::format("rows: {}\nmaturities: {}\nfirst: {}\nlast: {}\n", panel.n_dates(), panel.n_maturities(),
               format_date(panel.dates.front()), format_date(panel.dates.back()));
    for (Eigen::Index j = 0; j < panel.maturities.size(); ++j) {
        std::cout << fmt::format("  {:>6}  mean {:.6f}  min {:.6f}  max {:.6f}\n", num(panel.maturities[j]), panel.rates.col(j).mean(),
                   panel.rates.col(j).minCoeff(), panel.rates.col(j).maxCoeff());
    }
    write_file(fs::path(c.out) / "panel.csv", [&](std::ostream& out) { write_panel(out, panel); });
    return 0;
}

int cmd_fit(const Globals& g, const std::string& data, const std::string& mode) {
    RunConfig c = resolve_config(g);
    if (!mode.empty()) c.estimator.mode = parse_estimation_mode(mode);
    const CurvePanel panel = load_forward_panel(c, data);
    const int n = factor_count(c, panel);
    const PipelineFit fit = fit_pipeline(panel, basis_for(c.estimator, n), pipeline_options(c.estimator));
    if (fit.non_stationary) spdlog::warn("fitted factor dynamics are not stationary");
    write_file(fs::path(c.out) / "model.json", [&](std::ostream& out) { io::write_model(out, io::to_document(fit)); });
    std::cout << fmt::format("factors: {}\nmode: {}\nfilter loglik: {} (regression start {})\n", n, to_string(fit.options.mode),
               num(fit.filtered.loglik), num(fit.loglik_initial));
    return 0;
}

int cmd_forecast(const Globals& g, const std::string& data, bool cv) {
    RunConfig c = resolve_config(g);
    c.cross_validate = c.cross_validate || cv;
    const CurvePanel panel = load_forward_panel(c, data);
    prepare_estimator(c, panel, EstimationMode::Daily);
    const ForecastReport report = run_daily_forecast(panel, c.estimator);
    write_file(fs::path(c.out) / "forecast_report.csv", [&](std::ostream& out) { write_forecast_report(out, report); });
    write_file(fs::path(c.out) / "forecast_series.csv", [&](std::ostream& out) { write_forecast_series(out, report); });
    std::cout << fmt::format("gamma: {}\nfactors: {}\nsteps: {}\n", num(report.gamma), report.n_factors, report.series.observed.rows());
    return 0;
}

int cmd_estimate(const Globals& g, const std::string& data, bool cv) {
    RunConfig c = resolve_config(g);
    c.cross_validate = c.cross_validate || cv;
    const CurvePanel panel = load_forward_panel(c, data);
    prepare_estimator(c, panel, EstimationMode::Bimonthly);
    const ProportionReport report = run_bimonthly_estimate(panel, c.estimator);
    write_file(fs::path(c.out) / "proportion_report.csv", [&](std::ostream& out) { write_proportion_report(out, report); });
    write_file(fs::path(c.out) / "window_sse.csv", [&](std::ostream& out) {
        const auto& cmp = report.comparison;
        out << "window_start,maturity,sse_regularized,sse_empirical\n";
        for (Eigen::Index w = 0; w < cmp.sse_regularized.rows(); ++w) {
            const auto date = format_date(panel.dates[cmp.window_starts[static_cast<std::size_t>(w)]]);
            for (Eigen::Index j = 0; j < cmp.sse_regularized.cols(); ++j) {
                out << date << ',' << num(panel.maturities[j]) << ',' << num(cmp.sse_regularized(w, j)) << ','
                    << num(cmp.sse_empirical(w, j)) << '\n';
            }
        }
    });
    std::cout << fmt::format("gamma: {}\nfactors: {}\nwindows: {}\n", num(report.gamma), report.n_factors,
               report.rows.empty() ? 0 : report.rows.front().n_windows);
    for (const auto& r : report.rows) {
        std::cout << fmt::format("  {:>6}  p_hat {:.3f}  [{:.3f}, {:.3f}]\n", num(r.maturity), r.p_hat, r.wilson.lo, r.wilson.hi);
    }
    return 0;
}

int cmd_classify(const Globals& g, const std::string& series_path) {
    const RunConfig c = resolve_config(g);
    const SeriesTable s = read_series(input_or(series_path, fs::path(c.out) / "forecast_series.csv"));
    const auto warm = static_cast<std::size_t>(c.classify.warmup);

    write_file(fs::path(c.out) / "pi_table.csv", [&](std::ostream& out) {
        out << "epsilon_bp,delta,maturity,n,pi_hat,stdev,wilson_lo,wilson_hi\n";
        for (const auto& th : MispricingThresholds::presets()) {
            const auto labels = classify_panel(s.observed, s.regularized, s.empirical, th, warm);
            for (Eigen::Index j = 0; j < s.maturities.size(); ++j) {
                std::vector<MispricingLabel> col;
                for (const auto& row : labels) col.push_back(row[static_cast<std::size_t>(j)]);
                const PiEstimate e = estimate_pi(col, c.estimator.confidence);
                out << num(th.epsilon_bp) << ',' << num(th.delta) << ',' << num(s.maturities[j]) << ',' << e.n << ','
                    << num(e.pi_hat) << ',' << num(e.sd) << ',' << num(e.wilson.lo) << ',' << num(e.wilson.hi) << '\n';
            }
        }
    });

    const auto labels = classify_panel(s.observed, s.regularized, s.empirical, c.thresholds, warm);
    write_file(fs::path(c.out) / "labels.csv", [&](std::ostream& out) {
        out << "date,maturity,label\n";
        for (std::size_t t = 0; t < labels.size(); ++t) {
            for (Eigen::Index j = 0; j < s.maturities.size(); ++j) {
                out << format_date(s.dates[warm + t]) << ',' << num(s.maturities[j]) << ','
                    << to_string(labels[t][static_cast<std::size_t>(j)]) << '\n';
            }
        }
    });
    const auto pairs = candidate_pairs(c, s.maturities);
    write_file(fs::path(c.out) / "states.csv", [&](std::ostream& out) {
        out << "date";
        for (const auto& [a, b] : pairs) out << ',' << pair_label(s.maturities[a], s.maturities[b]);
        out << '\n';
        for (std::size_t t = 0; t < labels.size(); ++t) {
            out << format_date(s.dates[warm + t]);
            for (const auto& [a, b] : pairs) {
                out << ',' << to_string(pair_state(labels[t][static_cast<std::size_t>(a)], labels[t][static_cast<std::size_t>(b)]));
            }
            out << '\n';
        }
    });
    std::cout << fmt::format("dates classified: {}\npairs: {}\n", labels.size(), pairs.size());
    return 0;
}

int cmd_hmm(const Globals& g, const std::string& states_path) {
    const RunConfig c = resolve_config(g);
    const StatesTable states = read_states(input_or(states_path, fs::path(c.out) / "states.csv"));
    std::vector<io::HmmDocument> fits;
    std::map<backtest::PairKey, Eigen::MatrixXd> transitions;
    for (std::size_t k = 0; k < states.labels.size(); ++k) {
        hmm::Symbols obs;
        for (PairState st : states.columns[k]) obs.push_back(static_cast<int>(st));
        const auto init = hmm::initial_model(obs, 3);
        const auto res = hmm::baum_welch(obs, init, c.hmm.max_iter, c.hmm.tol);
        bool monotone = true;
        for (std::size_t i = 1; i < res.loglik_trace.size(); ++i) {
            monotone = monotone && res.loglik_trace[i] >= res.loglik_trace[i - 1] - 1e-9;
        }
        std::cout << fmt::format("{}: loglik {} after {} iterations, monotone {}, transition row sums {} {} {}\n", states.labels[k],
                   num(res.loglik_trace.back()), res.iterations, monotone ? "yes" : "no",
                   num(res.model.transition.row(0).sum()), num(res.model.transition.row(1).sum()),
                   num(res.model.transition.row(2).sum()));
        fits.push_back({states.labels[k], res.model, res.loglik_trace, res.iterations});
        transitions[parse_pair_label(states.labels[k])] = res.model.transition;
    }
    const auto best = backtest::select_pair(transitions);
    const std::string selected = pair_label(best.first, best.second);
    write_file(fs::path(c.out) / "hmm.json", [&](std::ostream& out) { io::write_hmm(out, fits, selected); });

    const auto it = std::find(states.labels.begin(), states.labels.end(), selected);
    const auto k = static_cast<std::size_t>(it - states.labels.begin());
    hmm::Symbols obs;
    for (PairState st : states.columns[k]) obs.push_back(static_cast<int>(st));
    const auto path = hmm::viterbi(fits[k].model, obs);
    write_file(fs::path(c.out) / "hmm_decoded.csv", [&](std::ostream& out) {
        out << "date,observed,hidden\n";
        for (std::size_t t = 0; t < obs.size(); ++t) {
            out << format_date(states.dates[t]) << ',' << to_string(states.columns[k][t]) << ',' << path[t] << '\n';
        }
    });
    std::cout << fmt::format("selected pair: {}\n", selected);
    return 0;
}

int cmd_backtest(const Globals& g, const std::string& series_path, const std::string& states_path,
                 const std::string& hmm_path) {
    const RunConfig c = resolve_config(g);
    const SeriesTable s = read_series(input_or(series_path, fs::path(c.out) / "forecast_series.csv"));
    const StatesTable states = read_states(input_or(states_path, fs::path(c.out) / "states.csv"));

    backtest::PairKey pair;
    if (!c.backtest.pair.empty()) {
        pair = {c.backtest.pair[0], c.backtest.pair[1]};
    } else {
        auto in = open_input(input_or(hmm_path, fs::path(c.out) / "hmm.json"));
        std::string selected;
        io::read_hmm(in, &selected);
        pair = parse_pair_label(selected);
    }
    const std::string label = pair_label(pair.first, pair.second);
    const auto col = std::find(states.labels.begin(), states.labels.end(), label);
    if (col == states.labels.end()) fail(ErrorCode::NoCandidates, fmt::format("pair {} not in the states file", label));
    const auto& pair_states = states.columns[static_cast<std::size_t>(col - states.labels.begin())];

    CurvePanel prices_panel;
    prices_panel.dates = s.dates;
    prices_panel.maturities = s.maturities;
    prices_panel.rates = s.observed;
    prices_panel.quote_kind = QuoteKind::Forward;
    const auto pricer = backtest::panel_pricer(prices_panel);

    std::vector<std::size_t> rows;
    {
        std::size_t r = 0;
        for (const Date d : states.dates) {
            while (r < s.dates.size() && s.dates[r] < d) ++r;
            if (r == s.dates.size() || s.dates[r] != d) {
                fail(ErrorCode::MisalignedSeries, fmt::format("state date {} missing from the series", format_date(d)));
            }
            rows.push_back(r);
        }
    }
    Eigen::MatrixXd prices(static_cast<Eigen::Index>(rows.size()), 2);
    std::vector<double> times;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        prices(static_cast<Eigen::Index>(t), 0) = pricer(rows[t], pair.first);
        prices(static_cast<Eigen::Index>(t), 1) = pricer(rows[t], pair.second);
        times.push_back(static_cast<double>(rows[t] - rows.front()) * c.estimator.dt);
    }
    std::vector<std::pair<std::string, backtest::MetricsRow>> metrics;
    const auto strategy = backtest::run_pairs_strategy(states.dates, prices, pair_states, c.backtest.strategy);
    write_file(fs::path(c.out) / "ledger_pairs.csv", [&](std::ostream& out) { backtest::write_ledger(out, strategy); });
    metrics.emplace_back("pairs_" + label, backtest::portfolio_metrics(strategy));

    const auto row_pricer = [&](std::size_t t, double ttm) { return pricer(rows[t], ttm); };
    for (double m : c.backtest.benchmark_maturities) {
        const auto hold = backtest::run_buy_and_hold(states.dates, times, row_pricer, m, c.backtest.strategy);
        write_file(fs::path(c.out) / fmt::format("ledger_hold_{}.csv", m),
                   [&](std::ostream& out) { backtest::write_ledger(out, hold); });
        metrics.emplace_back(fmt::format("buy_and_hold_{}", m), backtest::portfolio_metrics(hold));
    }
    write_file(fs::path(c.out) / "metrics.csv", [&](std::ostream& out) { backtest::write_metrics(out, metrics); });
    for (const auto& [name, m] : metrics) {
        std::cout << fmt::format("{}: terminal wealth {:.2f}, active {:.3f}\n", name, m.terminal_wealth, m.prop_active);
    }
    return 0;
}

int cmd_simulate(const Globals& g, const std::string& kind, int days, int windows, double noise) {
    const RunConfig c = resolve_config(g);
    const NsBasisSpec spec = basis_for(c.estimator, 3);
    OuParams ou;
    ou.A = Eigen::Vector3d(1.0, 1.5, 2.0).asDiagonal();
    ou.K = Eigen::Vector3d(0.05, -0.02, 0.01);
    ou.sigma = Eigen::Vector3d(0.02, 0.03, 0.03);
    const Eigen::VectorXd mats = Eigen::Map<const Eigen::VectorXd>(c.maturities.data(), static_cast<Eigen::Index>(c.maturities.size()));
    synthetic::SyntheticPanel p;
    if (kind == "factor") {
        p = synthetic::factor_panel(spec, ou, mats, days, c.estimator.dt, noise, c.seed);
    } else if (kind == "regularized") {
        p = synthetic::regularized_panel(spec, ou, c.estimator.gamma_default, mats, windows, c.estimator.window_len,
                                         c.estimator.dt, noise, c.seed);
    } else {
        fail(ErrorCode::InvalidArgument, fmt::format("unknown panel kind '{}'", kind));
    }
    write_file(fs::path(c.out) / "synthetic_panel.csv", [&](std::ostream& out) { write_panel(out, p.panel); });
    std::cout << fmt::format("rows: {}\n", p.panel.n_dates());
    return 0;
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("afreg");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("%^%l%$: %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("AFREG_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int run(int argc, char** argv) {
    if (!spdlog::get("afreg")) setup_logging();

    CLI::App app{"Arbitrage-free regularization of factor curve models"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    std::uint64_t seed = 0;
    app.add_option("--config", g.config_path, "JSON run configuration");
    auto* seed_opt = app.add_option("--seed", seed, "Seed recorded with the run and used by `simulate`");
    app.add_option("--out", g.out, "Output directory (default from config, else ./out)");
    app.add_flag("--rates-in-percent", g.rates_in_percent, "Input rates are percentages");
    app.add_option("--quote-kind", g.quote_kind, "forward or zero_yield")->check(CLI::IsMember({"forward", "zero_yield"}));

    std::string data;
    std::string mode;
    std::string series;
    std::string states;
    std::string hmm_file;
    std::string kind = "regularized";
    bool cv = false;
    int days = 2000;
    int windows = 220;
    double noise = 2e-4;

    auto* ingest = app.add_subcommand("ingest", "Validate a panel and print a summary");
    ingest->add_option("--data", data, "Panel CSV");
    auto* fit = app.add_subcommand("fit", "Fit the state-space factor model");
    fit->add_option("--data", data, "Panel CSV");
    fit->add_option("--mode", mode, "daily or bimonthly")->check(CLI::IsMember({"daily", "bimonthly"}));
    auto* forecast = app.add_subcommand("forecast", "One-step-ahead forecasts of the three models");
    forecast->add_option("--data", data, "Panel CSV");
    forecast->add_flag("--cv", cv, "Select gamma and the factor count by sequential validation");
    auto* estimate = app.add_subcommand("estimate", "Two-month window comparison and win proportions");
    estimate->add_option("--data", data, "Panel CSV");
    estimate->add_flag("--cv", cv, "Select gamma and the factor count by sequential validation");
    auto* classify = app.add_subcommand("classify", "Mispricing labels, pair states and probability tables");
    classify->add_option("--series", series, "Forecast series CSV (default <out>/forecast_series.csv)");
    auto* hmm_cmd = app.add_subcommand("hmm", "Fit a 3-state HMM per pair and pick the most active pair");
    hmm_cmd->add_option("--states", states, "States CSV (default <out>/states.csv)");
    auto* bt = app.add_subcommand("backtest", "Pairs strategy and buy-and-hold benchmarks");
    bt->add_option("--series", series, "Forecast series CSV (default <out>/forecast_series.csv)");
    bt->add_option("--states", states, "States CSV (default <out>/states.csv)");
    bt->add_option("--hmm", hmm_file, "HMM document naming the selected pair (default <out>/hmm.json)");
    auto* sim = app.add_subcommand("simulate", "Write a synthetic panel");
    sim->add_option("--kind", kind, "factor or regularized")->check(CLI::IsMember({"factor", "regularized"}));
    sim->add_option("--days", days, "Rows of a factor panel")->check(CLI::PositiveNumber);
    sim->add_option("--windows", windows, "Windows of a regularized panel")->check(CLI::PositiveNumber);
    sim->add_option("--noise", noise, "Observation noise standard deviation")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    if (seed_opt->count() > 0) g.seed = seed;

    try {
        if (ingest->parsed()) return cmd_ingest(g, data);
        if (fit->parsed()) return cmd_fit(g, data, mode);
        if (forecast->parsed()) return cmd_forecast(g, data, cv);
        if (estimate->parsed()) return cmd_estimate(g, data, cv);
        if (classify->parsed()) return cmd_classify(g, series);
        if (hmm_cmd->parsed()) return cmd_hmm(g, states);
        if (bt->parsed()) return cmd_backtest(g, series, states, hmm_file);
        if (sim->parsed()) return cmd_simulate(g, kind, days, windows, noise);
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 2;
}

}  // namespace afreg::cli
