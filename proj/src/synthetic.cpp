#include "afreg/synthetic.hpp"

#include <random>

#include "afreg/af_estimator.hpp"
#include "afreg/error.hpp"

namespace afreg::synthetic {

namespace {

constexpr std::uint64_t kNoiseStream = 0x9E3779B97F4A7C15ULL;

CurvePanel empty_panel(const Eigen::VectorXd& maturities, std::size_t rows) {
    CurvePanel p;
    p.maturities = maturities;
    p.quote_kind = QuoteKind::Forward;
    p.dates = weekday_calendar(Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{3}}, rows);
    p.rates.resize(static_cast<Eigen::Index>(rows), maturities.size());
    return p;
}

}  // namespace

Eigen::VectorXd standard_maturities() {
    Eigen::VectorXd m(8);
    m << 1, 2, 3, 5, 7, 10, 20, 30;
    return m;
}

SyntheticPanel factor_panel(const NsBasisSpec& spec, const OuParams& ou, const Eigen::VectorXd& maturities,
                            int n_days, double dt, double noise_sd, std::uint64_t seed,
                            const std::optional<Eigen::VectorXd>& beta0) {
    if (n_days < 1) fail(ErrorCode::InvalidArgument, "need at least one day");
    SyntheticPanel out;
    out.betas = simulate(ou, beta0.value_or(ou.K), dt, n_days - 1, seed);
    out.panel = empty_panel(maturities, static_cast<std::size_t>(n_days));
    std::mt19937_64 rng(seed ^ kNoiseStream);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::MatrixXd X = design_matrix(spec, maturities);
    for (Eigen::Index i = 0; i < n_days; ++i) {
        out.panel.rates.row(i) = out.betas.row(i) * X.transpose();
        for (Eigen::Index j = 0; j < maturities.size(); ++j) out.panel.rates(i, j) += noise_sd * normal(rng);
    }
    return out;
}

SyntheticPanel regularized_panel(const NsBasisSpec& spec, const OuParams& ou, double gamma,
                                 const Eigen::VectorXd& maturities, int n_windows, int window_len, double dt,
                                 double noise_sd, std::uint64_t seed) {
    if (n_windows < 1 || window_len < 1) fail(ErrorCode::InvalidArgument, "need at least one window");
    SyntheticPanel out;
    out.betas = simulate(ou, ou.K, dt * window_len, n_windows - 1, seed);
    out.panel = empty_panel(maturities, static_cast<std::size_t>(n_windows) * static_cast<std::size_t>(window_len));
    const LinearFlowModel model{spec, ou};
    std::vector<AffineCurveMap> maps;
    for (int k = 0; k < window_len; ++k) maps.push_back(af_affine_map(model, maturities, gamma, k * dt));

    std::mt19937_64 rng(seed ^ kNoiseStream);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index w = 0; w < n_windows; ++w) {
        const Eigen::VectorXd beta = out.betas.row(w).transpose();
        for (int k = 0; k < window_len; ++k) {
            const Eigen::Index row = w * window_len + k;
            const auto& map = maps[static_cast<std::size_t>(k)];
            out.panel.rates.row(row) = (map.G * beta + map.h).transpose();
            for (Eigen::Index j = 0; j < maturities.size(); ++j) out.panel.rates(row, j) += noise_sd * normal(rng);
        }
    }
    return out;
}

}  // namespace afreg::synthetic
