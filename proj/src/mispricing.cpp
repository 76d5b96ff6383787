#include "afreg/mispricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "afreg/error.hpp"

namespace afreg {

namespace {

void check_history(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::Index col) {
    if (a.size() == 0 || b.size() == 0) fail(ErrorCode::EmptyHistory, "error history is empty");
    if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorCode::MisalignedHistory, "error histories differ in shape");
    if (col < 0 || col >= a.cols()) fail(ErrorCode::InvalidArgument, fmt::format("maturity index {} out of range", col));
}

// Tail counts for several maturities over rows [0, rows) from one sorted pass.
class TailCounter {
public:
    TailCounter(const Eigen::MatrixXd& errors, Eigen::Index rows) : errors_(errors), rows_(rows) {
        const Eigen::Index n = errors.cols();
        mean_ = errors.topRows(rows).sum() / static_cast<double>(rows * n);
        sorted_.reserve(static_cast<std::size_t>(rows * n));
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) sorted_.push_back(dev(i, j));
        }
        std::sort(sorted_.begin(), sorted_.end());
    }

    double count(Eigen::Index col) const {
        double total = 0.0;
        for (Eigen::Index i = 0; i < rows_; ++i) {
            const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), dev(i, col));
            total += static_cast<double>(sorted_.end() - it);
        }
        return total / static_cast<double>(rows_);
    }

private:
    double dev(Eigen::Index i, Eigen::Index j) const {
        const double e = errors_(i, j) - mean_;
        return e * e;
    }

    const Eigen::MatrixXd& errors_;
    Eigen::Index rows_;
    double mean_ = 0.0;
    std::vector<double> sorted_;
};

double ratio(double naive_count, double regularized_count) {
    if (regularized_count == 0.0) {
        return naive_count > 0.0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
    }
    return naive_count / regularized_count;
}

MispricingLabel label_from(double af_value, double naive_value, double tail, const MispricingThresholds& th) {
    const double eps = th.epsilon_decimal();
    const bool tail_ok = 1.0 + th.delta < tail;  // false for NaN
    if (af_value > naive_value + eps && tail_ok) return MispricingLabel::Underpriced;
    if (naive_value > af_value + eps && tail_ok) return MispricingLabel::Overpriced;
    return MispricingLabel::Rational;
}

void check_panels(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& af, const Eigen::MatrixXd& naive,
                  std::size_t warmup) {
    if (observed.rows() != af.rows() || observed.rows() != naive.rows() || observed.cols() != af.cols() ||
        observed.cols() != naive.cols()) {
        fail(ErrorCode::MisalignedHistory, "observed and model series differ in shape");
    }
    if (static_cast<Eigen::Index>(warmup) >= observed.rows()) {
        fail(ErrorCode::EmptyInput, fmt::format("warmup {} leaves no dates out of {}", warmup, observed.rows()));
    }
}

}  // namespace

void MispricingThresholds::validate() const {
    if (!(epsilon_bp >= 0.0) || !(delta >= 0.0)) fail(ErrorCode::InvalidArgument, "thresholds must be nonnegative");
}

std::array<MispricingThresholds, 3> MispricingThresholds::presets() {
    return {MispricingThresholds{0.1, 0.0}, MispricingThresholds{1.0, 0.1}, MispricingThresholds{2.0, 0.8}};
}

std::string_view to_string(MispricingLabel label) noexcept {
    switch (label) {
        case MispricingLabel::Underpriced: return "underpriced";
        case MispricingLabel::Overpriced: return "overpriced";
        case MispricingLabel::Rational: return "rational";
    }
    return "rational";
}

std::string_view to_string(PairState state) noexcept {
    switch (state) {
        case PairState::AGreaterB: return "a_gt_b";
        case PairState::ALessB: return "a_lt_b";
        case PairState::Neutral: return "neutral";
    }
    return "neutral";
}

PairState parse_pair_state(std::string_view text) {
    if (text == "a_gt_b") return PairState::AGreaterB;
    if (text == "a_lt_b") return PairState::ALessB;
    if (text == "neutral") return PairState::Neutral;
    fail(ErrorCode::MalformedNumber, fmt::format("unknown pair state '{}'", text));
}

double tail_count(const Eigen::MatrixXd& errors, Eigen::Index maturity_index) {
    if (errors.size() == 0) fail(ErrorCode::EmptyHistory, "error history is empty");
    return TailCounter(errors, errors.rows()).count(maturity_index);
}

double tail_ratio(const Eigen::MatrixXd& err_regularized, const Eigen::MatrixXd& err_naive,
                  Eigen::Index maturity_index) {
    check_history(err_regularized, err_naive, maturity_index);
    return ratio(tail_count(err_naive, maturity_index), tail_count(err_regularized, maturity_index));
}

MispricingLabel classify_point(double af_value, double naive_value, const Eigen::MatrixXd& err_af_history,
                               const Eigen::MatrixXd& err_naive_history, Eigen::Index maturity_index,
                               const MispricingThresholds& thresholds) {
    thresholds.validate();
    return label_from(af_value, naive_value, tail_ratio(err_af_history, err_naive_history, maturity_index), thresholds);
}

PairState pair_state(MispricingLabel a, MispricingLabel b) noexcept {
    using L = MispricingLabel;
    const bool a_gt = (a == L::Overpriced && b == L::Rational) || (a == L::Rational && b == L::Underpriced) ||
                      (a == L::Overpriced && b == L::Underpriced);
    const bool a_lt = (b == L::Overpriced && a == L::Rational) || (b == L::Rational && a == L::Underpriced) ||
                      (b == L::Overpriced && a == L::Underpriced);
    if (a_gt) return PairState::AGreaterB;
    if (a_lt) return PairState::ALessB;
    return PairState::Neutral;
}

std::vector<std::vector<MispricingLabel>> classify_panel(const Eigen::MatrixXd& observed,
                                                         const Eigen::MatrixXd& af_values,
                                                         const Eigen::MatrixXd& naive_values,
                                                         const MispricingThresholds& thresholds, std::size_t warmup) {
    thresholds.validate();
    check_panels(observed, af_values, naive_values, warmup);
    const Eigen::MatrixXd err_af = af_values - observed;
    const Eigen::MatrixXd err_naive = naive_values - observed;
    std::vector<std::vector<MispricingLabel>> out;
    for (Eigen::Index t = static_cast<Eigen::Index>(warmup); t < observed.rows(); ++t) {
        const TailCounter reg(err_af, t + 1);
        const TailCounter naive(err_naive, t + 1);
        std::vector<MispricingLabel> row;
        for (Eigen::Index j = 0; j < observed.cols(); ++j) {
            row.push_back(label_from(af_values(t, j), naive_values(t, j), ratio(naive.count(j), reg.count(j)), thresholds));
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<PairState> state_sequence(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& af_values,
                                      const Eigen::MatrixXd& naive_values,
                                      std::pair<Eigen::Index, Eigen::Index> pair,
                                      const MispricingThresholds& thresholds, std::size_t warmup) {
    thresholds.validate();
    check_panels(observed, af_values, naive_values, warmup);
    const auto [ia, ib] = pair;
    if (ia < 0 || ib < 0 || ia >= observed.cols() || ib >= observed.cols()) {
        fail(ErrorCode::InvalidArgument, "pair maturity index out of range");
    }
    const Eigen::MatrixXd err_af = af_values - observed;
    const Eigen::MatrixXd err_naive = naive_values - observed;
    std::vector<PairState> out;
    for (Eigen::Index t = static_cast<Eigen::Index>(warmup); t < observed.rows(); ++t) {
        const TailCounter reg(err_af, t + 1);
        const TailCounter naive(err_naive, t + 1);
        const auto la = label_from(af_values(t, ia), naive_values(t, ia), ratio(naive.count(ia), reg.count(ia)), thresholds);
        const auto lb = label_from(af_values(t, ib), naive_values(t, ib), ratio(naive.count(ib), reg.count(ib)), thresholds);
        out.push_back(pair_state(la, lb));
    }
    return out;
}

PiEstimate estimate_pi(const std::vector<MispricingLabel>& labels, double confidence) {
    if (labels.empty()) fail(ErrorCode::EmptyInput, "no labels");
    PiEstimate e;
    e.n = labels.size();
    e.mispriced = static_cast<std::size_t>(
        std::count_if(labels.begin(), labels.end(), [](MispricingLabel l) { return l != MispricingLabel::Rational; }));
    e.pi_hat = static_cast<double>(e.mispriced) / static_cast<double>(e.n);
    e.sd = std::sqrt(e.pi_hat * (1.0 - e.pi_hat) / static_cast<double>(e.n));
    e.wilson = stats::wilson_interval(e.mispriced, e.n, confidence);
    return e;
}

}  // namespace afreg
