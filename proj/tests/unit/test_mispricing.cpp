#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "afreg/error.hpp"
#include "afreg/mispricing.hpp"

using namespace afreg;
using Eigen::MatrixXd;
using L = MispricingLabel;

namespace {

// Average over dates of the number of cells in the whole history with a larger squared deviation.
double tail_count_oracle(const MatrixXd& e, Eigen::Index col) {
    const double mean = e.mean();
    double total = 0.0;
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
        const double ref = (e(i, col) - mean) * (e(i, col) - mean);
        for (Eigen::Index k = 0; k < e.rows(); ++k) {
            for (Eigen::Index l = 0; l < e.cols(); ++l) {
                if ((e(k, l) - mean) * (e(k, l) - mean) > ref) total += 1.0;
            }
        }
    }
    return total / static_cast<double>(e.rows());
}

L label_oracle(double af, double naive, const MatrixXd& ea, const MatrixXd& en, Eigen::Index col, const MispricingThresholds& th) {
    const double ca = tail_count_oracle(ea, col);
    const double cn = tail_count_oracle(en, col);
    const double eps = th.epsilon_bp * 1e-4;
    bool tail = false;
    if (ca > 0.0) tail = cn / ca > 1.0 + th.delta;
    else tail = cn > 0.0;
    if (tail && af > naive + eps) return L::Underpriced;
    if (tail && naive > af + eps) return L::Overpriced;
    return L::Rational;
}

const MatrixXd reg_row = (MatrixXd(1, 3) << 0.0, 0.0, 3.0).finished();    // count at column 0: 1
const MatrixXd naive_row = (MatrixXd(1, 3) << 1.0, 0.0, 2.0).finished();  // count at column 0: 2

}  // namespace

TEST(TailCount, MatchesBruteForce) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const MatrixXd e = MatrixXd::NullaryExpr(1 + rep % 9, 2 + rep % 5, [&] { return z(rng); });
        for (Eigen::Index j = 0; j < e.cols(); ++j) EXPECT_NEAR(tail_count(e, j), tail_count_oracle(e, j), 1e-12);
    }
    EXPECT_EQ(tail_count(reg_row, 0), 1.0);
    EXPECT_EQ(tail_count(naive_row, 0), 2.0);
    EXPECT_THROW(tail_count(MatrixXd(0, 0), 0), Error);
}

TEST(TailRatio, InfinityAndNaN) {
    EXPECT_EQ(tail_ratio(reg_row, naive_row, 0), 2.0);
    const MatrixXd top = (MatrixXd(1, 3) << 5.0, 0.0, 0.0).finished();
    EXPECT_TRUE(std::isinf(tail_ratio(top, naive_row, 0)));
    EXPECT_TRUE(std::isnan(tail_ratio(top, top, 0)));
    try {
        tail_ratio(top, MatrixXd::Zero(2, 3), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MisalignedHistory);
    }
}

TEST(ClassifyPoint, DefinitionExamples) {
    const MispricingThresholds th{1.0, 0.5};
    const double eps = 1e-4;
    EXPECT_EQ(classify_point(0.03, 0.03, reg_row, naive_row, 0, th), L::Rational);
    EXPECT_EQ(classify_point(0.03 + 2 * eps, 0.03, reg_row, naive_row, 0, th), L::Underpriced);
    EXPECT_EQ(classify_point(0.03, 0.03 + 2 * eps, reg_row, naive_row, 0, th), L::Overpriced);
    EXPECT_EQ(classify_point(0.03 + 2 * eps, 0.03, naive_row, naive_row, 0, th), L::Rational);
    // ratio 2 does not clear a margin of 1 + 1
    EXPECT_EQ(classify_point(0.03 + 2 * eps, 0.03, reg_row, naive_row, 0, MispricingThresholds{1.0, 1.0}), L::Rational);
    const MatrixXd top = (MatrixXd(1, 3) << 5.0, 0.0, 0.0).finished();
    EXPECT_EQ(classify_point(0.03 + 2 * eps, 0.03, top, naive_row, 0, th), L::Underpriced);
    EXPECT_EQ(classify_point(0.03 + 2 * eps, 0.03, top, top, 0, th), L::Rational);
}

TEST(ClassifyPoint, WideningEpsilonNeverCreatesMispricing) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> z(0.0, 1e-4);
    for (int rep = 0; rep < 200; ++rep) {
        const MatrixXd ea = MatrixXd::NullaryExpr(6, 4, [&] { return z(rng); });
        const MatrixXd en = MatrixXd::NullaryExpr(6, 4, [&] { return 3.0 * z(rng); });
        const double af = 0.03 + z(rng);
        const double nv = 0.03 + z(rng);
        bool seen_rational = false;
        for (double e : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}) {
            const L l = classify_point(af, nv, ea, en, 1, MispricingThresholds{e, 0.1});
            EXPECT_EQ(l, label_oracle(af, nv, ea, en, 1, MispricingThresholds{e, 0.1}));
            if (seen_rational) EXPECT_EQ(l, L::Rational);
            seen_rational = seen_rational || l == L::Rational;
        }
    }
}

TEST(PairState, TruthTable) {
    const L all[] = {L::Underpriced, L::Overpriced, L::Rational};
    int gt = 0;
    int lt = 0;
    for (L a : all) {
        for (L b : all) {
            const PairState s = pair_state(a, b);
            const bool expect_gt = (a == L::Overpriced && b != L::Overpriced) || (a == L::Rational && b == L::Underpriced);
            const bool expect_lt = (b == L::Overpriced && a != L::Overpriced) || (b == L::Rational && a == L::Underpriced);
            EXPECT_EQ(s == PairState::AGreaterB, expect_gt);
            EXPECT_EQ(s == PairState::ALessB, expect_lt);
            gt += s == PairState::AGreaterB;
            lt += s == PairState::ALessB;
        }
    }
    EXPECT_EQ(gt, 3);
    EXPECT_EQ(lt, 3);
    EXPECT_EQ(pair_state(L::Overpriced, L::Underpriced), PairState::AGreaterB);
    EXPECT_EQ(pair_state(L::Rational, L::Rational), PairState::Neutral);
    EXPECT_EQ(pair_state(L::Overpriced, L::Overpriced), PairState::Neutral);
    for (PairState s : {PairState::AGreaterB, PairState::ALessB, PairState::Neutral}) EXPECT_EQ(parse_pair_state(to_string(s)), s);
}

TEST(StateSequence, IdenticalModelsAreNeutralAndMatchesOracle) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z(0.0, 1e-3);
    const MatrixXd obs = MatrixXd::NullaryExpr(12, 4, [&] { return 0.03 + z(rng); });
    const MatrixXd af = obs + MatrixXd::NullaryExpr(12, 4, [&] { return z(rng); });
    const MatrixXd naive = obs + MatrixXd::NullaryExpr(12, 4, [&] { return 4.0 * z(rng); });
    const MispricingThresholds th{0.1, 0.0};
    for (PairState s : state_sequence(obs, af, af, {0, 3}, th, 2)) EXPECT_EQ(s, PairState::Neutral);

    const auto seq = state_sequence(obs, af, naive, {1, 3}, th, 3);
    ASSERT_EQ(seq.size(), 9u);
    const auto labels = classify_panel(obs, af, naive, th, 3);
    for (std::size_t k = 0; k < seq.size(); ++k) {
        const Eigen::Index t = static_cast<Eigen::Index>(k + 3);
        const MatrixXd ea = (af - obs).topRows(t + 1);
        const MatrixXd en = (naive - obs).topRows(t + 1);
        const L la = label_oracle(af(t, 1), naive(t, 1), ea, en, 1, th);
        const L lb = label_oracle(af(t, 3), naive(t, 3), ea, en, 3, th);
        EXPECT_EQ(labels[k][1], la);
        EXPECT_EQ(labels[k][3], lb);
        EXPECT_EQ(seq[k], pair_state(la, lb));
    }
    try {
        state_sequence(obs, af, naive, {0, 1}, th, 12);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
    }
}

TEST(EstimatePi, BoundariesAndClosedForm) {
    const auto ones = estimate_pi(std::vector<L>(40, L::Overpriced));
    EXPECT_EQ(ones.pi_hat, 1.0);
    EXPECT_NEAR(ones.wilson.hi, 1.0, 1e-15);
    const auto zeros = estimate_pi(std::vector<L>(40, L::Rational));
    EXPECT_EQ(zeros.pi_hat, 0.0);
    EXPECT_NEAR(zeros.wilson.lo, 0.0, 1e-15);

    std::vector<L> mix(100, L::Rational);
    for (int i = 0; i < 30; ++i) mix[static_cast<std::size_t>(i * 3)] = i % 2 ? L::Underpriced : L::Overpriced;
    const auto e = estimate_pi(mix, 0.95);
    EXPECT_EQ(e.mispriced, 30u);
    EXPECT_DOUBLE_EQ(e.pi_hat, 0.3);
    EXPECT_NEAR(e.sd, std::sqrt(0.21 / 100.0), 1e-15);
    EXPECT_NEAR(e.wilson.lo, 0.21894885294932760284, 1e-12);
    EXPECT_NEAR(e.wilson.hi, 0.39584854633346667103, 1e-12);
    EXPECT_THROW(estimate_pi({}), Error);
}
