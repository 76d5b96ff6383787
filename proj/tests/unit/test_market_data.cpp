#include <gtest/gtest.h>

#include <sstream>

#include "afreg/error.hpp"
#include "afreg/market_data.hpp"

using namespace afreg;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::Io;
}

CurvePanel parse(const std::string& text, PanelSchema schema = {}) {
    std::istringstream in(text);
    return read_panel(in, schema);
}

CurvePanel zero_panel(const std::function<double(double)>& y, const Eigen::VectorXd& mats) {
    CurvePanel p;
    p.dates = {parse_date("2001-01-02")};
    p.maturities = mats;
    p.rates.resize(1, mats.size());
    for (Eigen::Index j = 0; j < mats.size(); ++j) p.rates(0, j) = y(mats[j]);
    p.quote_kind = QuoteKind::ZeroYield;
    return p;
}

}  // namespace

TEST(MarketData, ParsesWellFormedCsv) {
    const auto p = parse("date,1,2\n2001-01-02,0.05,0.055\n2001-01-03,0.051,0.056\n2001-01-04,0.052,0.057\n");
    EXPECT_EQ(p.n_dates(), 3u);
    EXPECT_EQ(p.n_maturities(), 2u);
    EXPECT_DOUBLE_EQ(p.rates(2, 1), 0.057);
    EXPECT_EQ(format_date(p.dates[1]), "2001-01-03");
}

TEST(MarketData, RejectsBadInput) {
    EXPECT_EQ(code_of([] { parse("date,1,2\n2001-01-02,0.05,\n"); }), ErrorCode::MissingValue);
    EXPECT_EQ(code_of([] { parse("date,1,2\n2001-01-02,0.05,NA\n"); }), ErrorCode::MissingValue);
    EXPECT_EQ(code_of([] { parse("date,1\n2001-01-03,0.05\n2001-01-02,0.05\n"); }), ErrorCode::NonMonotoneDates);
    EXPECT_EQ(code_of([] { parse("date,1\n2001-01-02,0.05\n2001-01-02,0.05\n"); }), ErrorCode::DuplicateDate);
    EXPECT_EQ(code_of([] { parse("date,1\n2001-01-02,abc\n"); }), ErrorCode::MalformedNumber);
    EXPECT_EQ(code_of([] { parse("date,1\n2001-13-02,0.05\n"); }), ErrorCode::MalformedDate);
    EXPECT_EQ(code_of([] { parse("when,1\n2001-01-02,0.05\n"); }), ErrorCode::MalformedHeader);
    EXPECT_EQ(code_of([] { parse("date,2,1\n2001-01-02,0.05,0.05\n"); }), ErrorCode::MalformedHeader);
}

TEST(MarketData, PercentInputIsRescaled) {
    const auto p = parse("date,1\n2001-01-02,5.25\n", PanelSchema{QuoteKind::Forward, true});
    EXPECT_DOUBLE_EQ(p.rates(0, 0), 0.0525);
}

TEST(MarketData, WriteReadRoundTripIsExact) {
    CurvePanel p;
    p.dates = weekday_calendar(parse_date("2003-02-27"), 7);
    p.maturities = (Eigen::VectorXd(3) << 0.25, 1.0, 7.5).finished();
    p.rates = Eigen::MatrixXd::Random(7, 3) * 0.1;
    p.rates(0, 0) = 1.0 / 3.0;
    std::ostringstream out;
    write_panel(out, p);
    EXPECT_EQ(parse(out.str()), p);
}

TEST(MarketData, WeekdayCalendarSkipsWeekends) {
    const auto d = weekday_calendar(parse_date("2024-06-07"), 3);  // a Friday
    EXPECT_EQ(format_date(d[0]), "2024-06-07");
    EXPECT_EQ(format_date(d[1]), "2024-06-10");
    EXPECT_EQ(format_date(d[2]), "2024-06-11");
}

TEST(ForwardRates, FlatYieldsGiveFlatForwards) {
    const auto f = to_forward_rates(zero_panel([](double) { return 0.04; }, (Eigen::VectorXd(5) << 1, 2, 3, 5, 10).finished()));
    EXPECT_EQ(f.quote_kind, QuoteKind::Forward);
    for (Eigen::Index j = 0; j < 5; ++j) EXPECT_NEAR(f.rates(0, j), 0.04, 1e-14);
}

TEST(ForwardRates, LinearYieldsMatchDerivativeOfTY) {
    // d/dT [T (a + bT)] = a + 2bT; exact for the quadratic T y(T) with three-point stencils
    const double a = 0.02;
    const double b = 0.003;
    const Eigen::VectorXd m = (Eigen::VectorXd(6) << 1, 2, 3, 5, 7, 10).finished();
    const auto f = to_forward_rates(zero_panel([&](double T) { return a + b * T; }, m));
    for (Eigen::Index j = 0; j < m.size(); ++j) EXPECT_NEAR(f.rates(0, j), a + 2.0 * b * m[j], 1e-13);
}

TEST(ForwardRates, IdentityOnForwardsAndNeedsTwoMaturities) {
    auto p = zero_panel([](double) { return 0.03; }, (Eigen::VectorXd(2) << 1, 2).finished());
    p.quote_kind = QuoteKind::Forward;
    EXPECT_EQ(to_forward_rates(p), p);
    EXPECT_EQ(to_forward_rates(to_forward_rates(p)), p);
    const auto single = zero_panel([](double) { return 0.03; }, (Eigen::VectorXd(1) << 1).finished());
    EXPECT_EQ(code_of([&] { to_forward_rates(single); }), ErrorCode::TooFewMaturities);
}

TEST(Window, SlicesAndConcatenates) {
    CurvePanel p;
    p.dates = weekday_calendar(parse_date("2010-01-04"), 10);
    p.maturities = (Eigen::VectorXd(2) << 1, 2).finished();
    p.rates = Eigen::MatrixXd::Random(10, 2);
    EXPECT_EQ(window(p, p.dates.front(), p.dates.back()), p);
    EXPECT_EQ(window(p, p.dates[3], p.dates[3]).n_dates(), 1u);
    EXPECT_EQ(code_of([&] { window(p, parse_date("2011-01-01"), parse_date("2011-02-01")); }), ErrorCode::EmptyWindow);

    const auto left = window(p, p.dates[0], p.dates[4]);
    const auto right = window(p, p.dates[5], p.dates[9]);
    CurvePanel joined = left;
    joined.dates.insert(joined.dates.end(), right.dates.begin(), right.dates.end());
    joined.rates.conservativeResize(10, 2);
    joined.rates.bottomRows(5) = right.rates;
    EXPECT_EQ(joined, window(p, p.dates[0], p.dates[9]));
}
