#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace afreg {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
Date parse_date(std::string_view text);
std::string format_date(Date date);

enum class QuoteKind { Forward, ZeroYield };

std::string_view to_string(QuoteKind kind) noexcept;
QuoteKind parse_quote_kind(std::string_view text);

struct PanelSchema {
    QuoteKind quote_kind = QuoteKind::Forward;
    bool rates_in_percent = false;
};

/// Observed continuously-compounded rates on a fixed maturity grid, one row per date.
/// Rows are strictly increasing in date; maturities (years) strictly increasing and positive.
struct CurvePanel {
    std::vector<Date> dates;
    Eigen::VectorXd maturities;
    Eigen::MatrixXd rates;  // n_dates x n_maturities, decimal units
    QuoteKind quote_kind = QuoteKind::Forward;

    std::size_t n_dates() const noexcept { return dates.size(); }
    std::size_t n_maturities() const noexcept { return static_cast<std::size_t>(maturities.size()); }

    /// Throws on any violated invariant.
    void validate() const;

    bool operator==(const CurvePanel& other) const;
};

CurvePanel read_panel(std::istream& in, const PanelSchema& schema);
CurvePanel load_panel(const std::string& path, const PanelSchema& schema);

/// Writes the CSV panel format; numbers use the shortest round-trip representation.
void write_panel(std::ostream& out, const CurvePanel& panel);
void write_panel(const std::string& path, const CurvePanel& panel);

/// Converts zero yields to instantaneous forwards f = d/dT [T y(T)].
/// Forward-kind panels are returned unchanged.
CurvePanel to_forward_rates(const CurvePanel& panel);

/// Rows with start <= date <= end.
CurvePanel window(const CurvePanel& panel, Date start, Date end);

/// Rows [first, first + count).
CurvePanel slice_rows(const CurvePanel& panel, std::size_t first, std::size_t count);

/// Business-day style calendar: `count` weekdays starting at `first` (skipping weekends).
std::vector<Date> weekday_calendar(Date first, std::size_t count);

}  // namespace afreg
