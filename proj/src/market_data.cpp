#include "afreg/market_data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "afreg/error.hpp"

namespace afreg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(',', pos);
        if (next == std::string_view::npos) {
            cells.push_back(trim(line.substr(pos)));
            break;
        }
        cells.push_back(trim(line.substr(pos, next - pos)));
        pos = next + 1;
    }
    return cells;
}

bool is_missing(std::string_view cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == ".";
}

std::optional<double> parse_double(std::string_view cell) {
    double value = 0.0;
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    text = trim(text);
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const bool shape_ok = text.size() == 10 && text[4] == '-' && text[7] == '-';
    auto parse_part = [&](std::size_t off, std::size_t len, auto& out) {
        const auto [ptr, ec] = std::from_chars(text.data() + off, text.data() + off + len, out);
        return ec == std::errc{} && ptr == text.data() + off + len;
    };
    if (!shape_ok || !parse_part(0, 4, y) || !parse_part(5, 2, m) || !parse_part(8, 2, d)) {
        fail(ErrorCode::MalformedDate, fmt::format("'{}' is not an ISO-8601 date", text));
    }
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) fail(ErrorCode::MalformedDate, fmt::format("'{}' is not a valid calendar date", text));
    return date;
}

std::string format_date(Date date) {
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(date.year()),
                       static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
}

std::string_view to_string(QuoteKind kind) noexcept {
    return kind == QuoteKind::Forward ? "forward" : "zero_yield";
}

QuoteKind parse_quote_kind(std::string_view text) {
    if (text == "forward") return QuoteKind::Forward;
    if (text == "zero_yield" || text == "zero") return QuoteKind::ZeroYield;
    fail(ErrorCode::Config, fmt::format("unknown quote kind '{}'", text));
}

void CurvePanel::validate() const {
    if (maturities.size() < 1) fail(ErrorCode::MalformedHeader, "panel needs at least one maturity");
    if (dates.empty()) fail(ErrorCode::EmptyWindow, "panel has no rows");
    if (static_cast<std::size_t>(rates.rows()) != dates.size() || rates.cols() != maturities.size()) {
        fail(ErrorCode::DimensionMismatch, "rate matrix shape does not match dates x maturities");
    }
    for (Eigen::Index j = 0; j < maturities.size(); ++j) {
        if (!(maturities[j] > 0.0)) fail(ErrorCode::NonPositiveMaturity, fmt::format("maturity {} not positive", maturities[j]));
        if (j > 0 && !(maturities[j] > maturities[j - 1])) {
            fail(ErrorCode::MalformedHeader, "maturities must be strictly increasing");
        }
    }
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (dates[i] == dates[i - 1]) fail(ErrorCode::DuplicateDate, format_date(dates[i]));
        if (dates[i] < dates[i - 1]) fail(ErrorCode::NonMonotoneDates, format_date(dates[i]));
    }
    for (Eigen::Index i = 0; i < rates.rows(); ++i) {
        for (Eigen::Index j = 0; j < rates.cols(); ++j) {
            if (!std::isfinite(rates(i, j))) {
                fail(ErrorCode::MissingValue, fmt::format("row {}, column {}", i + 1, j + 1));
            }
        }
    }
}

bool CurvePanel::operator==(const CurvePanel& other) const {
    return dates == other.dates && quote_kind == other.quote_kind &&
           maturities.size() == other.maturities.size() && maturities == other.maturities &&
           rates.rows() == other.rates.rows() && rates.cols() == other.rates.cols() &&
           rates == other.rates;
}

CurvePanel read_panel(std::istream& in, const PanelSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::MalformedHeader, "empty input");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = split_commas(line);
    if (header.size() < 2 || header[0] != "date") {
        fail(ErrorCode::MalformedHeader, "header must be 'date,<m1>,<m2>,...'");
    }
    CurvePanel panel;
    panel.quote_kind = schema.quote_kind;
    panel.maturities.resize(static_cast<Eigen::Index>(header.size() - 1));
    for (std::size_t j = 1; j < header.size(); ++j) {
        const auto m = parse_double(header[j]);
        if (!m) fail(ErrorCode::MalformedHeader, fmt::format("maturity '{}' is not a number", header[j]));
        panel.maturities[static_cast<Eigen::Index>(j - 1)] = *m;
    }

    const std::size_t n_mat = header.size() - 1;
    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split_commas(line);
        const Date date = parse_date(cells[0]);
        if (!panel.dates.empty()) {
            if (date == panel.dates.back()) fail(ErrorCode::DuplicateDate, fmt::format("row {}: {}", row, cells[0]));
            if (date < panel.dates.back()) fail(ErrorCode::NonMonotoneDates, fmt::format("row {}: {}", row, cells[0]));
        }
        panel.dates.push_back(date);
        if (cells.size() > n_mat + 1) fail(ErrorCode::MalformedNumber, fmt::format("row {} has extra cells", row));
        for (std::size_t j = 1; j <= n_mat; ++j) {
            if (j >= cells.size() || is_missing(cells[j])) {
                fail(ErrorCode::MissingValue, fmt::format("row {}, column {}", row, j));
            }
            const auto v = parse_double(cells[j]);
            if (!v) fail(ErrorCode::MalformedNumber, fmt::format("row {}, column {}: '{}'", row, j, cells[j]));
            values.push_back(schema.rates_in_percent ? *v / 100.0 : *v);
        }
    }
    panel.rates = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), static_cast<Eigen::Index>(panel.dates.size()), static_cast<Eigen::Index>(n_mat));
    panel.validate();
    return panel;
}

CurvePanel load_panel(const std::string& path, const PanelSchema& schema) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, fmt::format("cannot open '{}'", path));
    return read_panel(in, schema);
}

void write_panel(std::ostream& out, const CurvePanel& panel) {
    out << "date";
    for (Eigen::Index j = 0; j < panel.maturities.size(); ++j) out << ',' << fmt::format("{}", panel.maturities[j]);
    out << '\n';
    for (std::size_t i = 0; i < panel.n_dates(); ++i) {
        out << format_date(panel.dates[i]);
        for (Eigen::Index j = 0; j < panel.rates.cols(); ++j) {
            out << ',' << fmt::format("{}", panel.rates(static_cast<Eigen::Index>(i), j));
        }
        out << '\n';
    }
}

void write_panel(const std::string& path, const CurvePanel& panel) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, fmt::format("cannot write '{}'", path));
    write_panel(out, panel);
}

CurvePanel to_forward_rates(const CurvePanel& panel) {
    if (panel.quote_kind == QuoteKind::Forward) return panel;
    const Eigen::Index m = panel.maturities.size();
    if (m < 2) fail(ErrorCode::TooFewMaturities, "need at least two maturities to differentiate");

    const Eigen::VectorXd& x = panel.maturities;
    CurvePanel out = panel;
    out.quote_kind = QuoteKind::Forward;
    for (Eigen::Index i = 0; i < panel.rates.rows(); ++i) {
        // g(T) = T y(T); f = g'
        const Eigen::VectorXd g = x.cwiseProduct(panel.rates.row(i).transpose());
        for (Eigen::Index j = 0; j < m; ++j) {
            double d = 0.0;
            if (m == 2) {
                d = (g[1] - g[0]) / (x[1] - x[0]);
            } else if (j == 0) {
                const double h1 = x[1] - x[0];
                const double h2 = x[2] - x[0];
                d = (-(h1 + h2) / (h1 * h2)) * g[0] + (h2 / (h1 * (h2 - h1))) * g[1] - (h1 / (h2 * (h2 - h1))) * g[2];
            } else if (j == m - 1) {
                const double h1 = x[m - 1] - x[m - 2];
                const double h2 = x[m - 1] - x[m - 3];
                d = ((h1 + h2) / (h1 * h2)) * g[m - 1] - (h2 / (h1 * (h2 - h1))) * g[m - 2] +
                    (h1 / (h2 * (h2 - h1))) * g[m - 3];
            } else {
                const double hm = x[j] - x[j - 1];
                const double hp = x[j + 1] - x[j];
                d = (hm * hm * g[j + 1] - hp * hp * g[j - 1] + (hp * hp - hm * hm) * g[j]) / (hm * hp * (hm + hp));
            }
            out.rates(i, j) = d;
        }
    }
    return out;
}

CurvePanel window(const CurvePanel& panel, Date start, Date end) {
    if (end < start) fail(ErrorCode::InvalidArgument, "window start after end");
    std::size_t first = panel.n_dates();
    std::size_t count = 0;
    for (std::size_t i = 0; i < panel.n_dates(); ++i) {
        if (panel.dates[i] >= start && panel.dates[i] <= end) {
            if (count == 0) first = i;
            ++count;
        }
    }
    if (count == 0) {
        fail(ErrorCode::EmptyWindow, fmt::format("no rows in [{}, {}]", format_date(start), format_date(end)));
    }
    return slice_rows(panel, first, count);
}

CurvePanel slice_rows(const CurvePanel& panel, std::size_t first, std::size_t count) {
    if (count == 0 || first + count > panel.n_dates()) fail(ErrorCode::EmptyWindow, "row slice out of range");
    CurvePanel out;
    out.quote_kind = panel.quote_kind;
    out.maturities = panel.maturities;
    out.dates.assign(panel.dates.begin() + static_cast<std::ptrdiff_t>(first),
                     panel.dates.begin() + static_cast<std::ptrdiff_t>(first + count));
    out.rates = panel.rates.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
    return out;
}

std::vector<Date> weekday_calendar(Date first, std::size_t count) {
    using std::chrono::days;
    using std::chrono::sys_days;
    using std::chrono::weekday;
    std::vector<Date> out;
    out.reserve(count);
    sys_days day{first};
    while (out.size() < count) {
        const weekday wd{day};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.emplace_back(day);
        day += days{1};
    }
    return out;
}

}  // namespace afreg
