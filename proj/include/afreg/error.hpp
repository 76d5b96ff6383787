#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace afreg {

enum class ErrorCode {
    // market data
    MissingValue,
    NonMonotoneDates,
    DuplicateDate,
    MalformedNumber,
    MalformedDate,
    MalformedHeader,
    TooFewMaturities,
    EmptyWindow,
    // basis / pricing
    NonPositiveMaturity,
    DimensionMismatch,
    MaturityBeforeValuation,
    RankDeficient,
    TooFewObservations,
    // dynamics / filtering
    DegeneratePath,
    SingularInnovationCovariance,
    // regularization / estimator
    EmptyGrid,
    SingularNormalEquations,
    InsufficientData,
    // mispricing
    EmptyHistory,
    MisalignedHistory,
    EmptyInput,
    // hmm
    TooShort,
    SymbolOutOfRange,
    // backtest
    NoCandidates,
    MisalignedSeries,
    EmptyReturns,
    EmptyLedger,
    // stats
    Degenerate,
    InvalidCounts,
    TooFew,
    // plumbing
    InvalidArgument,
    Io,
    Config,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace afreg
