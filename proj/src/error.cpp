#include "afreg/error.hpp"

namespace afreg {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingValue: return "MissingValue";
        case ErrorCode::NonMonotoneDates: return "NonMonotoneDates";
        case ErrorCode::DuplicateDate: return "DuplicateDate";
        case ErrorCode::MalformedNumber: return "MalformedNumber";
        case ErrorCode::MalformedDate: return "MalformedDate";
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::TooFewMaturities: return "TooFewMaturities";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::NonPositiveMaturity: return "NonPositiveMaturity";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MaturityBeforeValuation: return "MaturityBeforeValuation";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::TooFewObservations: return "TooFewObservations";
        case ErrorCode::DegeneratePath: return "DegeneratePath";
        case ErrorCode::SingularInnovationCovariance: return "SingularInnovationCovariance";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::SingularNormalEquations: return "SingularNormalEquations";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::EmptyHistory: return "EmptyHistory";
        case ErrorCode::MisalignedHistory: return "MisalignedHistory";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::SymbolOutOfRange: return "SymbolOutOfRange";
        case ErrorCode::NoCandidates: return "NoCandidates";
        case ErrorCode::MisalignedSeries: return "MisalignedSeries";
        case ErrorCode::EmptyReturns: return "EmptyReturns";
        case ErrorCode::EmptyLedger: return "EmptyLedger";
        case ErrorCode::Degenerate: return "Degenerate";
        case ErrorCode::InvalidCounts: return "InvalidCounts";
        case ErrorCode::TooFew: return "TooFew";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace afreg
