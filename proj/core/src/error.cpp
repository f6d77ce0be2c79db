#include "helio/error.hpp"

namespace helio {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::BadTimestamp: return "BadTimestamp";
    case ErrorCode::CalendarGap: return "CalendarGap";
    case ErrorCode::NegativeIncrement: return "NegativeIncrement";
    case ErrorCode::NonPhysical: return "NonPhysical";
    case ErrorCode::CapacityNonPositive: return "CapacityNonPositive";
    case ErrorCode::PowerOutOfRange: return "PowerOutOfRange";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::HumidityOutOfRange: return "HumidityOutOfRange";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NoTarget: return "NoTarget";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::EmptyPeriod: return "EmptyPeriod";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::MalformedModel: return "MalformedModel";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::TooFewDays: return "TooFewDays";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::EmptyAfterMask: return "EmptyAfterMask";
    case ErrorCode::NoActuals: return "NoActuals";
    case ErrorCode::ZeroBase: return "ZeroBase";
    case ErrorCode::MonthMismatch: return "MonthMismatch";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DivergedLoss:
    case ErrorCode::ZeroBase:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ShapeMismatch:
      return ErrorCategory::Numerical;
    case ErrorCode::BadConfig:
    case ErrorCode::EmptyGrid:
      return ErrorCategory::Usage;
    default:
      return ErrorCategory::Data;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

void raise(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace helio
