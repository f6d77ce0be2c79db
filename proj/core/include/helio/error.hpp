#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace helio {

enum class ErrorCode {
  // ingest
  MissingColumn,
  BadTimestamp,
  CalendarGap,
  NegativeIncrement,
  NonPhysical,
  CapacityNonPositive,
  PowerOutOfRange,
  InvalidRecord,
  // features
  HumidityOutOfRange,
  UnknownColumn,
  TooFewRows,
  ColumnMismatch,
  // selection
  LengthMismatch,
  NoTarget,
  EmptyMatrix,
  EmptyPeriod,
  // svr
  DimensionMismatch,
  NoData,
  ShapeMismatch,
  BadMagic,
  VersionUnsupported,
  ChecksumMismatch,
  MalformedModel,
  // tuning
  EmptyGrid,
  TooFewDays,
  // baselines
  DivergedLoss,
  // pipeline
  InsufficientHistory,
  EmptyAfterMask,
  NoActuals,
  ZeroBase,
  MonthMismatch,
  // synth / cli
  BadConfig,
};

/// Coarse grouping used to map failures onto process exit codes.
enum class ErrorCategory { Data, Numerical, Usage };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }
  /// Message without the leading code name.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& detail);

}  // namespace helio
