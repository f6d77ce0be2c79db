#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helio/kvconfig.hpp"
#include "helio/time.hpp"

namespace helio {

/// One hour of the twelve NWP variables plus the observed, normalized power.
struct WeatherRecord {
  UtcHour timestamp;
  double tclw = 0.0;      // kg/m^2
  double tciw = 0.0;      // kg/m^2
  double sp = 0.0;        // Pa
  double rh = 0.0;        // percent
  double tcc = 0.0;       // fraction
  double u10 = 0.0;       // m/s
  double v10 = 0.0;       // m/s
  double t2m = 0.0;       // K
  double ssrd_acc = 0.0;  // J/m^2, accumulated since start of day
  double strd_acc = 0.0;  // J/m^2, accumulated
  double tsr_acc = 0.0;   // J/m^2, accumulated
  double tp_acc = 0.0;    // m, accumulated
  std::optional<double> power;

  bool operator==(const WeatherRecord&) const = default;
};

enum class AccumulatedField { ssrd, strd, tsr, tp };

/// Per-hour rate form of an accumulated field.
struct HourlySeries {
  UtcHour start;
  std::vector<double> values;
};

struct IngestStats {
  std::size_t clamped_negative = 0;
  std::size_t clamped_over_capacity = 0;
};

/// Calendar-validated hourly dataset. Immutable once constructed.
class Dataset {
 public:
  Dataset() = default;
  /// Throws CalendarGap / BadTimestamp / InvalidRecord / NegativeIncrement when invariants fail.
  explicit Dataset(std::vector<WeatherRecord> records, double capacity = 1.0, std::string zone_id = "1",
                   IngestStats stats = {});

  const std::vector<WeatherRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  double capacity() const { return capacity_; }
  const std::string& zone_id() const { return zone_id_; }
  const IngestStats& stats() const { return stats_; }

  std::size_t day_count() const { return records_.size() / 24; }
  Date first_day() const;
  Date last_day() const;
  std::vector<Date> days() const;
  /// Index of the first record of `day`, or nullopt when the day is not covered.
  std::optional<std::size_t> day_offset(Date day) const;
  std::span<const WeatherRecord> day_records(Date day) const;

  /// Copy restricted to whole days in [first, last].
  Dataset slice(Date first, Date last) const;

 private:
  std::vector<WeatherRecord> records_;
  double capacity_ = 1.0;
  std::string zone_id_ = "1";
  IngestStats stats_;
};

/// Logical column name -> physical CSV header, plus optional reader directives.
struct ColumnMapping {
  std::map<std::string, std::string> logical_to_physical;
  /// "iso" (YYYY-MM-DDTHH:00:00Z) or "compact" (YYYYMMDD HH:MM).
  std::string timestamp_format = "iso";
  /// Added to every parsed timestamp, in hours.
  long long hour_offset = 0;
  /// When set, only rows whose zone column equals `zone` are read.
  std::optional<std::string> zone_column;
  std::optional<std::string> zone;

  static ColumnMapping identity();
  /// Reads `logical=physical` lines; the reserved keys timestamp_format, hour_offset,
  /// zone_column and zone configure the reader. Logical names not listed map to themselves.
  static ColumnMapping from_config(const KvConfig& cfg);
};

struct ParseOptions {
  ColumnMapping mapping = ColumnMapping::identity();
  /// Nominal capacity in the units of the power column; 1 means the column is already normalized.
  double capacity = 1.0;
  std::string zone_id = "1";
};

inline constexpr std::array<const char*, 13> kRequiredColumns = {
    "timestamp", "tclw", "tciw", "sp", "rh", "tcc", "u10", "v10", "t2m", "ssrd", "strd", "tsr", "tp"};

Dataset parse_csv(std::istream& in, const ParseOptions& options = {});
void write_csv(std::ostream& out, const Dataset& data);

/// Differences an accumulated series. A day boundary restarts accumulation, so the first hour of
/// each day yields its raw value. A decrease inside one day throws NegativeIncrement.
HourlySeries deaccumulate(std::span<const UtcHour> timestamps, std::span<const double> accumulated);
HourlySeries deaccumulate(const Dataset& data, AccumulatedField field);

/// Running daily totals of an hourly series; the inverse of deaccumulate.
std::vector<double> accumulate(const HourlySeries& hourly);

double kelvin_to_fahrenheit(double kelvin);

struct NormalizedPower {
  double value = 0.0;
  bool clamped = false;
};

/// raw / capacity. Readings down to -1 % clamp to 0, readings in (100 %, 120 %] clamp to 1,
/// anything further out throws PowerOutOfRange.
NormalizedPower normalize_power(double raw, double capacity);

}  // namespace helio
