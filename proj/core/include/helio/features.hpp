#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helio/ingest.hpp"
#include "helio/kvconfig.hpp"
#include "helio/matrix.hpp"

namespace helio {

struct WindPolar {
  double speed = 0.0;          // m/s
  double direction_deg = 0.0;  // [0, 360), counterclockwise from east
};

/// Polar form of the (u, v) wind vector; (0, 0) maps to (0, 0).
WindPolar wind_polar(double u, double v);

/// Nine-term heat-index regression in degrees Fahrenheit, evaluated for every input
/// temperature. `relative_humidity` is in percent and must lie in [0, 100].
double heat_index(double temperature_f, double relative_humidity);

/// Which predictors `assemble` produces and in what order.
struct FeatureSpec {
  std::vector<std::string> base_columns;
  std::vector<std::string> quadratic_columns;
  bool include_heat_index = false;
  /// Replaces u10/v10 by wind_speed/wind_dir.
  bool include_wind_polar = false;
  /// Replaces hour by hour_sin/hour_cos; a quadratic term on hour is then dropped.
  bool hour_cyclic = false;
  /// Below 80 F the heat index column carries the air temperature instead.
  bool hi_floor = false;
  double daylight_threshold = 1.0;  // J/m^2 per hour

  /// All twelve weather variables plus hour, with quadratic terms on ssrd, tsr and hour.
  static FeatureSpec defaults();
  static FeatureSpec from_config(const KvConfig& cfg);
  KvConfig to_config() const;

  /// Base columns after the wind/heat-index/hour substitutions.
  std::vector<std::string> resolved_base() const;
  std::vector<std::string> resolved_quadratic() const;
  /// Throws UnknownColumn or BadConfig.
  void validate() const;
};

/// Every column `assemble` knows how to compute before quadratic expansion.
const std::vector<std::string>& known_columns();

struct FeatureMatrix {
  std::vector<std::string> columns;
  Matrix values;
  std::vector<UtcHour> timestamps;
  std::vector<bool> daylight;
  std::vector<std::optional<double>> target;

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }
  std::optional<std::size_t> column_index(std::string_view name) const;
  std::vector<double> column(std::string_view name) const;
  bool has_target() const;

  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
  /// Throws UnknownColumn.
  FeatureMatrix select_columns(std::span<const std::string> names) const;
};

struct ScalingStats {
  std::vector<std::string> columns;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> constant;

  bool empty() const { return columns.empty(); }
};

/// Appends `<col>^2` for each requested column.
FeatureMatrix quadratic_expand(const FeatureMatrix& m, std::span<const std::string> cols);

/// Column mean and sample standard deviation (n - 1).
ScalingStats fit_scaling(const FeatureMatrix& train);
ScalingStats fit_scaling(const Matrix& train, std::vector<std::string> columns);
/// (x - mean) / std; constant columns become 0. Column names must match.
FeatureMatrix apply_scaling(const ScalingStats& stats, const FeatureMatrix& m);
Matrix apply_scaling(const ScalingStats& stats, const Matrix& m);

/// Strictly above `threshold` counts as daylight.
std::vector<bool> daylight_mask(const HourlySeries& ssrd_hourly, double threshold = 1.0);

FeatureMatrix assemble(const Dataset& data, const FeatureSpec& spec);

/// `timestamp,<columns...>,daylight,target`
void write_csv(std::ostream& out, const FeatureMatrix& m);

}  // namespace helio
