#include "helio/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

#include "helio/error.hpp"
#include "helio/text.hpp"

namespace helio {

WindPolar wind_polar(double u, double v) {
  WindPolar out;
  out.speed = std::hypot(u, v);
  if (out.speed == 0.0) return out;
  double deg = std::atan2(v, u) * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  out.direction_deg = deg;
  return out;
}

double heat_index(double t, double r) {
  if (!std::isfinite(t) || !std::isfinite(r)) raise(ErrorCode::HumidityOutOfRange, "non-finite heat-index input");
  if (r < 0.0 || r > 100.0) raise(ErrorCode::HumidityOutOfRange, "relative humidity " + format_double(r) + " outside [0, 100]");
  return -42.379 + 2.04901523 * t + 10.14333127 * r - 0.22475541 * t * r - 6.83783e-3 * t * t -
         5.481717e-2 * r * r + 1.22874e-3 * t * t * r + 8.5282e-4 * t * r * r - 1.99e-6 * t * t * r * r;
}

const std::vector<std::string>& known_columns() {
  static const std::vector<std::string> names = {
      "tclw", "tciw", "sp", "rh", "tcc", "u10", "v10", "t2m", "ssrd", "strd", "tsr", "tp",
      "hour", "wind_speed", "wind_dir", "heat_index", "hour_sin", "hour_cos"};
  return names;
}

FeatureSpec FeatureSpec::defaults() {
  FeatureSpec spec;
  spec.base_columns = {"tclw", "tciw", "sp", "rh", "tcc", "u10", "v10", "t2m", "ssrd", "strd", "tsr", "tp", "hour"};
  spec.quadratic_columns = {"ssrd", "tsr", "hour"};
  return spec;
}

FeatureSpec FeatureSpec::from_config(const KvConfig& cfg) {
  FeatureSpec spec = defaults();
  if (auto v = cfg.get("base_columns")) spec.base_columns = split_list(*v);
  if (auto v = cfg.get("quadratic_columns")) spec.quadratic_columns = split_list(*v);
  spec.include_heat_index = cfg.get_bool("include_heat_index", spec.include_heat_index);
  spec.include_wind_polar = cfg.get_bool("include_wind_polar", spec.include_wind_polar);
  spec.hour_cyclic = cfg.get_bool("hour_cyclic", spec.hour_cyclic);
  spec.hi_floor = cfg.get_bool("hi_floor", spec.hi_floor);
  spec.daylight_threshold = cfg.get_double("daylight_threshold", spec.daylight_threshold);
  spec.validate();
  return spec;
}

KvConfig FeatureSpec::to_config() const {
  KvConfig cfg;
  cfg.set("base_columns", join(base_columns, ","));
  cfg.set("quadratic_columns", join(quadratic_columns, ","));
  cfg.set("include_heat_index", include_heat_index ? "true" : "false");
  cfg.set("include_wind_polar", include_wind_polar ? "true" : "false");
  cfg.set("hour_cyclic", hour_cyclic ? "true" : "false");
  cfg.set("hi_floor", hi_floor ? "true" : "false");
  cfg.set("daylight_threshold", format_double(daylight_threshold));
  return cfg;
}

std::vector<std::string> FeatureSpec::resolved_base() const {
  std::vector<std::string> out;
  auto push = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  bool wind_done = false;
  for (const auto& col : base_columns) {
    if (include_wind_polar && (col == "u10" || col == "v10")) {
      if (!wind_done) {
        push("wind_speed");
        push("wind_dir");
        wind_done = true;
      }
    } else if (hour_cyclic && col == "hour") {
      push("hour_sin");
      push("hour_cos");
    } else {
      push(col);
      if (include_heat_index && col == "t2m") push("heat_index");
    }
  }
  if (include_wind_polar && !wind_done) {
    push("wind_speed");
    push("wind_dir");
  }
  if (include_heat_index) push("heat_index");
  return out;
}

std::vector<std::string> FeatureSpec::resolved_quadratic() const {
  std::vector<std::string> out;
  for (const auto& col : quadratic_columns) {
    if (hour_cyclic && col == "hour") continue;
    out.push_back(col);
  }
  return out;
}

void FeatureSpec::validate() const {
  const auto& known = known_columns();
  std::set<std::string> seen;
  for (const auto& col : base_columns) {
    if (std::find(known.begin(), known.end(), col) == known.end()) raise(ErrorCode::UnknownColumn, "unknown column '" + col + "'");
    if (!seen.insert(col).second) raise(ErrorCode::BadConfig, "duplicate base column '" + col + "'");
  }
  const auto base = resolved_base();
  std::set<std::string> quad_seen;
  for (const auto& col : resolved_quadratic()) {
    if (std::find(base.begin(), base.end(), col) == base.end()) {
      raise(ErrorCode::UnknownColumn, "quadratic column '" + col + "' is not a base column");
    }
    if (!quad_seen.insert(col).second) raise(ErrorCode::BadConfig, "duplicate quadratic column '" + col + "'");
  }
  if (!(daylight_threshold >= 0.0)) raise(ErrorCode::BadConfig, "daylight_threshold must be non-negative");
}

std::optional<std::size_t> FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

std::vector<double> FeatureMatrix::column(std::string_view name) const {
  const auto idx = column_index(name);
  if (!idx) raise(ErrorCode::UnknownColumn, "no column '" + std::string(name) + "'");
  return values.column(*idx);
}

bool FeatureMatrix::has_target() const {
  return std::any_of(target.begin(), target.end(), [](const auto& t) { return t.has_value(); });
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  FeatureMatrix out;
  out.columns = columns;
  out.values = values.select_rows(indices);
  out.timestamps.reserve(indices.size());
  out.daylight.reserve(indices.size());
  out.target.reserve(indices.size());
  for (auto i : indices) {
    out.timestamps.push_back(timestamps[i]);
    out.daylight.push_back(daylight[i]);
    out.target.push_back(target[i]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::string> names) const {
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    const auto i = column_index(n);
    if (!i) raise(ErrorCode::UnknownColumn, "no column '" + n + "'");
    idx.push_back(*i);
  }
  FeatureMatrix out = *this;
  out.columns.assign(names.begin(), names.end());
  out.values = values.select_columns(idx);
  return out;
}

FeatureMatrix quadratic_expand(const FeatureMatrix& m, std::span<const std::string> cols) {
  std::vector<std::size_t> idx;
  for (const auto& c : cols) {
    const auto i = m.column_index(c);
    if (!i) raise(ErrorCode::UnknownColumn, "cannot square unknown column '" + c + "'");
    idx.push_back(*i);
  }
  if (idx.empty()) return m;
  FeatureMatrix out;
  out.columns = m.columns;
  for (const auto& c : cols) out.columns.push_back(c + "^2");
  out.values = Matrix(m.rows(), m.cols() + idx.size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto src = m.values.row(r);
    auto dst = out.values.row(r);
    std::copy(src.begin(), src.end(), dst.begin());
    for (std::size_t k = 0; k < idx.size(); ++k) dst[m.cols() + k] = src[idx[k]] * src[idx[k]];
  }
  out.timestamps = m.timestamps;
  out.daylight = m.daylight;
  out.target = m.target;
  return out;
}

ScalingStats fit_scaling(const Matrix& train, std::vector<std::string> columns) {
  if (train.rows() < 2) raise(ErrorCode::TooFewRows, "scaling needs at least 2 rows, got " + std::to_string(train.rows()));
  ScalingStats stats;
  stats.columns = std::move(columns);
  const std::size_t n = train.rows();
  const std::size_t d = train.cols();
  stats.mean.assign(d, 0.0);
  stats.stddev.assign(d, 0.0);
  stats.constant.assign(d, false);
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    double lo = train(0, c);
    double hi = lo;
    for (std::size_t r = 0; r < n; ++r) {
      const double x = train(r, c);
      sum += x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    double mean = sum / static_cast<double>(n);
    double correction = 0.0;
    for (std::size_t r = 0; r < n; ++r) correction += train(r, c) - mean;
    mean += correction / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dev = train(r, c) - mean;
      ss += dev * dev;
    }
    stats.mean[c] = lo == hi ? lo : mean;
    stats.stddev[c] = lo == hi ? 0.0 : std::sqrt(ss / static_cast<double>(n - 1));
    stats.constant[c] = stats.stddev[c] == 0.0;
  }
  return stats;
}

ScalingStats fit_scaling(const FeatureMatrix& train) { return fit_scaling(train.values, train.columns); }

Matrix apply_scaling(const ScalingStats& stats, const Matrix& m) {
  if (m.cols() != stats.columns.size()) {
    raise(ErrorCode::ColumnMismatch, "matrix has " + std::to_string(m.cols()) + " columns, scaling expects " +
                                         std::to_string(stats.columns.size()));
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out(r, c) = stats.constant[c] ? 0.0 : (m(r, c) - stats.mean[c]) / stats.stddev[c];
    }
  }
  return out;
}

FeatureMatrix apply_scaling(const ScalingStats& stats, const FeatureMatrix& m) {
  if (m.columns != stats.columns) raise(ErrorCode::ColumnMismatch, "column names differ from the fitted scaling");
  FeatureMatrix out = m;
  out.values = apply_scaling(stats, m.values);
  return out;
}

std::vector<bool> daylight_mask(const HourlySeries& ssrd_hourly, double threshold) {
  std::vector<bool> out(ssrd_hourly.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ssrd_hourly.values[i] > threshold;
  return out;
}

FeatureMatrix assemble(const Dataset& data, const FeatureSpec& spec) {
  spec.validate();
  const auto base = spec.resolved_base();
  const auto ssrd = deaccumulate(data, AccumulatedField::ssrd);
  const auto strd = deaccumulate(data, AccumulatedField::strd);
  const auto tsr = deaccumulate(data, AccumulatedField::tsr);
  const auto tp = deaccumulate(data, AccumulatedField::tp);

  FeatureMatrix m;
  m.columns = base;
  m.values = Matrix(data.size(), base.size());
  m.daylight = daylight_mask(ssrd, spec.daylight_threshold);
  m.timestamps.reserve(data.size());
  m.target.reserve(data.size());

  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& rec = data.records()[i];
    const int hour = rec.timestamp.hour_of_day();
    const auto wind = wind_polar(rec.u10, rec.v10);
    auto row = m.values.row(i);
    for (std::size_t c = 0; c < base.size(); ++c) {
      const auto& col = base[c];
      double v = 0.0;
      if (col == "tclw") v = rec.tclw;
      else if (col == "tciw") v = rec.tciw;
      else if (col == "sp") v = rec.sp;
      else if (col == "rh") v = rec.rh;
      else if (col == "tcc") v = rec.tcc;
      else if (col == "u10") v = rec.u10;
      else if (col == "v10") v = rec.v10;
      else if (col == "t2m") v = rec.t2m;
      else if (col == "ssrd") v = ssrd.values[i];
      else if (col == "strd") v = strd.values[i];
      else if (col == "tsr") v = tsr.values[i];
      else if (col == "tp") v = tp.values[i];
      else if (col == "hour") v = hour;
      else if (col == "hour_sin") v = std::sin(2.0 * std::numbers::pi * hour / 24.0);
      else if (col == "hour_cos") v = std::cos(2.0 * std::numbers::pi * hour / 24.0);
      else if (col == "wind_speed") v = wind.speed;
      else if (col == "wind_dir") v = wind.direction_deg;
      else if (col == "heat_index") {
        const double tf = kelvin_to_fahrenheit(rec.t2m);
        v = spec.hi_floor && tf < 80.0 ? tf : heat_index(tf, rec.rh);
      } else {
        raise(ErrorCode::UnknownColumn, "no rule for column '" + col + "'");
      }
      row[c] = v;
    }
    m.timestamps.push_back(rec.timestamp);
    m.target.push_back(rec.power);
  }
  const auto quad = spec.resolved_quadratic();
  return quadratic_expand(m, quad);
}

void write_csv(std::ostream& out, const FeatureMatrix& m) {
  out << "timestamp";
  for (const auto& c : m.columns) out << ',' << c;
  out << ",daylight,target\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << format_timestamp(m.timestamps[r]);
    for (double v : m.values.row(r)) out << ',' << format_double(v);
    out << ',' << (m.daylight[r] ? 1 : 0) << ',';
    if (m.target[r]) out << format_double(*m.target[r]);
    out << '\n';
  }
}

}  // namespace helio
