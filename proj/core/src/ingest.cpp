#include "helio/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "helio/error.hpp"
#include "helio/text.hpp"

namespace helio {

namespace {

double accumulated(const WeatherRecord& r, AccumulatedField field) {
  switch (field) {
    case AccumulatedField::ssrd: return r.ssrd_acc;
    case AccumulatedField::strd: return r.strd_acc;
    case AccumulatedField::tsr: return r.tsr_acc;
    case AccumulatedField::tp: return r.tp_acc;
  }
  return 0.0;
}

const char* field_name(AccumulatedField field) {
  switch (field) {
    case AccumulatedField::ssrd: return "ssrd";
    case AccumulatedField::strd: return "strd";
    case AccumulatedField::tsr: return "tsr";
    case AccumulatedField::tp: return "tp";
  }
  return "?";
}

void check_record(const WeatherRecord& r) {
  const auto where = " at " + format_timestamp(r.timestamp);
  const double values[] = {r.tclw, r.tciw, r.sp, r.rh, r.tcc, r.u10, r.v10, r.t2m,
                           r.ssrd_acc, r.strd_acc, r.tsr_acc, r.tp_acc};
  for (double v : values) {
    if (!std::isfinite(v)) raise(ErrorCode::InvalidRecord, "non-finite weather value" + where);
  }
  if (r.tcc < 0.0 || r.tcc > 1.0) raise(ErrorCode::InvalidRecord, "tcc outside [0, 1]" + where);
  if (r.rh < 0.0 || r.rh > 100.0) raise(ErrorCode::InvalidRecord, "rh outside [0, 100]" + where);
  if (r.sp <= 0.0) raise(ErrorCode::InvalidRecord, "sp must be positive" + where);
  if (r.t2m <= 0.0) raise(ErrorCode::NonPhysical, "t2m must be positive kelvin" + where);
  if (r.ssrd_acc < 0.0 || r.strd_acc < 0.0 || r.tsr_acc < 0.0 || r.tp_acc < 0.0) {
    raise(ErrorCode::InvalidRecord, "negative accumulated value" + where);
  }
  if (r.power && (!std::isfinite(*r.power) || *r.power < 0.0 || *r.power > 1.0)) {
    raise(ErrorCode::InvalidRecord, "normalized power outside [0, 1]" + where);
  }
}

}  // namespace

Dataset::Dataset(std::vector<WeatherRecord> records, double capacity, std::string zone_id, IngestStats stats)
    : records_(std::move(records)), capacity_(capacity), zone_id_(std::move(zone_id)), stats_(stats) {
  if (!(capacity_ > 0.0)) raise(ErrorCode::CapacityNonPositive, "capacity must be positive");
  if (records_.empty()) return;

  if (records_.front().timestamp.hour_of_day() != 0) {
    raise(ErrorCode::CalendarGap,
          "missing " + format_timestamp(UtcHour(records_.front().timestamp.day(), 0)) + " (day starts mid-way)");
  }
  for (std::size_t i = 0; i < records_.size(); ++i) {
    check_record(records_[i]);
    if (i == 0) continue;
    const auto prev = records_[i - 1].timestamp;
    const auto step = records_[i].timestamp - prev;
    if (step <= 0) {
      raise(ErrorCode::BadTimestamp, "duplicate or out-of-order hour " + format_timestamp(records_[i].timestamp));
    }
    if (step > 1) raise(ErrorCode::CalendarGap, "missing " + format_timestamp(prev + 1));
  }
  if (records_.size() % 24 != 0) {
    raise(ErrorCode::CalendarGap, "missing " + format_timestamp(records_.back().timestamp + 1) + " (day ends early)");
  }
  for (auto field : {AccumulatedField::ssrd, AccumulatedField::strd, AccumulatedField::tsr, AccumulatedField::tp}) {
    for (std::size_t i = 1; i < records_.size(); ++i) {
      if (records_[i].timestamp.hour_of_day() == 0) continue;
      if (accumulated(records_[i], field) < accumulated(records_[i - 1], field)) {
        raise(ErrorCode::NegativeIncrement,
              std::string(field_name(field)) + " decreases within the day at " + format_timestamp(records_[i].timestamp));
      }
    }
  }
}

Date Dataset::first_day() const { return records_.front().timestamp.day(); }

Date Dataset::last_day() const { return records_.back().timestamp.day(); }

std::vector<Date> Dataset::days() const {
  std::vector<Date> out;
  out.reserve(day_count());
  for (std::size_t i = 0; i < records_.size(); i += 24) out.push_back(records_[i].timestamp.day());
  return out;
}

std::optional<std::size_t> Dataset::day_offset(Date day) const {
  if (records_.empty() || day < first_day() || day > last_day()) return std::nullopt;
  return static_cast<std::size_t>((day - first_day()).count()) * 24;
}

std::span<const WeatherRecord> Dataset::day_records(Date day) const {
  const auto offset = day_offset(day);
  if (!offset) return {};
  return std::span<const WeatherRecord>(records_).subspan(*offset, 24);
}

Dataset Dataset::slice(Date first, Date last) const {
  std::vector<WeatherRecord> out;
  for (const auto& r : records_) {
    const auto d = r.timestamp.day();
    if (d >= first && d <= last) out.push_back(r);
  }
  return Dataset(std::move(out), capacity_, zone_id_);
}

ColumnMapping ColumnMapping::identity() {
  ColumnMapping m;
  for (const char* name : kRequiredColumns) m.logical_to_physical[name] = name;
  m.logical_to_physical["power"] = "power";
  return m;
}

ColumnMapping ColumnMapping::from_config(const KvConfig& cfg) {
  ColumnMapping m = identity();
  for (const auto& [key, value] : cfg.entries()) {
    if (key == "timestamp_format") {
      if (value != "iso" && value != "compact") raise(ErrorCode::BadConfig, "timestamp_format must be iso or compact");
      m.timestamp_format = value;
    } else if (key == "hour_offset") {
      m.hour_offset = parse_int(value);
    } else if (key == "zone_column") {
      m.zone_column = value;
    } else if (key == "zone") {
      m.zone = value;
    } else {
      const bool known = key == "power" || std::find_if(kRequiredColumns.begin(), kRequiredColumns.end(),
                                                        [&](const char* c) { return key == c; }) != kRequiredColumns.end();
      if (!known) raise(ErrorCode::BadConfig, "unknown logical column '" + key + "' in mapping");
      if (value.empty()) {
        if (key != "power") raise(ErrorCode::MissingColumn, "mapping leaves required column '" + key + "' empty");
        m.logical_to_physical.erase(key);
      } else {
        m.logical_to_physical[key] = value;
      }
    }
  }
  return m;
}

Dataset parse_csv(std::istream& in, const ParseOptions& options) {
  const auto& mapping = options.mapping;
  std::string line;
  if (!std::getline(in, line)) raise(ErrorCode::MissingColumn, "empty input: header row required");
  const auto header = split_csv_line(line);

  auto find_header = [&](const std::string& physical) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == physical) return i;
    }
    return std::nullopt;
  };

  std::array<std::size_t, kRequiredColumns.size()> idx{};
  std::vector<std::string> missing;
  for (std::size_t c = 0; c < kRequiredColumns.size(); ++c) {
    const auto it = mapping.logical_to_physical.find(kRequiredColumns[c]);
    const auto pos = it == mapping.logical_to_physical.end() ? std::nullopt : find_header(it->second);
    if (!pos) {
      missing.emplace_back(kRequiredColumns[c]);
    } else {
      idx[c] = *pos;
    }
  }
  if (!missing.empty()) raise(ErrorCode::MissingColumn, "unmapped or absent columns: " + join(missing, ","));

  std::optional<std::size_t> power_idx;
  if (const auto it = mapping.logical_to_physical.find("power"); it != mapping.logical_to_physical.end()) {
    power_idx = find_header(it->second);
  }
  std::optional<std::size_t> zone_idx;
  if (mapping.zone_column) {
    zone_idx = find_header(*mapping.zone_column);
    if (!zone_idx) raise(ErrorCode::MissingColumn, "zone column '" + *mapping.zone_column + "' absent");
  }

  std::vector<WeatherRecord> records;
  IngestStats stats;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < header.size()) {
      raise(ErrorCode::InvalidRecord, "line " + std::to_string(lineno) + ": expected " +
                                          std::to_string(header.size()) + " fields");
    }
    if (zone_idx && mapping.zone && fields[*zone_idx] != *mapping.zone) continue;

    WeatherRecord r;
    try {
      r.timestamp = mapping.timestamp_format == "compact" ? parse_compact_timestamp(fields[idx[0]])
                                                          : parse_timestamp(fields[idx[0]]);
      r.timestamp = r.timestamp + mapping.hour_offset;
      double* targets[] = {&r.tclw, &r.tciw, &r.sp, &r.rh, &r.tcc, &r.u10, &r.v10,
                           &r.t2m, &r.ssrd_acc, &r.strd_acc, &r.tsr_acc, &r.tp_acc};
      for (std::size_t c = 1; c < kRequiredColumns.size(); ++c) *targets[c - 1] = parse_double(fields[idx[c]]);
      if (power_idx && !trim(fields[*power_idx]).empty()) {
        const auto p = normalize_power(parse_double(fields[*power_idx]), options.capacity);
        if (p.clamped) {
          if (p.value == 0.0) {
            ++stats.clamped_negative;
          } else {
            ++stats.clamped_over_capacity;
          }
        }
        r.power = p.value;
      }
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.detail());
    }
    records.push_back(r);
  }
  return Dataset(std::move(records), options.capacity, options.zone_id, stats);
}

void write_csv(std::ostream& out, const Dataset& data) {
  out << "timestamp,tclw,tciw,sp,rh,tcc,u10,v10,t2m,ssrd,strd,tsr,tp,power\n";
  for (const auto& r : data.records()) {
    out << format_timestamp(r.timestamp);
    for (double v : {r.tclw, r.tciw, r.sp, r.rh, r.tcc, r.u10, r.v10, r.t2m, r.ssrd_acc, r.strd_acc, r.tsr_acc,
                     r.tp_acc}) {
      out << ',' << format_double(v);
    }
    out << ',';
    if (r.power) out << format_double(*r.power);
    out << '\n';
  }
}

HourlySeries deaccumulate(std::span<const UtcHour> timestamps, std::span<const double> acc) {
  if (timestamps.size() != acc.size()) raise(ErrorCode::LengthMismatch, "timestamps and values differ in length");
  HourlySeries out;
  if (acc.empty()) return out;
  out.start = timestamps.front();
  out.values.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc[i] < 0.0) raise(ErrorCode::NegativeIncrement, "negative accumulated value at " + format_timestamp(timestamps[i]));
    const bool restart = i == 0 || timestamps[i].day() != timestamps[i - 1].day();
    if (restart) {
      out.values[i] = acc[i];
    } else if (acc[i] < acc[i - 1]) {
      raise(ErrorCode::NegativeIncrement, "accumulation decreases within the day at " + format_timestamp(timestamps[i]));
    } else {
      out.values[i] = acc[i] - acc[i - 1];
    }
  }
  return out;
}

HourlySeries deaccumulate(const Dataset& data, AccumulatedField field) {
  std::vector<UtcHour> ts;
  std::vector<double> values;
  ts.reserve(data.size());
  values.reserve(data.size());
  for (const auto& r : data.records()) {
    ts.push_back(r.timestamp);
    values.push_back(accumulated(r, field));
  }
  return deaccumulate(ts, values);
}

std::vector<double> accumulate(const HourlySeries& hourly) {
  std::vector<double> out(hourly.values.size());
  double run = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i == 0 || (hourly.start + static_cast<std::int64_t>(i)).hour_of_day() == 0) run = 0.0;
    run += hourly.values[i];
    out[i] = run;
  }
  return out;
}

double kelvin_to_fahrenheit(double kelvin) {
  if (!(kelvin > 0.0)) raise(ErrorCode::NonPhysical, "temperature must be above absolute zero");
  return (kelvin - 273.15) * 9.0 / 5.0 + 32.0;
}

NormalizedPower normalize_power(double raw, double capacity) {
  if (!(capacity > 0.0)) raise(ErrorCode::CapacityNonPositive, "capacity must be positive");
  const double ratio = raw / capacity;
  if (!std::isfinite(ratio) || ratio > 1.2 || ratio < -0.01) {
    raise(ErrorCode::PowerOutOfRange, "power " + format_double(raw) + " outside [-1 %, 120 %] of capacity");
  }
  if (ratio < 0.0) return {0.0, true};
  if (ratio == 0.0) return {0.0, false};
  if (ratio > 1.0) return {1.0, true};
  return {ratio, false};
}

}  // namespace helio
