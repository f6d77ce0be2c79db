#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "helio/error.hpp"
#include "helio/pipeline.hpp"
#include "helio/text.hpp"

namespace helio {

namespace {

struct Accumulator {
  double sse = 0.0;
  std::size_t n = 0;
  bool seen = false;
};

}  // namespace

MonthlyReport monthly_report(const ForecastSeries& series, const ReportOptions& options) {
  std::map<Month, Accumulator> months;
  std::map<Date, Accumulator> days;
  bool any_actual = false;
  for (const auto& e : series.entries) {
    if (!e.actual) continue;
    any_actual = true;
    auto& m = months[e.timestamp.month()];
    auto& d = days[e.timestamp.day()];
    m.seen = d.seen = true;
    if (!options.all_hours && !e.daylight) continue;
    const double err = *e.actual - e.predicted;
    m.sse += err * err;
    d.sse += err * err;
    ++m.n;
    ++d.n;
  }
  if (!any_actual) raise(ErrorCode::NoActuals, "forecast series carries no observed power");

  MonthlyReport report;
  for (const auto& [month, acc] : months) {
    if (acc.n == 0) {
      report.warnings.push_back("EmptyAfterMask: " + format_month(month) + " has no daylight hours, row omitted");
      continue;
    }
    report.monthly.push_back({month, std::sqrt(acc.sse / static_cast<double>(acc.n)), acc.n});
  }
  for (const auto& [day, acc] : days) {
    if (acc.n == 0) continue;
    report.daily.push_back({day, std::sqrt(acc.sse / static_cast<double>(acc.n)), acc.n});
  }
  return report;
}

void write_forecast_csv(std::ostream& out, const ForecastSeries& series) {
  out << "timestamp,predicted,actual,daylight,model,params\n";
  for (const auto& e : series.entries) {
    out << format_timestamp(e.timestamp) << ',' << format_double(e.predicted) << ','
        << (e.actual ? format_double(*e.actual) : std::string()) << ',' << (e.daylight ? 1 : 0) << ',' << e.model_tag
        << ',' << e.params_tag << '\n';
  }
}

ForecastSeries read_forecast_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) raise(ErrorCode::NoData, "empty forecast file");
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected{"timestamp", "predicted", "actual", "daylight", "model", "params"};
  if (header != expected) raise(ErrorCode::MissingColumn, "forecast header must be " + join(expected, ","));
  ForecastSeries series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    try {
      if (f.size() != expected.size()) raise(ErrorCode::InvalidRecord, "expected 6 fields");
      ForecastEntry e;
      e.timestamp = parse_timestamp(f[0]);
      e.predicted = parse_double(f[1]);
      if (!f[2].empty()) e.actual = parse_double(f[2]);
      if (f[3] != "0" && f[3] != "1") raise(ErrorCode::InvalidRecord, "daylight must be 0 or 1");
      e.daylight = f[3] == "1";
      e.model_tag = f[4];
      e.params_tag = f[5];
      if (!series.entries.empty() && !(series.entries.back().timestamp < e.timestamp)) {
        raise(ErrorCode::BadTimestamp, "timestamps must increase");
      }
      series.entries.push_back(std::move(e));
    } catch (const Error& e) {
      raise(e.code(), "line " + std::to_string(line_no) + ": " + e.detail());
    }
  }
  return series;
}

void write_monthly_csv(std::ostream& out, std::span<const MonthlyRow> rows) {
  out << "month,rmse,n_hours\n";
  for (const auto& r : rows) out << format_month(r.month) << ',' << format_double(r.rmse) << ',' << r.n_hours << '\n';
}

void write_daily_csv(std::ostream& out, std::span<const DailyRow> rows) {
  out << "date,rmse\n";
  for (const auto& r : rows) out << format_date(r.date) << ',' << format_double(r.rmse) << '\n';
}

void write_improvement_csv(std::ostream& out, std::span<const ImprovementRow> rows) {
  out << "month,rmse_a,rmse_b,percent\n";
  for (const auto& r : rows) {
    out << format_month(r.month) << ',' << format_double(r.rmse_a) << ',' << format_double(r.rmse_b) << ',' << r.percent
        << '\n';
  }
}

void write_comparison_csv(std::ostream& out, const Comparison& comparison) {
  out << "month,model,rmse\n";
  for (const auto& [month, row] : comparison.monthly) {
    out << format_month(month) << ',' << row.model << ',' << format_double(row.rmse) << '\n';
  }
}

void write_comparison_daily_csv(std::ostream& out, const Comparison& comparison) {
  out << "date,model,rmse\n";
  for (const auto& [day, row] : comparison.daily) {
    out << format_date(day) << ',' << row.model << ',' << format_double(row.rmse) << '\n';
  }
}

}  // namespace helio
