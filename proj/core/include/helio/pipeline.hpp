#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helio/baselines.hpp"
#include "helio/features.hpp"
#include "helio/ingest.hpp"
#include "helio/svr.hpp"
#include "helio/time.hpp"
#include "helio/tuning.hpp"

namespace helio {

enum class ModelKind { svr, mlr, mlp };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct ModelParams {
  TrainConfig svr{};
  KernelSpec kernel{};
  MlpConfig mlp{};
  /// Per-month (C, gamma) for adaptive svr runs; months missing here use svr.c / kernel.gamma.
  std::map<Month, Candidate> monthly;
};

struct ForecastEntry {
  UtcHour timestamp;
  double predicted = 0.0;
  std::optional<double> actual;
  bool daylight = false;
  std::string model_tag;
  std::string params_tag;
};

struct DayFailure {
  Date day;
  std::string message;
};

struct ForecastSeries {
  std::vector<ForecastEntry> entries;
  std::vector<DayFailure> failures;
};

struct DayRange {
  Date first;
  Date last;
};

struct RollingOptions {
  std::size_t min_history_days = 30;
  int jobs = 1;
};

/// Forecasts every day of `range` from a model trained on all earlier daylight hours.
ForecastSeries rolling_forecast(const Dataset& data, ModelKind kind, const ModelParams& params, const FeatureSpec& spec,
                                DayRange range, const RollingOptions& options = {});

double rmse(std::span<const double> actual, std::span<const double> predicted,
            std::optional<std::span<const bool>> mask = std::nullopt);

struct MonthlyRow {
  Month month;
  double rmse = 0.0;
  std::size_t n_hours = 0;
};

struct DailyRow {
  Date date;
  double rmse = 0.0;
  std::size_t n_hours = 0;
};

struct ReportOptions {
  bool all_hours = false;
};

struct MonthlyReport {
  std::vector<MonthlyRow> monthly;
  std::vector<DailyRow> daily;
  std::vector<std::string> warnings;
};

MonthlyReport monthly_report(const ForecastSeries& series, const ReportOptions& options = {});

/// round(100 * (base - next) / base), halves away from zero.
int improvement_percent(double rmse_base, double rmse_new);

struct ImprovementRow {
  Month month;
  double rmse_a = 0.0;
  double rmse_b = 0.0;
  int percent = 0;
};

/// rmse_a from `base`, rmse_b from `candidate`; months must match one to one.
std::vector<ImprovementRow> improvement_table(std::span<const MonthlyRow> base, std::span<const MonthlyRow> candidate);

/// rmse_a is the run without the extra features, rmse_b the run with them.
std::vector<ImprovementRow> ablation_report(std::span<const MonthlyRow> with_rows, std::span<const MonthlyRow> without_rows);
std::vector<ImprovementRow> ablation_report(const ForecastSeries& with_series, const ForecastSeries& without_series,
                                            const ReportOptions& options = {});

struct ModelRun {
  std::string name;
  ModelKind kind = ModelKind::svr;
  ModelParams params;
  FeatureSpec spec;
};

struct ComparisonRow {
  std::string model;
  double rmse = 0.0;
  std::size_t n_hours = 0;
};

struct Comparison {
  std::vector<std::string> models;
  std::vector<ForecastSeries> series;
  std::vector<MonthlyReport> reports;
  std::vector<std::pair<Month, ComparisonRow>> monthly;
  std::vector<std::pair<Date, ComparisonRow>> daily;
};

Comparison compare_models(const Dataset& data, std::span<const ModelRun> runs, DayRange range,
                          const RollingOptions& options = {}, const ReportOptions& report = {});

void write_forecast_csv(std::ostream& out, const ForecastSeries& series);
ForecastSeries read_forecast_csv(std::istream& in);
/// `month,rmse,n_hours`
void write_monthly_csv(std::ostream& out, std::span<const MonthlyRow> rows);
/// `date,rmse`
void write_daily_csv(std::ostream& out, std::span<const DailyRow> rows);
/// `month,rmse_a,rmse_b,percent`
void write_improvement_csv(std::ostream& out, std::span<const ImprovementRow> rows);
/// `month,model,rmse`
void write_comparison_csv(std::ostream& out, const Comparison& comparison);
/// `date,model,rmse`
void write_comparison_daily_csv(std::ostream& out, const Comparison& comparison);

}  // namespace helio
