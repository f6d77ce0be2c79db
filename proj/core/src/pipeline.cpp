#include "helio/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "helio/error.hpp"
#include "helio/parallel.hpp"
#include "helio/text.hpp"

namespace helio {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::svr: return "svr";
    case ModelKind::mlr: return "mlr";
    case ModelKind::mlp: return "mlp";
  }
  return "svr";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "svr") return ModelKind::svr;
  if (text == "mlr") return ModelKind::mlr;
  if (text == "mlp") return ModelKind::mlp;
  raise(ErrorCode::BadConfig, "unknown model '" + std::string(text) + "' (expected svr, mlr or mlp)");
}

namespace {

struct DayOutcome {
  std::vector<ForecastEntry> entries;
  std::optional<std::string> failure;
};

std::string svr_tag(double c, double gamma) { return "c=" + format_double(c) + " gamma=" + format_double(gamma); }

std::vector<double> fit_and_predict(ModelKind kind, const ModelParams& params, Month month, const Matrix& xtr,
                                    std::span<const double> ytr, const Matrix& xte, std::string& tag,
                                    std::vector<double>& warm) {
  switch (kind) {
    case ModelKind::svr: {
      TrainConfig cfg = params.svr;
      KernelSpec kernel = params.kernel;
      if (auto it = params.monthly.find(month); it != params.monthly.end()) {
        cfg.c = it->second.c;
        kernel.gamma = it->second.gamma;
      }
      tag = svr_tag(cfg.c, kernel.gamma);
      const auto model = train(xtr, ytr, cfg, kernel, warm);
      warm = expand_coefficients(model, xtr);
      return predict(model, xte);
    }
    case ModelKind::mlr: {
      const auto model = mlr_fit(xtr, ytr);
      tag = model.ridge_lambda > 0.0 ? "ridge=" + format_double(model.ridge_lambda) : "ols";
      return mlr_predict(model, xte);
    }
    case ModelKind::mlp: {
      tag = "hidden=" + std::to_string(params.mlp.hidden_units) + " seed=" + std::to_string(params.mlp.seed);
      MlpConfig cfg = params.mlp;
      cfg.jobs = 1;
      return mlp_predict(mlp_fit(xtr, ytr, cfg), xte);
    }
  }
  return {};
}

}  // namespace

ForecastSeries rolling_forecast(const Dataset& data, ModelKind kind, const ModelParams& params, const FeatureSpec& spec,
                                DayRange range, const RollingOptions& options) {
  if (data.empty()) raise(ErrorCode::NoData, "empty dataset");
  if (range.last < range.first) raise(ErrorCode::BadConfig, "forecast range ends before it starts");
  if (range.first < data.first_day() || range.last > data.last_day()) {
    raise(ErrorCode::BadConfig, "forecast range " + format_date(range.first) + ".." + format_date(range.last) +
                                    " lies outside the data");
  }
  const auto history = static_cast<std::size_t>((range.first - data.first_day()).count());
  if (history < options.min_history_days) {
    raise(ErrorCode::InsufficientHistory, std::to_string(history) + " days before " + format_date(range.first) +
                                              ", need " + std::to_string(options.min_history_days));
  }

  const FeatureMatrix full = assemble(data, spec);
  const std::string model_tag(to_string(kind));
  const auto n_days = static_cast<std::size_t>((range.last - range.first).count()) + 1;
  std::vector<DayOutcome> outcomes(n_days);

  // Each svr day starts SMO from the previous day's solution, so those days run in order.
  std::vector<double> warm;
  auto solve = [&](std::size_t k, std::vector<double>& start) {
    const Date day = range.first + std::chrono::days(static_cast<int>(k));
    const std::size_t begin = *data.day_offset(day);
    const std::size_t end = begin + 24;
    std::vector<std::size_t> train_rows;
    for (std::size_t r = 0; r < begin; ++r) {
      if (full.daylight[r] && full.target[r]) train_rows.push_back(r);
    }
    std::vector<std::size_t> test_rows;
    for (std::size_t r = begin; r < end; ++r) test_rows.push_back(r);

    std::vector<double> pred(24, 0.0);
    std::string tag;
    DayOutcome& out = outcomes[k];
    try {
      if (train_rows.size() < 2) raise(ErrorCode::NoData, "fewer than 2 daylight training rows");
      const Matrix xtr_raw = full.values.select_rows(train_rows);
      const auto stats = fit_scaling(xtr_raw, full.columns);
      const Matrix xtr = apply_scaling(stats, xtr_raw);
      const Matrix xte = apply_scaling(stats, full.values.select_rows(test_rows));
      std::vector<double> ytr;
      ytr.reserve(train_rows.size());
      for (auto r : train_rows) ytr.push_back(*full.target[r]);
      pred = fit_and_predict(kind, params, month_of(day), xtr, ytr, xte, tag, start);
    } catch (const Error& e) {
      out.failure = e.what();
      return;
    }
    out.entries.reserve(24);
    for (std::size_t i = 0; i < 24; ++i) {
      const std::size_t r = begin + i;
      double p = full.daylight[r] ? std::clamp(pred[i], 0.0, 1.0) : 0.0;
      if (std::isnan(p)) p = 0.0;
      out.entries.push_back({full.timestamps[r], p, full.target[r], static_cast<bool>(full.daylight[r]), model_tag, tag});
    }
  };
  if (kind == ModelKind::svr) {
    for (std::size_t k = 0; k < n_days; ++k) solve(k, warm);
  } else {
    parallel_for(n_days, options.jobs, [&](std::size_t k) {
      std::vector<double> unused;
      solve(k, unused);
    });
  }

  ForecastSeries series;
  series.entries.reserve(n_days * 24);
  for (std::size_t k = 0; k < n_days; ++k) {
    if (outcomes[k].failure) {
      series.failures.push_back({range.first + std::chrono::days(static_cast<int>(k)), *outcomes[k].failure});
      continue;
    }
    series.entries.insert(series.entries.end(), outcomes[k].entries.begin(), outcomes[k].entries.end());
  }
  return series;
}

double rmse(std::span<const double> actual, std::span<const double> predicted, std::optional<std::span<const bool>> mask) {
  if (actual.size() != predicted.size() || (mask && mask->size() != actual.size())) {
    raise(ErrorCode::LengthMismatch, "rmse inputs differ in length");
  }
  double sse = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    const double e = actual[i] - predicted[i];
    sse += e * e;
    ++n;
  }
  if (n == 0) raise(ErrorCode::EmptyAfterMask, "no entries left after masking");
  return std::sqrt(sse / static_cast<double>(n));
}

int improvement_percent(double rmse_base, double rmse_new) {
  if (!(rmse_base > 0.0)) raise(ErrorCode::ZeroBase, "base rmse must be positive, got " + format_double(rmse_base));
  return static_cast<int>(std::lround(100.0 * (rmse_base - rmse_new) / rmse_base));
}

std::vector<ImprovementRow> improvement_table(std::span<const MonthlyRow> base, std::span<const MonthlyRow> candidate) {
  if (base.size() != candidate.size()) {
    raise(ErrorCode::MonthMismatch, std::to_string(base.size()) + " months vs " + std::to_string(candidate.size()));
  }
  std::vector<ImprovementRow> out;
  out.reserve(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (base[i].month != candidate[i].month) {
      raise(ErrorCode::MonthMismatch, format_month(base[i].month) + " vs " + format_month(candidate[i].month));
    }
    out.push_back({base[i].month, base[i].rmse, candidate[i].rmse, improvement_percent(base[i].rmse, candidate[i].rmse)});
  }
  return out;
}

std::vector<ImprovementRow> ablation_report(std::span<const MonthlyRow> with_rows, std::span<const MonthlyRow> without_rows) {
  return improvement_table(without_rows, with_rows);
}

std::vector<ImprovementRow> ablation_report(const ForecastSeries& with_series, const ForecastSeries& without_series,
                                            const ReportOptions& options) {
  const auto with_report = monthly_report(with_series, options);
  const auto without_report = monthly_report(without_series, options);
  return ablation_report(with_report.monthly, without_report.monthly);
}

Comparison compare_models(const Dataset& data, std::span<const ModelRun> runs, DayRange range,
                          const RollingOptions& options, const ReportOptions& report) {
  Comparison out;
  for (const auto& run : runs) {
    out.models.push_back(run.name);
    out.series.push_back(rolling_forecast(data, run.kind, run.params, run.spec, range, options));
    out.reports.push_back(monthly_report(out.series.back(), report));
  }
  std::map<Month, std::vector<ComparisonRow>> by_month;
  std::map<Date, std::vector<ComparisonRow>> by_day;
  for (std::size_t m = 0; m < runs.size(); ++m) {
    for (const auto& row : out.reports[m].monthly) by_month[row.month].push_back({out.models[m], row.rmse, row.n_hours});
    for (const auto& row : out.reports[m].daily) by_day[row.date].push_back({out.models[m], row.rmse, row.n_hours});
  }
  for (auto& [month, rows] : by_month) {
    for (auto& row : rows) out.monthly.emplace_back(month, std::move(row));
  }
  for (auto& [day, rows] : by_day) {
    for (auto& row : rows) out.daily.emplace_back(day, std::move(row));
  }
  return out;
}

}  // namespace helio
