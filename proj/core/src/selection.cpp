#include "helio/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "helio/baselines.hpp"
#include "helio/error.hpp"
#include "helio/parallel.hpp"
#include "helio/text.hpp"

namespace helio {

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(ErrorCode::LengthMismatch, "series lengths differ");
  if (x.size() < 2) raise(ErrorCode::LengthMismatch, "correlation needs at least 2 points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  bool x_const = true, y_const = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
    x_const = x_const && x[i] == x[0];
    y_const = y_const && y[i] == y[0];
  }
  if (x_const || y_const || sxx == 0.0 || syy == 0.0) return {0.0, true};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

const CorrelationEntry* CorrelationRanking::find(std::string_view column) const {
  for (const auto& e : entries) {
    if (e.column == column) return &e;
  }
  return nullptr;
}

namespace {

std::vector<std::size_t> usable_rows(const FeatureMatrix& m, bool daylight_only) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (m.target[r] && (!daylight_only || m.daylight[r])) rows.push_back(r);
  }
  return rows;
}

CorrelationRanking rank_rows(const FeatureMatrix& m, std::span<const std::size_t> rows) {
  std::vector<double> target;
  target.reserve(rows.size());
  for (auto r : rows) target.push_back(*m.target[r]);
  CorrelationRanking ranking;
  std::vector<double> col(rows.size());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    for (std::size_t i = 0; i < rows.size(); ++i) col[i] = m.values(rows[i], c);
    const auto p = pearson(col, target);
    ranking.entries.push_back({m.columns[c], p.r, p.degenerate});
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(), [](const auto& a, const auto& b) {
    const double fa = std::abs(a.r), fb = std::abs(b.r);
    if (fa != fb) return fa > fb;
    return a.column < b.column;
  });
  return ranking;
}

}  // namespace

CorrelationRanking rank_correlations(const FeatureMatrix& m, bool daylight_only) {
  const auto rows = usable_rows(m, daylight_only);
  if (rows.empty()) raise(ErrorCode::NoTarget, "no rows with an observed target");
  return rank_rows(m, rows);
}

double ols_cv_rmse(const FeatureMatrix& m, std::span<const std::string> columns, const FoldPlan& plan,
                   bool daylight_only) {
  std::vector<std::size_t> idx;
  for (const auto& c : columns) {
    const auto i = m.column_index(c);
    if (!i) raise(ErrorCode::UnknownColumn, "no column '" + c + "'");
    idx.push_back(*i);
  }
  double sse = 0.0;
  std::size_t count = 0;
  for (const auto& fold : fold_rows(m, plan, daylight_only)) {
    if (fold.train.empty() || fold.test.empty()) continue;
    const Matrix xtr = m.values.select_rows(fold.train).select_columns(idx);
    const Matrix xte = m.values.select_rows(fold.test).select_columns(idx);
    std::vector<double> ytr;
    ytr.reserve(fold.train.size());
    for (auto r : fold.train) ytr.push_back(*m.target[r]);
    const auto pred = mlr_predict(mlr_fit(xtr, ytr), xte);
    for (std::size_t i = 0; i < fold.test.size(); ++i) {
      const double e = *m.target[fold.test[i]] - pred[i];
      sse += e * e;
    }
    count += fold.test.size();
  }
  if (count == 0) raise(ErrorCode::EmptyMatrix, "cross-validation plan selects no usable rows");
  return std::sqrt(sse / static_cast<double>(count));
}

SelectionResult greedy_select(const FeatureMatrix& m, Direction direction, const FoldPlan& plan, int max_steps,
                              const GreedyOptions& options) {
  if (m.rows() == 0 || m.cols() == 0) raise(ErrorCode::EmptyMatrix, "feature matrix is empty");
  if (m.cols() < 2) raise(ErrorCode::EmptyMatrix, "greedy selection needs at least 2 columns");
  if (!m.has_target()) raise(ErrorCode::NoTarget, "greedy selection needs a target");

  SelectionResult result;
  result.direction = direction;
  std::vector<std::string> current;
  if (direction == Direction::backward) current = m.columns;
  double current_rmse = ols_cv_rmse(m, current, plan, options.daylight_only);
  result.trace.push_back({0, "start", "", current_rmse});

  for (int step = 1; step <= max_steps; ++step) {
    std::vector<std::string> candidates;
    if (direction == Direction::forward) {
      for (const auto& c : m.columns) {
        if (std::find(current.begin(), current.end(), c) == current.end()) candidates.push_back(c);
      }
    } else {
      candidates = current;
    }
    if (candidates.empty()) break;

    std::vector<double> scores(candidates.size());
    parallel_for(candidates.size(), options.jobs, [&](std::size_t i) {
      std::vector<std::string> trial;
      if (direction == Direction::forward) {
        trial = current;
        trial.push_back(candidates[i]);
      } else {
        for (const auto& c : current) {
          if (c != candidates[i]) trial.push_back(c);
        }
      }
      scores[i] = ols_cv_rmse(m, trial, plan, options.daylight_only);
    });

    std::size_t best = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      result.trace.push_back({step, direction == Direction::forward ? "try_add" : "try_remove", candidates[i], scores[i]});
      if (scores[i] < scores[best] || (scores[i] == scores[best] && candidates[i] < candidates[best])) best = i;
    }
    if (!(current_rmse - scores[best] > kGreedyMinImprovement)) break;

    if (direction == Direction::forward) {
      current.push_back(candidates[best]);
    } else {
      current.erase(std::find(current.begin(), current.end(), candidates[best]));
    }
    current_rmse = scores[best];
    result.trace.push_back({step, direction == Direction::forward ? "add" : "remove", candidates[best], current_rmse});
  }
  result.chosen = current;
  result.cv_rmse = current_rmse;
  return result;
}

CorrelationReport correlation_report(const Dataset& data, const FeatureSpec& spec, std::span<const Period> periods,
                                     bool daylight_only) {
  const auto m = assemble(data, spec);
  CorrelationReport report;
  report.columns = m.columns;
  report.labels.push_back("full");
  report.full = rank_correlations(m, daylight_only);

  const auto all = usable_rows(m, daylight_only);
  for (const auto& period : periods) {
    std::vector<std::size_t> rows;
    for (auto r : all) {
      const auto d = m.timestamps[r].day();
      if (d >= period.first && d <= period.last) rows.push_back(r);
    }
    if (rows.size() < 2) {
      raise(ErrorCode::EmptyPeriod, "period '" + period.label + "' (" + format_date(period.first) + ".." +
                                        format_date(period.last) + ") has no usable rows");
    }
    report.labels.push_back(period.label);
    report.periods.push_back(rank_rows(m, rows));
  }

  report.table.resize(report.columns.size());
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    report.table[c].push_back(report.full.find(report.columns[c])->r);
    for (const auto& ranking : report.periods) report.table[c].push_back(ranking.find(report.columns[c])->r);
  }
  return report;
}

void write_ranking_csv(std::ostream& out, const CorrelationRanking& ranking) {
  out << "column,r\n";
  for (const auto& e : ranking.entries) out << e.column << ',' << format_double(e.r) << '\n';
}

void write_trace_csv(std::ostream& out, const SelectionResult& result) {
  out << "step,action,column,cv_rmse\n";
  for (const auto& t : result.trace) {
    out << t.step << ',' << t.action << ',' << t.column << ',' << format_double(t.cv_rmse) << '\n';
  }
}

void write_report_csv(std::ostream& out, const CorrelationReport& report) {
  out << "column";
  for (const auto& l : report.labels) out << ',' << l;
  out << '\n';
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    out << report.columns[c];
    for (double r : report.table[c]) out << ',' << format_double(r);
    out << '\n';
  }
}

}  // namespace helio
