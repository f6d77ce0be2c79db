#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "helio/features.hpp"
#include "helio/folds.hpp"
#include "helio/ingest.hpp"

namespace helio {

struct PearsonResult {
  double r = 0.0;
  /// Set when either series is constant; r is then 0.
  bool degenerate = false;
};

PearsonResult pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationEntry {
  std::string column;
  double r = 0.0;
  bool degenerate = false;
};

/// Sorted by |r| descending, ties by column name ascending.
struct CorrelationRanking {
  std::vector<CorrelationEntry> entries;

  const CorrelationEntry* find(std::string_view column) const;
};

/// Correlation of every column with the target over rows that have one (daylight rows only by default).
CorrelationRanking rank_correlations(const FeatureMatrix& m, bool daylight_only = true);

enum class Direction { forward, backward };

struct TraceEntry {
  int step = 0;
  /// start | try_add | add | try_remove | remove
  std::string action;
  std::string column;
  double cv_rmse = 0.0;
};

struct SelectionResult {
  std::vector<std::string> chosen;
  std::vector<TraceEntry> trace;
  Direction direction = Direction::forward;
  double cv_rmse = 0.0;
};

inline constexpr double kGreedyMinImprovement = 1e-6;

struct GreedyOptions {
  bool daylight_only = true;
  int jobs = 1;
};

/// Greedy subset search wrapped around least squares, scored by pooled cross-validated RMSE.
/// A step is accepted only when it lowers CV-RMSE by more than 1e-6.
SelectionResult greedy_select(const FeatureMatrix& m, Direction direction, const FoldPlan& plan, int max_steps,
                              const GreedyOptions& options = {});

/// Pooled CV-RMSE of least squares on `columns` (empty = intercept only).
double ols_cv_rmse(const FeatureMatrix& m, std::span<const std::string> columns, const FoldPlan& plan,
                   bool daylight_only = true);

struct Period {
  std::string label;
  Date first;
  Date last;
};

/// Rankings for the full range and each period; `table[c][p]` aligns r by column
/// (p = 0 is the full range, p = i + 1 is periods[i]).
struct CorrelationReport {
  std::vector<std::string> columns;
  std::vector<std::string> labels;
  CorrelationRanking full;
  std::vector<CorrelationRanking> periods;
  std::vector<std::vector<double>> table;
};

CorrelationReport correlation_report(const Dataset& data, const FeatureSpec& spec, std::span<const Period> periods,
                                     bool daylight_only = true);

void write_ranking_csv(std::ostream& out, const CorrelationRanking& ranking);
void write_trace_csv(std::ostream& out, const SelectionResult& result);
void write_report_csv(std::ostream& out, const CorrelationReport& report);

}  // namespace helio
