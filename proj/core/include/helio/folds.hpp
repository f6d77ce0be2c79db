#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "helio/features.hpp"
#include "helio/ingest.hpp"
#include "helio/time.hpp"

namespace helio {

/// Calendar days sampled for cross-validation and their fold assignment.
/// Whole days are never split across folds.
struct FoldPlan {
  std::vector<Date> day_ids;
  int k = 0;
  std::vector<int> assignment;  // parallel to day_ids

  /// Fold of `day`, or -1 when the day was not sampled.
  int fold_of(Date day) const;
  bool operator==(const FoldPlan&) const = default;
};

/// Seeded uniform sample of `n_days` without replacement, shuffled, then assigned round-robin.
FoldPlan sample_cv_days(std::span<const Date> days, std::size_t n_days, int k, std::uint64_t seed);
FoldPlan sample_cv_days(const Dataset& data, std::size_t n_days, int k, std::uint64_t seed);

/// Row indices for one fold: training rows come from the other folds' days,
/// test rows from this fold's days.
struct FoldRows {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Only rows with a target (and, if requested, daylight) participate.
std::vector<FoldRows> fold_rows(const FeatureMatrix& m, const FoldPlan& plan, bool daylight_only = true);

}  // namespace helio
