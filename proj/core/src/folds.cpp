#include "helio/folds.hpp"

#include <algorithm>
#include <map>

#include "helio/error.hpp"
#include "helio/seeding.hpp"

namespace helio {

int FoldPlan::fold_of(Date day) const {
  for (std::size_t i = 0; i < day_ids.size(); ++i) {
    if (day_ids[i] == day) return assignment[i];
  }
  return -1;
}

FoldPlan sample_cv_days(std::span<const Date> days, std::size_t n_days, int k, std::uint64_t seed) {
  if (k < 1) raise(ErrorCode::BadConfig, "fold count must be positive");
  if (n_days < static_cast<std::size_t>(k)) raise(ErrorCode::BadConfig, "need at least one day per fold");
  if (days.size() < n_days) {
    raise(ErrorCode::TooFewDays, "requested " + std::to_string(n_days) + " days from " + std::to_string(days.size()));
  }
  std::vector<Date> pool(days.begin(), days.end());
  Rng rng(seed);
  for (std::size_t i = pool.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.index(i));
    std::swap(pool[i - 1], pool[j]);
  }
  FoldPlan plan;
  plan.k = k;
  plan.day_ids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_days));
  plan.assignment.resize(n_days);
  for (std::size_t i = 0; i < n_days; ++i) plan.assignment[i] = static_cast<int>(i % static_cast<std::size_t>(k));
  return plan;
}

FoldPlan sample_cv_days(const Dataset& data, std::size_t n_days, int k, std::uint64_t seed) {
  const auto days = data.days();
  return sample_cv_days(days, n_days, k, seed);
}

std::vector<FoldRows> fold_rows(const FeatureMatrix& m, const FoldPlan& plan, bool daylight_only) {
  std::map<Date, int> fold_by_day;
  for (std::size_t i = 0; i < plan.day_ids.size(); ++i) fold_by_day[plan.day_ids[i]] = plan.assignment[i];
  std::vector<FoldRows> out(static_cast<std::size_t>(plan.k));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (!m.target[r] || (daylight_only && !m.daylight[r])) continue;
    const auto it = fold_by_day.find(m.timestamps[r].day());
    if (it == fold_by_day.end()) continue;
    for (int f = 0; f < plan.k; ++f) {
      (f == it->second ? out[f].test : out[f].train).push_back(r);
    }
  }
  return out;
}

}  // namespace helio
