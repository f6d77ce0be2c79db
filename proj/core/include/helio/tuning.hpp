#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helio/features.hpp"
#include "helio/folds.hpp"
#include "helio/ingest.hpp"
#include "helio/kvconfig.hpp"
#include "helio/svr.hpp"

namespace helio {

/// start, start + step, ... up to and including stop (base-2 exponents).
struct ExponentRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> exponents() const;
};

struct GridSpec {
  ExponentRange c{-5.0, 15.0, 2.0};
  ExponentRange gamma{-15.0, 3.0, 2.0};
  /// Append a 5x5 linear grid spanning +/-1 exponent around the coarse optimum.
  bool refine = false;

  static GridSpec from_config(const KvConfig& cfg);
  KvConfig to_config() const;
};

struct Candidate {
  double c = 1.0;
  double gamma = 1.0;
  bool operator==(const Candidate&) const = default;
};

/// Cartesian product of powers of two, C outer and gamma inner.
std::vector<Candidate> make_grid(const GridSpec& spec);

/// 5x5 linear grid between 2^(e-1) and 2^(e+1) around `center` in both axes.
std::vector<Candidate> refinement_grid(const Candidate& center);

struct SurfacePoint {
  double c = 0.0;
  double gamma = 0.0;
  double cv_rmse = 0.0;
};

enum class TuneMode { fixed, adaptive };

struct TuneResult {
  std::vector<SurfacePoint> surface;
  Candidate best;
  double best_cv_rmse = 0.0;
  std::uint64_t seed = 0;
  TuneMode mode = TuneMode::fixed;
  std::optional<Month> month;
};

struct SearchOptions {
  bool refine = false;
  int jobs = 1;
  bool daylight_only = true;
  /// Kernel kind and polynomial settings; gamma is overridden per candidate.
  KernelSpec kernel{};
};

/// Pooled k-fold CV-RMSE of one candidate. Scaling is fit on each fold's training rows only.
double cv_rmse(const FeatureMatrix& m, const Candidate& candidate, const FoldPlan& plan, const TrainConfig& cfg,
               const SearchOptions& options = {});

/// Evaluates every candidate; failed trainings score +inf. Ties go to smaller C, then smaller gamma.
TuneResult grid_search(const FeatureMatrix& m, std::span<const Candidate> grid, const FoldPlan& plan,
                       const TrainConfig& cfg, const SearchOptions& options = {});

struct AdaptiveOptions {
  std::size_t cv_days = 30;
  int folds = 5;
  SearchOptions search{};
};

struct MonthTuning {
  Month month;
  std::optional<TuneResult> result;
  /// Why the month was skipped, when result is empty.
  std::string skipped;
};

/// One grid search per month using only days strictly before the month starts.
std::vector<MonthTuning> adaptive_schedule(const Dataset& data, std::span<const Month> months, const FeatureSpec& spec,
                                           std::span<const Candidate> grid, const TrainConfig& cfg, std::uint64_t seed,
                                           const AdaptiveOptions& options = {});

/// `c,gamma,cv_rmse`
void write_surface_csv(std::ostream& out, const TuneResult& result);
KvConfig tune_result_config(const TuneResult& result);

}  // namespace helio
