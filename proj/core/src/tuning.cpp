#include "helio/tuning.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "helio/error.hpp"
#include "helio/parallel.hpp"
#include "helio/seeding.hpp"
#include "helio/text.hpp"

namespace helio {

std::vector<double> ExponentRange::exponents() const {
  if (!(step > 0.0) || !(start <= stop) || !std::isfinite(start) || !std::isfinite(stop)) {
    raise(ErrorCode::EmptyGrid, "exponent range " + format_double(start) + ".." + format_double(stop) + " step " +
                                    format_double(step) + " is empty");
  }
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double e = start + static_cast<double>(k) * step;
    if (e > stop + 1e-9 * step) break;
    out.push_back(e);
  }
  return out;
}

GridSpec GridSpec::from_config(const KvConfig& cfg) {
  GridSpec g;
  g.c.start = cfg.get_double("c_exp_start", g.c.start);
  g.c.stop = cfg.get_double("c_exp_stop", g.c.stop);
  g.c.step = cfg.get_double("c_exp_step", g.c.step);
  g.gamma.start = cfg.get_double("gamma_exp_start", g.gamma.start);
  g.gamma.stop = cfg.get_double("gamma_exp_stop", g.gamma.stop);
  g.gamma.step = cfg.get_double("gamma_exp_step", g.gamma.step);
  g.refine = cfg.get_bool("refine", g.refine);
  return g;
}

KvConfig GridSpec::to_config() const {
  KvConfig cfg;
  cfg.set("c_exp_start", format_double(c.start));
  cfg.set("c_exp_stop", format_double(c.stop));
  cfg.set("c_exp_step", format_double(c.step));
  cfg.set("gamma_exp_start", format_double(gamma.start));
  cfg.set("gamma_exp_stop", format_double(gamma.stop));
  cfg.set("gamma_exp_step", format_double(gamma.step));
  cfg.set("refine", refine ? "true" : "false");
  return cfg;
}

std::vector<Candidate> make_grid(const GridSpec& spec) {
  const auto ce = spec.c.exponents();
  const auto ge = spec.gamma.exponents();
  std::vector<Candidate> out;
  out.reserve(ce.size() * ge.size());
  for (double a : ce) {
    for (double b : ge) out.push_back({std::exp2(a), std::exp2(b)});
  }
  return out;
}

std::vector<Candidate> refinement_grid(const Candidate& center) {
  auto axis = [](double v) {
    const double e = std::log2(v);
    const double lo = std::exp2(e - 1.0);
    const double hi = std::exp2(e + 1.0);
    std::vector<double> out(5);
    for (int k = 0; k < 5; ++k) out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / 4.0;
    return out;
  };
  std::vector<Candidate> out;
  for (double c : axis(center.c)) {
    for (double g : axis(center.gamma)) out.push_back({c, g});
  }
  return out;
}

double cv_rmse(const FeatureMatrix& m, const Candidate& candidate, const FoldPlan& plan, const TrainConfig& cfg,
               const SearchOptions& options) {
  TrainConfig train_cfg = cfg;
  train_cfg.c = candidate.c;
  KernelSpec kernel = options.kernel;
  kernel.gamma = candidate.gamma;

  double sse = 0.0;
  std::size_t count = 0;
  for (const auto& fold : fold_rows(m, plan, options.daylight_only)) {
    if (fold.train.empty() || fold.test.empty()) continue;
    const Matrix xtr_raw = m.values.select_rows(fold.train);
    const auto stats = fit_scaling(xtr_raw, m.columns);
    const Matrix xtr = apply_scaling(stats, xtr_raw);
    const Matrix xte = apply_scaling(stats, m.values.select_rows(fold.test));
    std::vector<double> ytr;
    ytr.reserve(fold.train.size());
    for (auto r : fold.train) ytr.push_back(*m.target[r]);
    const auto model = train(xtr, ytr, train_cfg, kernel);
    const auto pred = predict(model, xte);
    for (std::size_t i = 0; i < fold.test.size(); ++i) {
      const double e = *m.target[fold.test[i]] - pred[i];
      sse += e * e;
    }
    count += fold.test.size();
  }
  if (count == 0) raise(ErrorCode::EmptyMatrix, "cross-validation plan selects no usable rows");
  return std::sqrt(sse / static_cast<double>(count));
}

namespace {

std::vector<SurfacePoint> evaluate(const FeatureMatrix& m, std::span<const Candidate> grid, const FoldPlan& plan,
                                   const TrainConfig& cfg, const SearchOptions& options) {
  std::vector<SurfacePoint> out(grid.size());
  parallel_for(grid.size(), options.jobs, [&](std::size_t i) {
    double score = std::numeric_limits<double>::infinity();
    try {
      score = cv_rmse(m, grid[i], plan, cfg, options);
    } catch (const Error&) {
      // A candidate that cannot be trained stays at +inf.
    }
    if (std::isnan(score)) score = std::numeric_limits<double>::infinity();
    out[i] = {grid[i].c, grid[i].gamma, score};
  });
  return out;
}

bool better(const SurfacePoint& a, const SurfacePoint& b) {
  if (a.cv_rmse != b.cv_rmse) return a.cv_rmse < b.cv_rmse;
  if (a.c != b.c) return a.c < b.c;
  return a.gamma < b.gamma;
}

const SurfacePoint& best_of(const std::vector<SurfacePoint>& surface) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < surface.size(); ++i) {
    if (better(surface[i], surface[best])) best = i;
  }
  return surface[best];
}

}  // namespace

TuneResult grid_search(const FeatureMatrix& m, std::span<const Candidate> grid, const FoldPlan& plan,
                       const TrainConfig& cfg, const SearchOptions& options) {
  if (grid.empty()) raise(ErrorCode::EmptyGrid, "no candidates to search");
  cfg.validate();
  TuneResult result;
  result.surface = evaluate(m, grid, plan, cfg, options);
  if (options.refine) {
    const auto& coarse = best_of(result.surface);
    const auto fine = refinement_grid({coarse.c, coarse.gamma});
    const auto extra = evaluate(m, fine, plan, cfg, options);
    result.surface.insert(result.surface.end(), extra.begin(), extra.end());
  }
  const auto& best = best_of(result.surface);
  result.best = {best.c, best.gamma};
  result.best_cv_rmse = best.cv_rmse;
  return result;
}

std::vector<MonthTuning> adaptive_schedule(const Dataset& data, std::span<const Month> months, const FeatureSpec& spec,
                                           std::span<const Candidate> grid, const TrainConfig& cfg, std::uint64_t seed,
                                           const AdaptiveOptions& options) {
  std::vector<MonthTuning> out;
  if (data.empty()) raise(ErrorCode::NoData, "empty dataset");
  const auto full = assemble(data, spec);
  for (const auto& month : months) {
    MonthTuning entry{month, std::nullopt, {}};
    const Date start = first_day(month);
    std::vector<Date> history;
    for (const auto& d : data.days()) {
      if (d < start) history.push_back(d);
    }
    if (history.size() < options.cv_days) {
      entry.skipped = "TooFewDays: " + std::to_string(history.size()) + " days of history before " + format_month(month);
      out.push_back(std::move(entry));
      continue;
    }
    const auto month_seed = derive_seed(seed, "adaptive", static_cast<std::int64_t>(start.time_since_epoch().count()));
    const auto plan = sample_cv_days(history, options.cv_days, options.folds, month_seed);
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < full.rows(); ++r) {
      if (full.timestamps[r].day() < start) rows.push_back(r);
    }
    auto result = grid_search(full.select_rows(rows), grid, plan, cfg, options.search);
    result.mode = TuneMode::adaptive;
    result.month = month;
    result.seed = month_seed;
    entry.result = std::move(result);
    out.push_back(std::move(entry));
  }
  return out;
}

void write_surface_csv(std::ostream& out, const TuneResult& result) {
  out << "c,gamma,cv_rmse\n";
  for (const auto& p : result.surface) {
    out << format_double(p.c) << ',' << format_double(p.gamma) << ',' << format_double(p.cv_rmse) << '\n';
  }
}

KvConfig tune_result_config(const TuneResult& result) {
  KvConfig cfg;
  cfg.set("mode", result.mode == TuneMode::fixed ? "fixed" : "adaptive");
  if (result.month) cfg.set("month", format_month(*result.month));
  cfg.set("seed", std::to_string(result.seed));
  cfg.set("best_c", format_double(result.best.c));
  cfg.set("best_gamma", format_double(result.best.gamma));
  cfg.set("best_cv_rmse", format_double(result.best_cv_rmse));
  cfg.set("surface_size", std::to_string(result.surface.size()));
  return cfg;
}

}  // namespace helio
