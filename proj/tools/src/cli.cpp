#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "helio/error.hpp"
#include "helio/features.hpp"
#include "helio/folds.hpp"
#include "helio/ingest.hpp"
#include "helio/kvconfig.hpp"
#include "helio/pipeline.hpp"
#include "helio/seeding.hpp"
#include "helio/selection.hpp"
#include "helio/svr.hpp"
#include "helio/synth.hpp"
#include "helio/text.hpp"
#include "helio/tuning.hpp"

namespace helio::cli {

namespace {

namespace fs = std::filesystem;

// Every key a config file may carry, across all subcommands.
const std::set<std::string, std::less<>>& known_keys() {
  static const std::set<std::string, std::less<>> keys{
      "seed", "jobs", "out", "data", "mapping", "capacity", "zone", "verbose",
      // synth
      "days", "start", "latitude", "cloud_persistence", "noise_sd", "nwp_error_sd", "season_flip_wind", "clear_sky",
      // features
      "base_columns", "quadratic_columns", "include_heat_index", "include_wind_polar", "hour_cyclic", "hi_floor",
      "daylight_threshold",
      // select
      "cv_days", "folds", "direction", "max_steps", "periods",
      // svr
      "kernel", "c", "gamma", "epsilon", "tol", "max_iter", "cache_mb", "selection", "degree", "coef0", "fixed_params",
      // grid
      "c_exp_start", "c_exp_stop", "c_exp_step", "gamma_exp_start", "gamma_exp_stop", "gamma_exp_step", "refine",
      "adaptive", "months", "schedule",
      // forecast / compare / evaluate
      "model", "models", "first", "last", "min_history_days", "hidden_units", "epochs", "learning_rate", "momentum",
      "forecast", "baseline", "all_hours"};
  return keys;
}

constexpr double kDefaultC = 16.0;
constexpr double kDefaultGamma = 1.0;

/// Collects flag values so they can be merged over a config file.
class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {}

  CLI::Option* value(const std::string& flag, const std::string& key, const std::string& help) {
    auto* opt = app_->add_option(flag, values_[key], help);
    options_.emplace_back(key, opt);
    return opt;
  }

  CLI::Option* toggle(const std::string& flag, std::vector<std::pair<std::string, std::string>> sets,
                      const std::string& help) {
    auto* opt = app_->add_flag(flag, help);
    toggles_.emplace_back(std::move(sets), opt);
    return opt;
  }

  void common(bool with_data) {
    value("--config", "config", "key=value configuration file; flags override its entries");
    value("--seed", "seed", "master random seed (default 1)");
    value("--jobs", "jobs", "worker threads (default 1); results do not depend on it");
    value("--out", "out", "output directory (default .)");
    if (with_data) {
      value("--data", "data", "input CSV in the canonical or mapped layout");
      value("--mapping", "mapping", "column mapping file for non-canonical CSV headers");
      value("--capacity", "capacity", "nominal plant capacity used to normalize power (default 1)");
      value("--zone", "zone", "zone identifier");
    }
  }

  void svr() {
    value("--kernel", "kernel", "rbf, polynomial or linear (default rbf)");
    value("--c", "c", "penalty C (default 16)");
    value("--gamma", "gamma", "kernel gamma (default 1)");
    value("--epsilon", "epsilon", "tube half-width in normalized power (default 0.01)");
    value("--tol", "tol", "KKT stopping tolerance (default 0.001)");
    value("--max-iter", "max_iter", "solver iteration cap");
    value("--cache-mb", "cache_mb", "kernel row cache budget in MB (default 64)");
    value("--selection", "selection", "working-set selection: first_order or second_order");
    value("--degree", "degree", "polynomial degree (default 3)");
    value("--coef0", "coef0", "polynomial offset (default 0)");
  }

  void features() {
    value("--base-columns", "base_columns", "comma-separated base feature columns");
    value("--quadratic-columns", "quadratic_columns", "comma-separated columns to square");
    auto* with = toggle("--with-hi-wind", {{"include_heat_index", "true"}, {"include_wind_polar", "true"}},
                        "add heat index and wind speed/direction features");
    auto* without = toggle("--no-hi-wind", {{"include_heat_index", "false"}, {"include_wind_polar", "false"}},
                           "drop heat index and wind speed/direction features");
    with->excludes(without);
    toggle("--hour-cyclic", {{"hour_cyclic", "true"}}, "encode hour as sine/cosine pair");
    value("--daylight-threshold", "daylight_threshold", "hourly SSRD above which an hour counts as daylight");
  }

  void grid() {
    value("--c-exp", "c_exp_range", "C exponent range START:STOP:STEP (default -5:15:2)");
    value("--gamma-exp", "gamma_exp_range", "gamma exponent range START:STOP:STEP (default -15:3:2)");
    toggle("--refine", {{"refine", "true"}}, "add a 5x5 linear refinement grid around the coarse optimum");
    value("--cv-days", "cv_days", "days sampled for cross-validation (default 30)");
    value("--folds", "folds", "cross-validation folds (default 5)");
  }

  void range() {
    value("--first", "first", "first forecast day YYYY-MM-DD (default: after the warm-up)");
    value("--last", "last", "last forecast day YYYY-MM-DD (default: last day of data)");
    value("--min-history-days", "min_history_days", "days of history required before the first forecast (default 30)");
  }

  void mlp() {
    value("--hidden-units", "hidden_units", "MLP hidden units (default 20)");
    value("--epochs", "epochs", "MLP full-batch epochs (default 2000)");
    value("--learning-rate", "learning_rate", "MLP learning rate (default 0.01)");
    value("--momentum", "momentum", "MLP momentum (default 0.9)");
  }

  /// Config file first, flags on top.
  KvConfig merged() const {
    KvConfig cfg;
    if (auto it = values_.find("config"); it != values_.end() && !it->second.empty()) cfg = KvConfig::load(it->second);
    for (const auto& [key, opt] : options_) {
      if (key == "config" || opt->count() == 0) continue;
      const std::string& v = values_.at(key);
      if (key == "c_exp_range" || key == "gamma_exp_range") {
        const auto parts = split_list(v, ':');
        if (parts.size() != 3) raise(ErrorCode::BadConfig, "exponent range must be START:STOP:STEP");
        const std::string prefix = key == "c_exp_range" ? "c_exp_" : "gamma_exp_";
        cfg.set(prefix + "start", parts[0]);
        cfg.set(prefix + "stop", parts[1]);
        cfg.set(prefix + "step", parts[2]);
        continue;
      }
      cfg.set(key, v);
    }
    for (const auto& [sets, opt] : toggles_) {
      if (opt->count() == 0) continue;
      for (const auto& [k, v] : sets) cfg.set(k, v);
    }
    for (const auto& [key, value] : cfg.entries()) {
      if (!known_keys().contains(key)) raise(ErrorCode::BadConfig, "unknown configuration key '" + key + "'");
    }
    return cfg;
  }

 private:
  CLI::App* app_;
  std::map<std::string, std::string> values_;
  std::vector<std::pair<std::string, CLI::Option*>> options_;
  std::vector<std::pair<std::vector<std::pair<std::string, std::string>>, CLI::Option*>> toggles_;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string stage;
  fs::path dir;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool verbose = false;
};

std::uint64_t seed_of(const KvConfig& cfg) {
  const auto v = cfg.get_int("seed", 1);
  if (v < 0) raise(ErrorCode::BadConfig, "seed must be non-negative");
  return static_cast<std::uint64_t>(v);
}

Context make_context(const KvConfig& cfg, std::ostream& out, std::ostream& err, const std::string& name) {
  Context ctx{out, err, name, fs::path(cfg.get("out").value_or(".")), seed_of(cfg),
              static_cast<int>(cfg.get_int("jobs", 1)), cfg.get_bool("verbose", false)};
  if (ctx.jobs < 1) raise(ErrorCode::BadConfig, "jobs must be at least 1");
  std::error_code ec;
  fs::create_directories(ctx.dir, ec);
  if (ec) raise(ErrorCode::BadConfig, "cannot create output directory " + ctx.dir.string());
  return ctx;
}

std::ofstream open_out(const Context& ctx, const std::string& name) {
  std::ofstream f(ctx.dir / name, std::ios::binary);
  if (!f) raise(ErrorCode::BadConfig, "cannot write " + (ctx.dir / name).string());
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(ErrorCode::NoData, "cannot read " + path);
  return f;
}

Dataset load_data(const KvConfig& cfg, Context& ctx) {
  const auto caller = ctx.stage;
  ctx.stage = "ingest";
  const auto path = cfg.get("data");
  if (!path) raise(ErrorCode::BadConfig, "--data is required");
  ParseOptions options;
  if (auto m = cfg.get("mapping")) options.mapping = ColumnMapping::from_config(KvConfig::load(*m));
  options.capacity = cfg.get_double("capacity", 1.0);
  options.zone_id = cfg.get("zone").value_or("1");
  auto in = open_in(*path);
  auto data = parse_csv(in, options);
  ctx.err << "helio: loaded " << data.day_count() << " days from " << *path << '\n';
  ctx.stage = caller;
  return data;
}

FeatureSpec feature_spec(const KvConfig& cfg) { return FeatureSpec::from_config(cfg); }

WorkingSetSelection parse_selection(std::string_view text) {
  if (text == "first_order") return WorkingSetSelection::first_order;
  if (text == "second_order") return WorkingSetSelection::second_order;
  raise(ErrorCode::BadConfig, "selection must be first_order or second_order");
}

TrainConfig train_config(const KvConfig& cfg) {
  TrainConfig t;
  t.c = cfg.get_double("c", kDefaultC);
  t.epsilon = cfg.get_double("epsilon", t.epsilon);
  t.tol = cfg.get_double("tol", t.tol);
  t.max_iter = cfg.get_int("max_iter", t.max_iter);
  t.cache_mb = cfg.get_double("cache_mb", t.cache_mb);
  if (auto s = cfg.get("selection")) t.selection = parse_selection(*s);
  t.validate();
  return t;
}

KernelSpec kernel_spec(const KvConfig& cfg) {
  KernelSpec k;
  if (auto v = cfg.get("kernel")) k.kind = parse_kernel_kind(*v);
  k.gamma = cfg.get_double("gamma", kDefaultGamma);
  k.degree = static_cast<int>(cfg.get_int("degree", k.degree));
  k.coef0 = cfg.get_double("coef0", k.coef0);
  k.validate();
  return k;
}

MlpConfig mlp_config(const KvConfig& cfg, const Context& ctx) {
  MlpConfig m;
  m.hidden_units = static_cast<int>(cfg.get_int("hidden_units", m.hidden_units));
  m.epochs = static_cast<int>(cfg.get_int("epochs", m.epochs));
  m.learning_rate = cfg.get_double("learning_rate", m.learning_rate);
  m.momentum = cfg.get_double("momentum", m.momentum);
  m.seed = derive_seed(ctx.seed, "mlp");
  if (m.hidden_units < 1 || m.epochs < 0) raise(ErrorCode::BadConfig, "hidden_units must be >= 1 and epochs >= 0");
  return m;
}

void apply_fixed_params(KvConfig& cfg) {
  auto v = cfg.get("fixed_params");
  if (!v) return;
  const auto parts = split_list(*v);
  if (parts.size() != 2) raise(ErrorCode::BadConfig, "--fixed-params expects C,GAMMA");
  parse_double(parts[0]);
  parse_double(parts[1]);
  cfg.set("c", parts[0]);
  cfg.set("gamma", parts[1]);
}

DayRange day_range(const KvConfig& cfg, const Dataset& data, std::size_t min_history) {
  DayRange r{data.first_day() + std::chrono::days(static_cast<int>(min_history)), data.last_day()};
  if (auto v = cfg.get("first")) r.first = parse_date(*v);
  if (auto v = cfg.get("last")) r.last = parse_date(*v);
  return r;
}

RollingOptions rolling_options(const KvConfig& cfg, const Context& ctx) {
  RollingOptions o;
  const auto h = cfg.get_int("min_history_days", static_cast<long long>(o.min_history_days));
  if (h < 0) raise(ErrorCode::BadConfig, "min_history_days must be non-negative");
  o.min_history_days = static_cast<std::size_t>(h);
  o.jobs = ctx.jobs;
  return o;
}

std::size_t cv_days_of(const KvConfig& cfg) {
  const auto v = cfg.get_int("cv_days", 30);
  if (v < 1) raise(ErrorCode::BadConfig, "cv_days must be positive");
  return static_cast<std::size_t>(v);
}

int folds_of(const KvConfig& cfg) {
  const auto v = cfg.get_int("folds", 5);
  if (v < 2) raise(ErrorCode::BadConfig, "folds must be at least 2");
  return static_cast<int>(v);
}

std::vector<Month> months_between(Date first, Date last) {
  std::vector<Month> out;
  for (Month m = month_of(first); m <= month_of(last); m += std::chrono::months(1)) out.push_back(m);
  return out;
}

void write_schedule_csv(std::ostream& out, const std::vector<MonthTuning>& schedule) {
  out << "month,c,gamma,cv_rmse\n";
  for (const auto& m : schedule) {
    if (!m.result) continue;
    out << format_month(m.month) << ',' << format_double(m.result->best.c) << ','
        << format_double(m.result->best.gamma) << ',' << format_double(m.result->best_cv_rmse) << '\n';
  }
}

std::map<Month, Candidate> read_schedule_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"month", "c", "gamma", "cv_rmse"}) {
    raise(ErrorCode::MissingColumn, "schedule header must be month,c,gamma,cv_rmse");
  }
  std::map<Month, Candidate> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) raise(ErrorCode::InvalidRecord, "schedule rows need 4 fields");
    out[parse_month(f[0])] = {parse_double(f[1]), parse_double(f[2])};
  }
  return out;
}

std::vector<MonthTuning> tune_months(const Dataset& data, std::span<const Month> months, const KvConfig& cfg,
                                     Context& ctx) {
  const auto spec = feature_spec(cfg);
  const auto grid_spec = GridSpec::from_config(cfg);
  const auto grid = make_grid(grid_spec);
  AdaptiveOptions options;
  options.cv_days = cv_days_of(cfg);
  options.folds = folds_of(cfg);
  options.search.refine = grid_spec.refine;
  options.search.jobs = ctx.jobs;
  options.search.kernel = kernel_spec(cfg);
  const auto train = train_config(cfg);
  ctx.stage = "tune";
  auto schedule = adaptive_schedule(data, months, spec, grid, train, derive_seed(ctx.seed, "tune"), options);
  for (const auto& m : schedule) {
    if (!m.result) ctx.err << "helio tune: skipped " << format_month(m.month) << " (" << m.skipped << ")\n";
  }
  return schedule;
}

// ---- subcommands ----

int cmd_synth(KvConfig& cfg, Context& ctx) {
  ctx.stage = "synth";
  const auto sc = SynthConfig::from_config(cfg);
  const auto data = generate(sc);
  auto f = open_out(ctx, "data.csv");
  write_csv(f, data);
  ctx.err << "helio synth: wrote " << data.day_count() << " days\n";
  return kExitOk;
}

int cmd_ingest(KvConfig& cfg, Context& ctx) {
  const auto data = load_data(cfg, ctx);
  auto f = open_out(ctx, "data.csv");
  write_csv(f, data);
  ctx.err << "helio ingest: " << data.stats().clamped_negative << " negative and " << data.stats().clamped_over_capacity
          << " over-capacity power readings clamped\n";
  return kExitOk;
}

int cmd_features(KvConfig& cfg, Context& ctx) {
  const auto data = load_data(cfg, ctx);
  ctx.stage = "features";
  const auto m = assemble(data, feature_spec(cfg));
  auto f = open_out(ctx, "features.csv");
  write_csv(f, m);
  return kExitOk;
}

std::vector<Period> periods_of(const KvConfig& cfg, const Dataset& data) {
  std::vector<Period> out;
  if (auto v = cfg.get("periods")) {
    for (const auto& item : split_list(*v)) {
      const auto parts = split_list(item, ':');
      if (parts.size() != 3) raise(ErrorCode::BadConfig, "periods entries must be LABEL:FIRST:LAST");
      out.push_back({parts[0], parse_date(parts[1]), parse_date(parts[2])});
    }
    return out;
  }
  for (const auto& m : months_between(data.first_day(), data.last_day())) {
    out.push_back({format_month(m), std::max(first_day(m), data.first_day()), std::min(last_day(m), data.last_day())});
  }
  return out;
}

int cmd_select(KvConfig& cfg, Context& ctx) {
  const auto data = load_data(cfg, ctx);
  const auto spec = feature_spec(cfg);
  ctx.stage = "select";
  const auto m = assemble(data, spec);
  {
    auto f = open_out(ctx, "ranking.csv");
    write_ranking_csv(f, rank_correlations(m));
  }
  {
    std::vector<Period> periods;
    for (const auto& p : periods_of(cfg, data)) {
      const auto days = (p.last - p.first).count() + 1;
      if (days >= 1) periods.push_back(p);
    }
    auto f = open_out(ctx, "report.csv");
    write_report_csv(f, correlation_report(data, spec, periods));
  }
  const std::string direction = cfg.get("direction").value_or("both");
  if (direction != "forward" && direction != "backward" && direction != "both") {
    raise(ErrorCode::BadConfig, "direction must be forward, backward or both");
  }
  const auto plan = sample_cv_days(data, cv_days_of(cfg), folds_of(cfg), derive_seed(ctx.seed, "select"));
  const int max_steps = static_cast<int>(cfg.get_int("max_steps", static_cast<long long>(m.cols())));
  GreedyOptions options;
  options.jobs = ctx.jobs;
  KvConfig summary;
  for (auto dir : {Direction::forward, Direction::backward}) {
    const std::string name = dir == Direction::forward ? "forward" : "backward";
    if (direction != "both" && direction != name) continue;
    const auto result = greedy_select(m, dir, plan, max_steps, options);
    auto f = open_out(ctx, "trace_" + name + ".csv");
    write_trace_csv(f, result);
    summary.set(name + "_columns", join(result.chosen, ","));
    summary.set(name + "_cv_rmse", format_double(result.cv_rmse));
  }
  auto f = open_out(ctx, "selected.txt");
  summary.write(f);
  return kExitOk;
}

int cmd_tune(KvConfig& cfg, Context& ctx) {
  const auto data = load_data(cfg, ctx);
  if (cfg.get_bool("adaptive", false)) {
    std::vector<Month> months;
    if (auto v = cfg.get("months")) {
      for (const auto& s : split_list(*v)) months.push_back(parse_month(s));
    } else {
      months = months_between(data.first_day(), data.last_day());
    }
    const auto schedule = tune_months(data, months, cfg, ctx);
    for (const auto& m : schedule) {
      if (!m.result) continue;
      auto f = open_out(ctx, "surface_" + format_month(m.month) + ".csv");
      write_surface_csv(f, *m.result);
    }
    auto f = open_out(ctx, "schedule.csv");
    write_schedule_csv(f, schedule);
    return kExitOk;
  }
  const auto spec = feature_spec(cfg);
  const auto grid_spec = GridSpec::from_config(cfg);
  const auto grid = make_grid(grid_spec);
  SearchOptions options;
  options.refine = grid_spec.refine;
  options.jobs = ctx.jobs;
  options.kernel = kernel_spec(cfg);
  const auto train = train_config(cfg);
  const auto seed = derive_seed(ctx.seed, "tune");
  const auto plan = sample_cv_days(data, cv_days_of(cfg), folds_of(cfg), seed);
  ctx.stage = "tune";
  ctx.err << "helio tune: " << grid.size() << " candidates\n";
  auto result = grid_search(assemble(data, spec), grid, plan, train, options);
  result.seed = seed;
  {
    auto f = open_out(ctx, "surface.csv");
    write_surface_csv(f, result);
  }
  auto f = open_out(ctx, "best.txt");
  tune_result_config(result).write(f);
  return kExitOk;
}

ModelParams model_params(const KvConfig& cfg, const Context& ctx) {
  ModelParams p;
  p.svr = train_config(cfg);
  p.kernel = kernel_spec(cfg);
  p.mlp = mlp_config(cfg, ctx);
  return p;
}

void report_failures(const Context& ctx, const ForecastSeries& series, const std::string& name) {
  auto f = open_out(ctx, name);
  f << "date,message\n";
  for (const auto& fail : series.failures) {
    std::string msg = fail.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    f << format_date(fail.day) << ',' << msg << '\n';
    ctx.err << "helio forecast: " << format_date(fail.day) << " skipped: " << fail.message << '\n';
  }
}

int cmd_forecast(KvConfig& cfg, Context& ctx) {
  apply_fixed_params(cfg);
  const auto data = load_data(cfg, ctx);
  const auto spec = feature_spec(cfg);
  const auto kind = parse_model_kind(cfg.get("model").value_or("svr"));
  auto params = model_params(cfg, ctx);
  const auto options = rolling_options(cfg, ctx);
  const auto range = day_range(cfg, data, options.min_history_days);
  if (cfg.get_bool("adaptive", false)) {
    if (kind != ModelKind::svr) raise(ErrorCode::BadConfig, "--adaptive applies to the svr model only");
    if (auto path = cfg.get("schedule")) {
      auto in = open_in(*path);
      params.monthly = read_schedule_csv(in);
    } else {
      const auto months = months_between(range.first, range.last);
      const auto schedule = tune_months(data, months, cfg, ctx);
      for (const auto& m : schedule) {
        if (m.result) params.monthly[m.month] = m.result->best;
      }
      auto f = open_out(ctx, "schedule.csv");
      write_schedule_csv(f, schedule);
    }
    for (const auto& m : months_between(range.first, range.last)) {
      if (!params.monthly.contains(m)) {
        ctx.err << "helio forecast: no tuned parameters for " << format_month(m) << ", using C="
                << format_double(params.svr.c) << " gamma=" << format_double(params.kernel.gamma) << '\n';
      }
    }
  }
  ctx.stage = "forecast";
  const auto series = rolling_forecast(data, kind, params, spec, range, options);
  {
    auto f = open_out(ctx, "forecast.csv");
    write_forecast_csv(f, series);
  }
  report_failures(ctx, series, "failures.csv");
  ctx.err << "helio forecast: " << series.entries.size() / 24 << " days forecast, " << series.failures.size()
          << " skipped\n";
  return kExitOk;
}

int cmd_evaluate(KvConfig& cfg, Context& ctx) {
  ctx.stage = "evaluate";
  const auto path = cfg.get("forecast");
  if (!path) raise(ErrorCode::BadConfig, "--forecast is required");
  auto in = open_in(*path);
  const auto series = read_forecast_csv(in);
  ReportOptions options;
  options.all_hours = cfg.get_bool("all_hours", false);
  const auto report = monthly_report(series, options);
  for (const auto& w : report.warnings) ctx.err << "helio evaluate: " << w << '\n';
  {
    auto f = open_out(ctx, "monthly.csv");
    write_monthly_csv(f, report.monthly);
  }
  {
    auto f = open_out(ctx, "daily.csv");
    write_daily_csv(f, report.daily);
  }
  if (ctx.verbose) {
    ReportOptions other = options;
    other.all_hours = !options.all_hours;
    const auto alt = monthly_report(series, other);
    auto f = open_out(ctx, other.all_hours ? "monthly_all_hours.csv" : "monthly_daylight.csv");
    write_monthly_csv(f, alt.monthly);
  }
  if (auto base_path = cfg.get("baseline")) {
    auto bin = open_in(*base_path);
    const auto base = monthly_report(read_forecast_csv(bin), options);
    auto f = open_out(ctx, "improvement.csv");
    write_improvement_csv(f, improvement_table(base.monthly, report.monthly));
  }
  return kExitOk;
}

int cmd_compare(KvConfig& cfg, Context& ctx) {
  apply_fixed_params(cfg);
  const auto data = load_data(cfg, ctx);
  const auto spec = feature_spec(cfg);
  const auto params = model_params(cfg, ctx);
  const auto options = rolling_options(cfg, ctx);
  const auto range = day_range(cfg, data, options.min_history_days);
  std::vector<ModelRun> runs;
  for (const auto& name : split_list(cfg.get("models").value_or("svr,mlr"))) {
    runs.push_back({name, parse_model_kind(name), params, spec});
  }
  ReportOptions report;
  report.all_hours = cfg.get_bool("all_hours", false);
  ctx.stage = "compare";
  const auto cmp = compare_models(data, runs, range, options, report);
  for (std::size_t i = 0; i < cmp.models.size(); ++i) {
    auto f = open_out(ctx, "forecast_" + cmp.models[i] + ".csv");
    write_forecast_csv(f, cmp.series[i]);
  }
  {
    auto f = open_out(ctx, "compare_monthly.csv");
    write_comparison_csv(f, cmp);
  }
  auto f = open_out(ctx, "compare_daily.csv");
  write_comparison_daily_csv(f, cmp);
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Usage: return kExitUsage;
    case ErrorCategory::Numerical: return kExitNumerical;
    case ErrorCategory::Data: return kExitData;
  }
  return kExitData;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"helio: day-ahead solar power forecasting with support vector regression"};
  app.name("helio");
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    std::unique_ptr<Flags> flags;
    int (*handler)(KvConfig&, Context&);
  };
  std::vector<Command> commands;
  auto add = [&](const char* name, const char* help, int (*handler)(KvConfig&, Context&)) -> Flags& {
    auto* sub = app.add_subcommand(name, help);
    commands.push_back({sub, std::make_unique<Flags>(sub), handler});
    return *commands.back().flags;
  };

  {
    auto& f = add("synth", "generate a synthetic weather and power dataset", cmd_synth);
    f.common(false);
    f.value("--days", "days", "number of days (default 395)");
    f.value("--start", "start", "first day YYYY-MM-DD (default 2013-05-02)");
    f.value("--latitude", "latitude", "site latitude in degrees (default -33.9)");
    f.value("--cloud-persistence", "cloud_persistence", "hourly AR(1) coefficient of cloud cover in [0,1)");
    f.value("--noise-sd", "noise_sd", "power noise standard deviation (default 0.02)");
    f.value("--nwp-error-sd", "nwp_error_sd", "forecast error standard deviation (default 0.05)");
    f.toggle("--clear-sky", {{"clear_sky", "true"}}, "no clouds at all");
    f.toggle("--no-season-flip", {{"season_flip_wind", "false"}}, "keep the wind-power relation the same all year");
  }
  {
    auto& f = add("ingest", "validate a CSV and write it in canonical form", cmd_ingest);
    f.common(true);
  }
  {
    auto& f = add("features", "write the assembled feature matrix", cmd_features);
    f.common(true);
    f.features();
  }
  {
    auto& f = add("select", "correlation ranking and greedy feature selection", cmd_select);
    f.common(true);
    f.features();
    f.value("--direction", "direction", "forward, backward or both (default both)");
    f.value("--max-steps", "max_steps", "maximum greedy steps");
    f.value("--cv-days", "cv_days", "days sampled for cross-validation (default 30)");
    f.value("--folds", "folds", "cross-validation folds (default 5)");
    f.value("--periods", "periods", "correlation periods LABEL:FIRST:LAST,... (default: calendar months)");
  }
  {
    auto& f = add("tune", "grid search of C and gamma by cross-validation", cmd_tune);
    f.common(true);
    f.features();
    f.svr();
    f.grid();
    f.toggle("--adaptive", {{"adaptive", "true"}}, "tune each month on the history before it");
    f.value("--months", "months", "months to tune in adaptive mode, YYYY-MM,... (default: all)");
  }
  {
    auto& f = add("forecast", "rolling day-ahead forecast over a range of days", cmd_forecast);
    f.common(true);
    f.features();
    f.svr();
    f.grid();
    f.range();
    f.mlp();
    f.value("--model", "model", "svr, mlr or mlp (default svr)");
    f.value("--fixed-params", "fixed_params", "C,GAMMA for the svr model");
    f.toggle("--adaptive", {{"adaptive", "true"}}, "use per-month tuned C and gamma");
    f.value("--schedule", "schedule", "schedule.csv from tune --adaptive (default: tune now)");
  }
  {
    auto& f = add("evaluate", "monthly and daily RMSE of a forecast", cmd_evaluate);
    f.common(false);
    f.value("--forecast", "forecast", "forecast.csv to score");
    f.value("--baseline", "baseline", "second forecast.csv; writes the improvement table against it");
    f.toggle("--all-hours", {{"all_hours", "true"}}, "include night hours in RMSE");
    f.toggle("--verbose", {{"verbose", "true"}}, "also write the report for the other hour convention");
  }
  {
    auto& f = add("compare", "run several models on the same data and range", cmd_compare);
    f.common(true);
    f.features();
    f.svr();
    f.range();
    f.mlp();
    f.value("--models", "models", "comma-separated models (default svr,mlr)");
    f.value("--fixed-params", "fixed_params", "C,GAMMA for the svr model");
    f.toggle("--all-hours", {{"all_hours", "true"}}, "include night hours in RMSE");
  }

  std::vector<std::string> argv_store{"helio"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "helio: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  for (auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    std::string stage = cmd.app->get_name();
    try {
      auto cfg = cmd.flags->merged();
      auto ctx = make_context(cfg, out, err, stage);
      try {
        return cmd.handler(cfg, ctx);
      } catch (...) {
        stage = ctx.stage;
        throw;
      }
    } catch (const Error& e) {
      err << "helio " << stage << ": " << e.what() << '\n';
      return exit_code_for(e);
    } catch (const std::exception& e) {
      err << "helio " << stage << ": " << e.what() << '\n';
      return kExitData;
    }
  }
  return kExitUsage;
}

}  // namespace helio::cli
