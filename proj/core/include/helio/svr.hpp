#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "helio/features.hpp"
#include "helio/matrix.hpp"

namespace helio {

enum class KernelKind { linear, polynomial, rbf };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view text);

struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  double gamma = 1.0;  // rbf and polynomial
  int degree = 3;      // polynomial
  double coef0 = 0.0;  // polynomial

  void validate() const;
  bool operator==(const KernelSpec&) const = default;
};

/// linear: a.b; polynomial: (gamma a.b + coef0)^degree; rbf: exp(-gamma |a - b|^2).
double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b);

enum class WorkingSetSelection { first_order, second_order };

struct TrainConfig {
  double c = 1.0;
  /// Half-width of the insensitive tube, in target units.
  double epsilon = 0.01;
  /// Stop once the maximal KKT violation is at most tol.
  double tol = 1e-3;
  std::int64_t max_iter = 10'000'000;
  double cache_mb = 64.0;
  WorkingSetSelection selection = WorkingSetSelection::first_order;
  /// Temporarily drop bound variables that cannot violate optimality.
  bool shrinking = true;

  void validate() const;
};

struct TrainMeta {
  std::int64_t iterations = 0;
  double kkt_violation = 0.0;
  bool hit_iteration_limit = false;
  /// Training-row index of each support vector; empty for models read from disk.
  std::vector<std::size_t> sv_index;
};

/// Trained epsilon-SVR: f(x) = sum_i coef_i K(sv_i, x) + bias, coef_i = alpha_i - alpha_i*.
struct SvrModel {
  Matrix support_vectors;
  std::vector<double> dual_coefs;
  double bias = 0.0;
  KernelSpec kernel;
  double c = 1.0;
  double epsilon = 0.0;
  std::size_t n_features = 0;
  /// Optional: when present, predict() on a FeatureMatrix checks names and applies scaling.
  ScalingStats scaling;
  std::vector<std::string> feature_names;
  TrainMeta meta;

  std::size_t sv_count() const { return dual_coefs.size(); }
};

/// Solves the epsilon-SVR dual by SMO on maximal violating pairs. `x` must already be scaled.
/// Hitting max_iter sets meta.hit_iteration_limit but still returns the current model.
SvrModel train(const Matrix& x, std::span<const double> y, const TrainConfig& cfg, const KernelSpec& kernel);

/// Warm start from per-row coefficients (alpha - alpha*); rows past initial.size() start at 0.
/// A start outside the box or off the equality constraint is ignored.
SvrModel train(const Matrix& x, std::span<const double> y, const TrainConfig& cfg, const KernelSpec& kernel,
               std::span<const double> initial);

/// Raw decision values for already-scaled rows; no clipping.
std::vector<double> predict(const SvrModel& model, const Matrix& x);
/// Checks feature names and applies the model's scaling first.
std::vector<double> predict(const SvrModel& model, const FeatureMatrix& x);

/// Dual coefficient of every training row (zero for non-support vectors).
std::vector<double> expand_coefficients(const SvrModel& model, const Matrix& x);

/// -1/2 b'Kb - eps |b|_1 + y'b at the stored coefficients.
double dual_objective(const SvrModel& model, const Matrix& x, std::span<const double> y, const TrainConfig& cfg);

/// Largest maximal-violating-pair gap of the stored coefficients (0 when optimal).
double kkt_violation(const SvrModel& model, const Matrix& x, std::span<const double> y, const TrainConfig& cfg);

std::string save_model(const SvrModel& model);
SvrModel load_model(std::string_view bytes);

}  // namespace helio
