#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "helio/matrix.hpp"

namespace helio {

/// Multiple linear regression.
struct LinModel {
  std::vector<double> coefficients;
  double intercept = 0.0;
  /// 0 for a plain least-squares fit; the ridge penalty used when the design was rank deficient.
  double ridge_lambda = 0.0;
};

inline constexpr double kRidgeFallback = 1e-8;

/// Least squares with intercept via column-pivoted Householder QR. A rank-deficient design is
/// refit with ridge lambda = 1e-8 on the slopes (the intercept is not penalized).
LinModel mlr_fit(const Matrix& x, std::span<const double> y);
std::vector<double> mlr_predict(const LinModel& model, const Matrix& x);

struct MlpConfig {
  int hidden_units = 20;
  int epochs = 2000;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::uint64_t seed = 1;
  int restarts = 10;
  int jobs = 1;
};

/// One tanh hidden layer, linear output.
struct MlpWeights {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;  // hidden x inputs, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;

  std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + 1; }
  std::vector<double> flatten() const;
  static MlpWeights unflatten(std::size_t inputs, std::size_t hidden, std::span<const double> flat);
  bool operator==(const MlpWeights&) const = default;
};

MlpWeights init_weights(std::size_t inputs, std::size_t hidden, std::uint64_t seed);
double mlp_forward(const MlpWeights& w, std::span<const double> row);

struct LossGrad {
  double loss = 0.0;
  MlpWeights gradient;
};

/// Loss is (1 / 2n) * sum of squared residuals; the gradient is exact.
LossGrad mlp_loss_grad(const MlpWeights& w, const Matrix& x, std::span<const double> y);

struct MlpModel {
  std::size_t inputs = 0;
  std::size_t hidden_units = 0;
  std::uint64_t seed = 0;
  std::vector<MlpWeights> restarts;
};

inline constexpr int kMlpRestarts = 10;

/// Trains `restarts` networks seeded seed, seed+1, ... with full-batch momentum descent.
MlpModel mlp_fit(const Matrix& x, std::span<const double> y, const MlpConfig& cfg);
/// Mean of the restart networks' outputs.
std::vector<double> mlp_predict(const MlpModel& model, const Matrix& x);

std::string save_lin_model(const LinModel& model);
LinModel load_lin_model(std::string_view bytes);
std::string save_mlp_model(const MlpModel& model);
MlpModel load_mlp_model(std::string_view bytes);

}  // namespace helio
