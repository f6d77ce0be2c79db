#include "helio/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "helio/error.hpp"
#include "helio/parallel.hpp"
#include "helio/seeding.hpp"

namespace helio {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> as_eigen(const Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

void check_xy(const Matrix& x, std::span<const double> y) {
  if (x.rows() == 0) raise(ErrorCode::NoData, "no training rows");
  if (x.rows() != y.size()) raise(ErrorCode::LengthMismatch, "x has " + std::to_string(x.rows()) + " rows, y has " + std::to_string(y.size()));
}

}  // namespace

LinModel mlr_fit(const Matrix& x, std::span<const double> y) {
  check_xy(x, y);
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto p = static_cast<Eigen::Index>(x.cols());

  // Solve in standardized coordinates so pivoting and the rank test do not depend on units.
  const auto X = as_eigen(x);
  const Eigen::RowVectorXd mean = X.colwise().mean();
  Eigen::RowVectorXd scale(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    const double sd = std::sqrt((X.col(c).array() - mean(c)).square().sum() / static_cast<double>(n));
    scale(c) = sd > 0.0 ? sd : 1.0;
  }
  Eigen::MatrixXd design(n, p + 1);
  design.leftCols(p) = (X.rowwise() - mean).array().rowwise() / scale.array();
  design.col(p).setOnes();
  const Eigen::Map<const Eigen::VectorXd> target(y.data(), n);

  LinModel model;
  Eigen::VectorXd beta;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() == p + 1) {
    beta = qr.solve(target);
  } else {
    // Augment with sqrt(lambda) * I on the slope block.
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + p, p + 1);
    aug.topRows(n) = design;
    aug.bottomLeftCorner(p, p) = std::sqrt(kRidgeFallback) * Eigen::MatrixXd::Identity(p, p);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + p);
    rhs.head(n) = target;
    beta = aug.colPivHouseholderQr().solve(rhs);
    model.ridge_lambda = kRidgeFallback;
  }
  model.coefficients.resize(static_cast<std::size_t>(p));
  double intercept = beta(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    const double slope = beta(c) / scale(c);
    model.coefficients[static_cast<std::size_t>(c)] = slope;
    intercept -= slope * mean(c);
  }
  model.intercept = intercept;
  return model;
}

std::vector<double> mlr_predict(const LinModel& model, const Matrix& x) {
  if (x.rows() > 0 && x.cols() != model.coefficients.size()) {
    raise(ErrorCode::DimensionMismatch, "model expects " + std::to_string(model.coefficients.size()) + " features, got " +
                                            std::to_string(x.cols()));
  }
  std::vector<double> out(x.rows(), model.intercept);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double acc = model.intercept;
    for (std::size_t c = 0; c < row.size(); ++c) acc += model.coefficients[c] * row[c];
    out[r] = acc;
  }
  return out;
}

std::vector<double> MlpWeights::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  out.insert(out.end(), w1.begin(), w1.end());
  out.insert(out.end(), b1.begin(), b1.end());
  out.insert(out.end(), w2.begin(), w2.end());
  out.push_back(b2);
  return out;
}

MlpWeights MlpWeights::unflatten(std::size_t inputs, std::size_t hidden, std::span<const double> flat) {
  MlpWeights w;
  w.inputs = inputs;
  w.hidden = hidden;
  if (flat.size() != hidden * inputs + 2 * hidden + 1) raise(ErrorCode::ShapeMismatch, "flat parameter vector has wrong size");
  auto it = flat.begin();
  w.w1.assign(it, it + static_cast<std::ptrdiff_t>(hidden * inputs));
  it += static_cast<std::ptrdiff_t>(hidden * inputs);
  w.b1.assign(it, it + static_cast<std::ptrdiff_t>(hidden));
  it += static_cast<std::ptrdiff_t>(hidden);
  w.w2.assign(it, it + static_cast<std::ptrdiff_t>(hidden));
  it += static_cast<std::ptrdiff_t>(hidden);
  w.b2 = *it;
  return w;
}

MlpWeights init_weights(std::size_t inputs, std::size_t hidden, std::uint64_t seed) {
  Rng rng(seed);
  MlpWeights w;
  w.inputs = inputs;
  w.hidden = hidden;
  const double s1 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(inputs, 1)));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(hidden, 1)));
  w.w1.resize(hidden * inputs);
  for (auto& v : w.w1) v = rng.uniform(-s1, s1);
  w.b1.assign(hidden, 0.0);
  w.w2.resize(hidden);
  for (auto& v : w.w2) v = rng.uniform(-s2, s2);
  w.b2 = 0.0;
  return w;
}

double mlp_forward(const MlpWeights& w, std::span<const double> row) {
  if (row.size() != w.inputs) raise(ErrorCode::DimensionMismatch, "row width differs from network input size");
  double out = w.b2;
  for (std::size_t h = 0; h < w.hidden; ++h) {
    double z = w.b1[h];
    const double* wr = w.w1.data() + h * w.inputs;
    for (std::size_t k = 0; k < w.inputs; ++k) z += wr[k] * row[k];
    out += w.w2[h] * std::tanh(z);
  }
  return out;
}

LossGrad mlp_loss_grad(const MlpWeights& w, const Matrix& x, std::span<const double> y) {
  if (x.rows() != y.size() || (x.rows() > 0 && x.cols() != w.inputs) || w.w1.size() != w.hidden * w.inputs ||
      w.b1.size() != w.hidden || w.w2.size() != w.hidden) {
    raise(ErrorCode::ShapeMismatch, "weights, inputs and targets disagree in shape");
  }
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto h = static_cast<Eigen::Index>(w.hidden);
  const auto d = static_cast<Eigen::Index>(w.inputs);
  LossGrad out;
  out.gradient.inputs = w.inputs;
  out.gradient.hidden = w.hidden;
  out.gradient.w1.assign(w.w1.size(), 0.0);
  out.gradient.b1.assign(w.hidden, 0.0);
  out.gradient.w2.assign(w.hidden, 0.0);
  if (n == 0) return out;

  const auto X = as_eigen(x);
  const Eigen::Map<const RowMajor> W1(w.w1.data(), h, d);
  const Eigen::Map<const Eigen::VectorXd> b1(w.b1.data(), h);
  const Eigen::Map<const Eigen::VectorXd> w2(w.w2.data(), h);
  const Eigen::Map<const Eigen::VectorXd> target(y.data(), n);

  Eigen::MatrixXd A = (X * W1.transpose()).rowwise() + b1.transpose();
  A = A.array().tanh();
  const Eigen::VectorXd residual = (A * w2).array() + w.b2 - target.array();
  const double inv_n = 1.0 / static_cast<double>(n);
  out.loss = 0.5 * inv_n * residual.squaredNorm();

  Eigen::Map<Eigen::VectorXd>(out.gradient.w2.data(), h) = inv_n * (A.transpose() * residual);
  out.gradient.b2 = inv_n * residual.sum();
  const Eigen::MatrixXd delta = ((residual * w2.transpose()).array() * (1.0 - A.array().square())).matrix();
  Eigen::Map<RowMajor>(out.gradient.w1.data(), h, d) = inv_n * (delta.transpose() * X);
  Eigen::Map<Eigen::VectorXd>(out.gradient.b1.data(), h) = inv_n * delta.colwise().sum().transpose();
  return out;
}

MlpModel mlp_fit(const Matrix& x, std::span<const double> y, const MlpConfig& cfg) {
  check_xy(x, y);
  if (cfg.hidden_units < 1 || cfg.epochs < 0 || cfg.restarts < 1) raise(ErrorCode::BadConfig, "invalid network configuration");
  MlpModel model;
  model.inputs = x.cols();
  model.hidden_units = static_cast<std::size_t>(cfg.hidden_units);
  model.seed = cfg.seed;
  model.restarts.resize(static_cast<std::size_t>(cfg.restarts));

  parallel_for(model.restarts.size(), cfg.jobs, [&](std::size_t r) {
    MlpWeights w = init_weights(model.inputs, model.hidden_units, cfg.seed + r);
    auto params = w.flatten();
    std::vector<double> velocity(params.size(), 0.0);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      const auto lg = mlp_loss_grad(w, x, y);
      if (!std::isfinite(lg.loss)) {
        raise(ErrorCode::DivergedLoss, "restart " + std::to_string(r) + " diverged at epoch " + std::to_string(epoch));
      }
      const auto grad = lg.gradient.flatten();
      for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = cfg.momentum * velocity[i] - cfg.learning_rate * grad[i];
        params[i] += velocity[i];
      }
      w = MlpWeights::unflatten(model.inputs, model.hidden_units, params);
    }
    for (double p : params) {
      if (!std::isfinite(p)) raise(ErrorCode::DivergedLoss, "restart " + std::to_string(r) + " produced non-finite weights");
    }
    model.restarts[r] = std::move(w);
  });
  return model;
}

std::vector<double> mlp_predict(const MlpModel& model, const Matrix& x) {
  if (x.rows() > 0 && x.cols() != model.inputs) {
    raise(ErrorCode::DimensionMismatch, "network expects " + std::to_string(model.inputs) + " inputs, got " +
                                            std::to_string(x.cols()));
  }
  std::vector<double> out(x.rows(), 0.0);
  if (model.restarts.empty()) return out;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    // Summed in sorted order so the mean does not depend on restart order.
    std::vector<double> outputs;
    outputs.reserve(model.restarts.size());
    for (const auto& w : model.restarts) outputs.push_back(mlp_forward(w, x.row(r)));
    std::sort(outputs.begin(), outputs.end());
    double sum = 0.0;
    for (double v : outputs) sum += v;
    out[r] = sum / static_cast<double>(outputs.size());
  }
  return out;
}

}  // namespace helio
