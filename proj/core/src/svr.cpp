#include "helio/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "helio/error.hpp"
#include "helio/kernel_cache.hpp"
#include "helio/text.hpp"

namespace helio {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "polynomial";
    case KernelKind::rbf: return "rbf";
  }
  return "?";
}

KernelKind parse_kernel_kind(std::string_view text) {
  if (text == "linear") return KernelKind::linear;
  if (text == "polynomial" || text == "poly") return KernelKind::polynomial;
  if (text == "rbf") return KernelKind::rbf;
  raise(ErrorCode::BadConfig, "unknown kernel '" + std::string(text) + "'");
}

void KernelSpec::validate() const {
  if (kind != KernelKind::linear && !(gamma > 0.0 && std::isfinite(gamma))) {
    raise(ErrorCode::BadConfig, "kernel gamma must be positive");
  }
  if (kind == KernelKind::polynomial && degree < 1) raise(ErrorCode::BadConfig, "polynomial degree must be >= 1");
}

void TrainConfig::validate() const {
  if (!(c > 0.0 && std::isfinite(c))) raise(ErrorCode::BadConfig, "C must be positive");
  if (!(epsilon >= 0.0)) raise(ErrorCode::BadConfig, "epsilon must be non-negative");
  if (!(tol > 0.0)) raise(ErrorCode::BadConfig, "tol must be positive");
  if (max_iter < 1) raise(ErrorCode::BadConfig, "max_iter must be positive");
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double kernel_unchecked(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) {
  switch (spec.kind) {
    case KernelKind::linear:
      return dot(a, b);
    case KernelKind::polynomial: {
      const double base = spec.gamma * dot(a, b) + spec.coef0;
      double out = 1.0;
      for (int k = 0; k < spec.degree; ++k) out *= base;
      return out;
    }
    case KernelKind::rbf: {
      double d2 = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        d2 += diff * diff;
      }
      return std::exp(-spec.gamma * d2);
    }
  }
  return 0.0;
}

constexpr double kTau = 1e-12;
constexpr double kDropThreshold = 1e-12;

/// Bias from the free support vectors, else the midpoint of the feasible interval.
/// `g[i]` is sum_j coef_j K(x_i, x_j).
double compute_bias(std::span<const double> coef, std::span<const double> g, std::span<const double> y, double c,
                    double eps) {
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < coef.size(); ++i) {
    const double r = y[i] - g[i];
    const double a = std::abs(coef[i]);
    if (a > 0.0 && a < c) {
      free_sum += coef[i] > 0.0 ? r - eps : r + eps;
      ++free_count;
    } else if (coef[i] >= c) {
      hi = std::min(hi, r - eps);
    } else if (coef[i] <= -c) {
      lo = std::max(lo, r + eps);
    } else {
      lo = std::max(lo, r - eps);
      hi = std::min(hi, r + eps);
    }
  }
  if (free_count > 0) return free_sum / static_cast<double>(free_count);
  if (std::isinf(lo) && std::isinf(hi)) return 0.0;
  if (std::isinf(lo)) return hi;
  if (std::isinf(hi)) return lo;
  return 0.5 * (lo + hi);
}

/// Maximal violating pair gap of the 2l-variable problem given alpha and gradient.
double pair_gap(std::span<const double> alpha, std::span<const double> grad, std::size_t l, double c) {
  double gmax = -std::numeric_limits<double>::infinity();
  double gmin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < 2 * l; ++t) {
    const bool up_sign = t < l;  // y_t = +1 for alpha, -1 for alpha*
    const double v = up_sign ? -grad[t] : grad[t];
    const bool in_up = up_sign ? alpha[t] < c : alpha[t] > 0.0;
    const bool in_low = up_sign ? alpha[t] > 0.0 : alpha[t] < c;
    if (in_up) gmax = std::max(gmax, v);
    if (in_low) gmin = std::min(gmin, v);
  }
  if (std::isinf(gmax) || std::isinf(gmin)) return 0.0;
  return std::max(0.0, gmax - gmin);
}

class SmoSolver {
 public:
  SmoSolver(const Matrix& x, std::span<const double> y, const TrainConfig& cfg, const KernelSpec& kernel,
            std::span<const double> initial)
      : x_(x),
        target_(y),
        cfg_(cfg),
        kernel_(kernel),
        l_(x.rows()),
        cache_(l_, static_cast<std::size_t>(std::max(0.0, cfg.cache_mb) * 1024.0 * 1024.0),
               [this](std::size_t i, std::span<double> out) {
                 const auto xi = x_.row(i);
                 for (std::size_t j = 0; j < l_; ++j) out[j] = kernel_unchecked(kernel_, xi, x_.row(j));
               }) {
    alpha_.assign(2 * l_, 0.0);
    grad_.resize(2 * l_);
    grad_bar_.assign(2 * l_, 0.0);
    diag_.resize(l_);
    for (std::size_t i = 0; i < l_; ++i) {
      grad_[i] = cfg.epsilon - y[i];
      grad_[i + l_] = cfg.epsilon + y[i];
      diag_[i] = kernel_unchecked(kernel_, x_.row(i), x_.row(i));
    }
    for (std::size_t s = 0; s < initial.size(); ++s) {
      if (initial[s] == 0.0) continue;
      alpha_[s] = std::max(initial[s], 0.0);
      alpha_[s + l_] = std::max(-initial[s], 0.0);
      const auto ks = cache_.row(s);
      for (std::size_t t = 0; t < l_; ++t) {
        grad_[t] += initial[s] * ks[t];
        grad_[t + l_] -= initial[s] * ks[t];
      }
      if (std::abs(initial[s]) >= cfg.c) add_bound_row(initial[s] > 0.0 ? s : s + l_, ks, 1.0);
    }
    active_.resize(2 * l_);
    for (std::size_t t = 0; t < 2 * l_; ++t) active_[t] = t;
  }

  void run() {
    const double c = cfg_.c;
    const std::size_t period = std::min<std::size_t>(std::max<std::size_t>(l_, 1), 1000);
    std::size_t counter = period;
    while (true) {
      if (cfg_.shrinking && --counter == 0) {
        counter = period;
        shrink();
      }
      std::size_t i = 0, j = 0;
      if (!select(i, j)) {
        if (active_.size() == 2 * l_) break;
        unshrink();
        if (!select(i, j)) break;
        counter = 1;
      }
      if (iterations_ >= cfg_.max_iter) {
        hit_limit_ = true;
        break;
      }
      ++iterations_;
      update(i, j, c);
    }
    if (active_.size() != 2 * l_) unshrink();
    final_gap_ = pair_gap(alpha_, grad_, l_, c);
  }

  std::vector<double> coefficients() const {
    std::vector<double> coef(l_);
    for (std::size_t s = 0; s < l_; ++s) coef[s] = alpha_[s] - alpha_[s + l_];
    return coef;
  }

  /// sum_j coef_j K(x_s, x_j) recovered from the gradient.
  std::vector<double> decision_without_bias() const {
    std::vector<double> g(l_);
    for (std::size_t s = 0; s < l_; ++s) g[s] = grad_[s] - (cfg_.epsilon - target_[s]);
    return g;
  }

  std::int64_t iterations() const { return iterations_; }
  bool hit_limit() const { return hit_limit_; }
  double final_gap() const { return final_gap_; }

 private:
  static int sign(std::size_t t, std::size_t l) { return t < l ? 1 : -1; }
  std::size_t sample(std::size_t t) const { return t < l_ ? t : t - l_; }

  bool in_up(std::size_t t) const { return t < l_ ? alpha_[t] < cfg_.c : alpha_[t] > 0.0; }
  bool in_low(std::size_t t) const { return t < l_ ? alpha_[t] > 0.0 : alpha_[t] < cfg_.c; }
  double score(std::size_t t) const { return t < l_ ? -grad_[t] : grad_[t]; }  // -y_t G_t
  bool at_upper(std::size_t t) const { return alpha_[t] >= cfg_.c; }

  // grad_bar_ += scale * C * Q[t, .] for variable t sitting at C.
  void add_bound_row(std::size_t t, std::span<const double> kt, double scale) {
    const double w = scale * cfg_.c * sign(t, l_);
    for (std::size_t s = 0; s < l_; ++s) {
      grad_bar_[s] += w * kt[s];
      grad_bar_[s + l_] -= w * kt[s];
    }
  }

  bool select(std::size_t& out_i, std::size_t& out_j) {
    double gmax = -std::numeric_limits<double>::infinity();
    long best_i = -1;
    for (const std::size_t t : active_) {
      if (in_up(t) && score(t) > gmax) {
        gmax = score(t);
        best_i = static_cast<long>(t);
      }
    }
    if (best_i < 0) return false;
    const auto i = static_cast<std::size_t>(best_i);

    double gmin = std::numeric_limits<double>::infinity();
    long best_j = -1;
    if (cfg_.selection == WorkingSetSelection::first_order) {
      for (const std::size_t t : active_) {
        if (in_low(t) && score(t) < gmin) {
          gmin = score(t);
          best_j = static_cast<long>(t);
        }
      }
    } else {
      const auto ki = cache_.row(sample(i));
      double best_obj = std::numeric_limits<double>::infinity();
      for (const std::size_t t : active_) {
        if (!in_low(t)) continue;
        const double s = score(t);
        gmin = std::min(gmin, s);
        const double b = gmax - s;
        if (b <= 0.0) continue;
        double a = diag_[sample(i)] + diag_[sample(t)] - 2.0 * ki[sample(t)];
        if (a <= 0.0) a = kTau;
        const double obj = -(b * b) / a;
        if (obj < best_obj) {
          best_obj = obj;
          best_j = static_cast<long>(t);
        }
      }
    }
    if (best_j < 0 || gmax - gmin <= cfg_.tol) return false;
    out_i = i;
    out_j = static_cast<std::size_t>(best_j);
    return true;
  }

  // Drops bound variables that cannot join a violating pair under the current extremes.
  void shrink() {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (const std::size_t t : active_) {
      if (in_up(t)) gmax = std::max(gmax, score(t));
      if (in_low(t)) gmin = std::min(gmin, score(t));
    }
    if (!unshrunk_ && gmax - gmin <= 10.0 * cfg_.tol) {
      unshrunk_ = true;
      unshrink();
    }
    std::erase_if(active_, [&](std::size_t t) {
      const bool up = in_up(t), low = in_low(t);
      if (up && low) return false;
      return up ? score(t) < gmin : score(t) > gmax;
    });
  }

  // Rebuilds the gradient of inactive variables and reactivates everything.
  void unshrink() {
    std::vector<char> active(2 * l_, 0);
    for (const std::size_t t : active_) active[t] = 1;
    std::vector<std::size_t> stale;
    for (std::size_t t = 0; t < 2 * l_; ++t) {
      if (active[t]) continue;
      stale.push_back(t);
      const std::size_t s = sample(t);
      grad_[t] = grad_bar_[t] + (t < l_ ? cfg_.epsilon - target_[s] : cfg_.epsilon + target_[s]);
    }
    if (!stale.empty()) {
      for (std::size_t v = 0; v < 2 * l_; ++v) {
        if (!(alpha_[v] > 0.0 && alpha_[v] < cfg_.c)) continue;
        const auto kv = cache_.row(sample(v));
        const double w = alpha_[v] * sign(v, l_);
        for (const std::size_t t : stale) grad_[t] += w * sign(t, l_) * kv[sample(t)];
      }
    }
    active_.resize(2 * l_);
    for (std::size_t t = 0; t < 2 * l_; ++t) active_[t] = t;
  }

  void update(std::size_t i, std::size_t j, double c) {
    const auto ki = cache_.row(sample(i));
    const auto kj = cache_.row(sample(j));
    const int yi = sign(i, l_);
    const int yj = sign(j, l_);
    const double qij = yi * yj * ki[sample(j)];
    const double qdi = diag_[sample(i)];
    const double qdj = diag_[sample(j)];
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    const bool was_upper_i = at_upper(i);
    const bool was_upper_j = at_upper(j);
    double& ai = alpha_[i];
    double& aj = alpha_[j];

    if (yi != yj) {
      double quad = qdi + qdj + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > c) {
          ai = c;
          aj = c - diff;
        }
      } else if (aj > c) {
        aj = c;
        ai = c + diff;
      }
    } else {
      double quad = qdi + qdj - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) {
          ai = c;
          aj = sum - c;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > c) {
        if (aj > c) {
          aj = c;
          ai = sum - c;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }

    // G_u += Q_ui d_i + Q_uj d_j, with Q_ut = y_u y_t K(s_u, s_t).
    const double di = yi * (ai - old_i);
    const double dj = yj * (aj - old_j);
    if (active_.size() == 2 * l_) {
      for (std::size_t s = 0; s < l_; ++s) {
        const double change = di * ki[s] + dj * kj[s];
        grad_[s] += change;
        grad_[s + l_] -= change;
      }
    } else {
      for (const std::size_t t : active_) {
        const double change = di * ki[sample(t)] + dj * kj[sample(t)];
        grad_[t] += t < l_ ? change : -change;
      }
    }
    if (was_upper_i != at_upper(i)) add_bound_row(i, ki, was_upper_i ? -1.0 : 1.0);
    if (was_upper_j != at_upper(j)) add_bound_row(j, kj, was_upper_j ? -1.0 : 1.0);
  }

  const Matrix& x_;
  std::span<const double> target_;
  TrainConfig cfg_;
  KernelSpec kernel_;
  std::size_t l_;
  KernelCache cache_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
  std::vector<double> grad_bar_;
  std::vector<double> diag_;
  std::vector<std::size_t> active_;
  bool unshrunk_ = false;
  std::int64_t iterations_ = 0;
  bool hit_limit_ = false;
  double final_gap_ = 0.0;
};

}  // namespace

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    raise(ErrorCode::DimensionMismatch, "kernel arguments have dimensions " + std::to_string(a.size()) + " and " +
                                            std::to_string(b.size()));
  }
  return kernel_unchecked(spec, a, b);
}

SvrModel train(const Matrix& x, std::span<const double> y, const TrainConfig& cfg, const KernelSpec& kernel) {
  return train(x, y, cfg, kernel, {});
}

SvrModel train(const Matrix& x, std::span<const double> y, const TrainConfig& cfg, const KernelSpec& kernel,
               std::span<const double> initial) {
  cfg.validate();
  kernel.validate();
  if (x.rows() == 0) raise(ErrorCode::NoData, "no training rows");
  if (x.rows() != y.size()) raise(ErrorCode::LengthMismatch, "x and y differ in length");
  for (double v : y) {
    if (!std::isfinite(v)) raise(ErrorCode::NoData, "non-finite target");
  }

  if (initial.size() > x.rows()) initial = initial.first(x.rows());
  double sum = 0.0, scale = 0.0;
  bool feasible = true;
  for (double v : initial) {
    sum += v;
    scale += std::abs(v);
    if (!std::isfinite(v) || std::abs(v) > cfg.c) feasible = false;
  }
  if (!feasible || std::abs(sum) > 1e-12 * std::max(1.0, scale)) initial = {};

  SmoSolver solver(x, y, cfg, kernel, initial);
  solver.run();

  const auto coef = solver.coefficients();
  const auto g = solver.decision_without_bias();

  SvrModel model;
  model.kernel = kernel;
  model.c = cfg.c;
  model.epsilon = cfg.epsilon;
  model.n_features = x.cols();
  model.bias = compute_bias(coef, g, y, cfg.c, cfg.epsilon);
  model.meta.iterations = solver.iterations();
  model.meta.hit_iteration_limit = solver.hit_limit();
  model.meta.kkt_violation = solver.final_gap();

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < coef.size(); ++i) {
    if (std::abs(coef[i]) > kDropThreshold) keep.push_back(i);
  }
  model.support_vectors = x.select_rows(keep);
  if (keep.empty()) model.support_vectors = Matrix(0, x.cols());
  model.dual_coefs.reserve(keep.size());
  for (auto i : keep) model.dual_coefs.push_back(coef[i]);
  model.meta.sv_index = std::move(keep);
  return model;
}

std::vector<double> predict(const SvrModel& model, const Matrix& x) {
  std::vector<double> out(x.rows(), model.bias);
  if (x.rows() == 0) return out;
  if (x.cols() != model.n_features) {
    raise(ErrorCode::DimensionMismatch, "model expects " + std::to_string(model.n_features) + " features, got " +
                                            std::to_string(x.cols()));
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double f = 0.0;
    for (std::size_t s = 0; s < model.dual_coefs.size(); ++s) {
      f += model.dual_coefs[s] * kernel_unchecked(model.kernel, model.support_vectors.row(s), row);
    }
    out[r] = f + model.bias;
  }
  return out;
}

std::vector<double> predict(const SvrModel& model, const FeatureMatrix& x) {
  if (!model.feature_names.empty() && x.columns != model.feature_names) {
    raise(ErrorCode::DimensionMismatch, "feature names differ from the model's");
  }
  if (model.scaling.empty()) return predict(model, x.values);
  return predict(model, apply_scaling(model.scaling, x.values));
}

std::vector<double> expand_coefficients(const SvrModel& model, const Matrix& x) {
  if (x.rows() > 0 && x.cols() != model.n_features) raise(ErrorCode::ShapeMismatch, "training matrix width differs from model");
  std::vector<double> coef(x.rows(), 0.0);
  const auto& idx = model.meta.sv_index;
  const bool indexed = idx.size() == model.dual_coefs.size() &&
                       std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return i < x.rows(); });
  if (indexed) {
    for (std::size_t s = 0; s < idx.size(); ++s) coef[idx[s]] = model.dual_coefs[s];
    return coef;
  }
  // Loaded models carry no indices: match support vectors to identical training rows.
  std::vector<bool> used(x.rows(), false);
  for (std::size_t s = 0; s < model.dual_coefs.size(); ++s) {
    const auto sv = model.support_vectors.row(s);
    bool found = false;
    for (std::size_t r = 0; r < x.rows() && !found; ++r) {
      if (!used[r] && std::equal(sv.begin(), sv.end(), x.row(r).begin())) {
        used[r] = true;
        coef[r] = model.dual_coefs[s];
        found = true;
      }
    }
    if (!found) raise(ErrorCode::ShapeMismatch, "support vector " + std::to_string(s) + " is not a training row");
  }
  return coef;
}

namespace {

std::vector<double> kernel_times_coef(const SvrModel& model, const Matrix& x) {
  std::vector<double> g(x.rows(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double f = 0.0;
    for (std::size_t s = 0; s < model.dual_coefs.size(); ++s) {
      f += model.dual_coefs[s] * kernel_unchecked(model.kernel, model.support_vectors.row(s), x.row(r));
    }
    g[r] = f;
  }
  return g;
}

void check_shape(const SvrModel& model, const Matrix& x, std::span<const double> y) {
  if (x.rows() != y.size()) raise(ErrorCode::ShapeMismatch, "x and y differ in length");
  if (x.rows() > 0 && x.cols() != model.n_features) raise(ErrorCode::ShapeMismatch, "x width differs from model");
}

}  // namespace

double dual_objective(const SvrModel& model, const Matrix& x, std::span<const double> y, const TrainConfig& cfg) {
  check_shape(model, x, y);
  const auto coef = expand_coefficients(model, x);
  const auto g = kernel_times_coef(model, x);
  double quad = 0.0, l1 = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < coef.size(); ++i) {
    quad += coef[i] * g[i];
    l1 += std::abs(coef[i]);
    lin += y[i] * coef[i];
  }
  return -0.5 * quad - cfg.epsilon * l1 + lin;
}

double kkt_violation(const SvrModel& model, const Matrix& x, std::span<const double> y, const TrainConfig& cfg) {
  check_shape(model, x, y);
  const auto coef = expand_coefficients(model, x);
  const auto g = kernel_times_coef(model, x);
  const std::size_t l = x.rows();
  std::vector<double> alpha(2 * l), grad(2 * l);
  for (std::size_t i = 0; i < l; ++i) {
    alpha[i] = std::max(coef[i], 0.0);
    alpha[i + l] = std::max(-coef[i], 0.0);
    grad[i] = g[i] + cfg.epsilon - y[i];
    grad[i + l] = -g[i] + cfg.epsilon + y[i];
  }
  return pair_gap(alpha, grad, l, cfg.c);
}

}  // namespace helio
