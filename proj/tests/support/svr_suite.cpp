#include "svr_suite.hpp"

#include <algorithm>
#include <cmath>

#include "helio/seeding.hpp"
#include "qp_oracle.hpp"

namespace helio::testing {

SvrProblem random_svr_problem(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "svr-suite"));
  SvrProblem p;
  const std::size_t n = 2 + rng.index(11);
  const std::size_t d = 1 + rng.index(3);
  p.x = Matrix(n, d);
  p.probe = Matrix(5, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) p.x(i, j) = rng.uniform(-1.5, 1.5);
  }
  for (std::size_t i = 0; i < p.probe.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) p.probe(i, j) = rng.uniform(-1.5, 1.5);
  }
  std::vector<double> w(d);
  for (auto& v : w) v = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    double t = 0.0;
    for (std::size_t j = 0; j < d; ++j) t += w[j] * p.x(i, j);
    p.y.push_back(std::sin(t) + 0.2 * rng.normal());
  }
  switch (seed % 3) {
    case 0:
      p.kernel.kind = KernelKind::linear;
      break;
    case 1:
      p.kernel.kind = KernelKind::polynomial;
      p.kernel.degree = 2 + static_cast<int>(rng.index(2));
      p.kernel.gamma = rng.uniform(0.2, 1.0);
      p.kernel.coef0 = 1.0;
      break;
    default:
      p.kernel.kind = KernelKind::rbf;
      p.kernel.gamma = std::exp2(rng.uniform(-3.0, 2.0));
      break;
  }
  p.cfg.c = std::exp2(rng.uniform(-2.0, 4.0));
  p.cfg.epsilon = rng.uniform(0.0, 0.3);
  p.cfg.tol = 1e-8;
  return p;
}

Eigen::MatrixXd gram_matrix(const KernelSpec& kernel, const Matrix& x) {
  const auto n = static_cast<Eigen::Index>(x.rows());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i, j) = kernel_eval(kernel, x.row(static_cast<std::size_t>(i)), x.row(static_cast<std::size_t>(j)));
    }
  }
  return k;
}

OracleComparison compare_with_reference(const SvrProblem& p, const SvrModel& model) {
  const auto ref = solve_svr_dual(gram_matrix(p.kernel, p.x), p.y, p.cfg.c, p.cfg.epsilon);
  OracleComparison out;
  out.reference_converged = ref.converged;
  out.objective_gap = std::abs(dual_objective(model, p.x, p.y, p.cfg) - ref.objective);
  const auto pred = predict(model, p.probe);
  for (std::size_t r = 0; r < p.probe.rows(); ++r) {
    double f = ref.bias;
    for (std::size_t i = 0; i < p.x.rows(); ++i) f += ref.beta[i] * kernel_eval(p.kernel, p.x.row(i), p.probe.row(r));
    out.prediction_gap = std::max(out.prediction_gap, std::abs(f - pred[r]));
  }
  return out;
}

KktReport kkt_report(const SvrProblem& p, const SvrModel& model) {
  KktReport out;
  double sum = 0.0;
  for (double b : model.dual_coefs) {
    sum += b;
    out.box_excess = std::max(out.box_excess, std::abs(b) - model.c);
  }
  out.equality = std::abs(sum);
  const auto coef = expand_coefficients(model, p.x);
  const auto fit = predict(model, p.x);
  for (std::size_t i = 0; i < p.x.rows(); ++i) {
    const double a = std::abs(coef[i]);
    if (a > 1e-12 && a < model.c - 1e-12) {
      out.free_residual = std::max(out.free_residual, std::abs(std::abs(p.y[i] - fit[i]) - model.epsilon));
    }
  }
  return out;
}

}  // namespace helio::testing
