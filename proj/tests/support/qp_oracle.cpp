#include "qp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace helio::testing {

QpSolution solve_svr_dual(const Eigen::MatrixXd& gram, const std::vector<double>& y, double c, double epsilon) {
  const Eigen::Index n = gram.rows();
  const Eigen::Index m = 2 * n;

  // min 1/2 z'Qz + p'z  s.t.  a'z = 0, 0 <= z <= c
  Eigen::MatrixXd q(m, m);
  q << gram, -gram, -gram, gram;
  Eigen::VectorXd p(m), a(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i) = epsilon - y[static_cast<std::size_t>(i)];
    p(i + n) = epsilon + y[static_cast<std::size_t>(i)];
    a(i) = 1.0;
    a(i + n) = -1.0;
  }

  Eigen::VectorXd z = Eigen::VectorXd::Constant(m, c / 2.0);
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(m);  // for z >= 0
  Eigen::VectorXd mu = Eigen::VectorXd::Ones(m);   // for z <= c
  double nu = 0.0;

  QpSolution out;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd s = z;
    const Eigen::VectorXd t = Eigen::VectorXd::Constant(m, c) - z;
    const Eigen::VectorXd rd = q * z + p + nu * a - lam + mu;
    const double re = a.dot(z);
    const double gap = (lam.dot(s) + mu.dot(t)) / static_cast<double>(2 * m);
    out.iterations = it;
    const double scale = std::max(1.0, q.lpNorm<Eigen::Infinity>());
    if (gap < 1e-14 && rd.lpNorm<Eigen::Infinity>() < 1e-11 * scale && std::abs(re) < 1e-10 * std::max(1.0, c)) {
      out.converged = true;
      break;
    }
    const double sigma = 0.1;
    const Eigen::VectorXd rl = (lam.array() * s.array() - sigma * gap).matrix();
    const Eigen::VectorXd ru = (mu.array() * t.array() - sigma * gap).matrix();

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
    kkt.topLeftCorner(m, m) = q;
    kkt.topLeftCorner(m, m).diagonal() += (lam.array() / s.array() + mu.array() / t.array()).matrix();
    kkt.block(0, m, m, 1) = a;
    kkt.block(m, 0, 1, m) = a.transpose();
    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = -rd - (rl.array() / s.array()).matrix() + (ru.array() / t.array()).matrix();
    rhs(m) = -re;
    const Eigen::VectorXd step = kkt.fullPivLu().solve(rhs);
    const Eigen::VectorXd dz = step.head(m);
    const double dnu = step(m);
    const Eigen::VectorXd dlam = (-(rl.array() + lam.array() * dz.array()) / s.array()).matrix();
    const Eigen::VectorXd dmu = (-(ru.array() - mu.array() * dz.array()) / t.array()).matrix();

    double alpha = 1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (dz(i) < 0) alpha = std::min(alpha, -0.995 * s(i) / dz(i));
      if (dz(i) > 0) alpha = std::min(alpha, 0.995 * t(i) / dz(i));
      if (dlam(i) < 0) alpha = std::min(alpha, -0.995 * lam(i) / dlam(i));
      if (dmu(i) < 0) alpha = std::min(alpha, -0.995 * mu(i) / dmu(i));
    }
    z += alpha * dz;
    lam += alpha * dlam;
    mu += alpha * dmu;
    nu += alpha * dnu;
  }

  out.beta.resize(static_cast<std::size_t>(n));
  Eigen::VectorXd beta(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    beta(i) = z(i) - z(i + n);
    out.beta[static_cast<std::size_t>(i)] = beta(i);
  }
  out.bias = nu;

  // Without a free variable the optimal bias is an interval; report its midpoint.
  const double edge = 1e-7 * c;
  bool any_free = false;
  for (Eigen::Index i = 0; i < m; ++i) any_free = any_free || (z(i) > edge && z(i) < c - edge);
  if (!any_free) {
    const Eigen::VectorXd g = gram * beta;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = y[static_cast<std::size_t>(i)] - g(i);
      const bool upper = z(i) >= c - edge;      // alpha_i at C
      const bool lower = z(i + n) >= c - edge;  // alpha*_i at C
      if (upper) {
        hi = std::min(hi, r - epsilon);
      } else if (lower) {
        lo = std::max(lo, r + epsilon);
      } else {
        lo = std::max(lo, r - epsilon);
        hi = std::min(hi, r + epsilon);
      }
    }
    out.bias = 0.5 * (lo + hi);
  }
  out.objective = -(0.5 * z.dot(q * z) + p.dot(z));
  return out;
}

}  // namespace helio::testing
