#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "helio/matrix.hpp"
#include "helio/svr.hpp"

namespace helio::testing {

/// One seeded small epsilon-SVR problem.
struct SvrProblem {
  Matrix x;
  std::vector<double> y;
  Matrix probe;
  KernelSpec kernel;
  TrainConfig cfg;
};

/// n <= 12, d <= 3; the kernel cycles linear, polynomial, rbf with the seed.
SvrProblem random_svr_problem(std::uint64_t seed);

Eigen::MatrixXd gram_matrix(const KernelSpec& kernel, const Matrix& x);

struct OracleComparison {
  double objective_gap = 0.0;   // |smo - reference|
  double prediction_gap = 0.0;  // max over probe rows
  bool reference_converged = false;
};

OracleComparison compare_with_reference(const SvrProblem& p, const SvrModel& model);

struct KktReport {
  double equality = 0.0;      // |sum coef|
  double box_excess = 0.0;    // max(|coef| - C, 0)
  double free_residual = 0.0; // max over free SVs of ||y - f| - eps|
};

KktReport kkt_report(const SvrProblem& p, const SvrModel& model);

}  // namespace helio::testing
