#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helio/error.hpp"
#include "helio/kernel_cache.hpp"
#include "helio/seeding.hpp"
#include "helio/svr.hpp"
#include "svr_suite.hpp"

using namespace helio;
using helio::testing::random_svr_problem;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::BadConfig;
}

Matrix column(std::initializer_list<double> v) {
  Matrix m(0, 1);
  for (double x : v) m.append_row(std::vector<double>{x});
  return m;
}

struct Smooth {
  Matrix x;
  std::vector<double> y;
};

Smooth smooth_problem(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Smooth s{Matrix(0, 2), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    s.x.append_row(std::vector<double>{a, b});
    s.y.push_back(std::sin(a) * std::cos(b) + 0.05 * rng.normal());
  }
  return s;
}

}  // namespace

TEST_CASE("kernel evaluation") {
  const std::vector<double> a{1, 2}, b{3, 4};
  KernelSpec rbf;
  rbf.gamma = 7.5;
  CHECK(kernel_eval(rbf, a, a) == 1.0);
  rbf.gamma = 1.0;
  const std::vector<double> p{0, 0}, q{1, 0};
  CHECK(kernel_eval(rbf, p, q) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  KernelSpec lin{.kind = KernelKind::linear};
  CHECK(kernel_eval(lin, a, b) == 11.0);
  KernelSpec poly{.kind = KernelKind::polynomial, .gamma = 0.5, .degree = 2, .coef0 = 1.0};
  CHECK(kernel_eval(poly, a, b) == doctest::Approx(42.25));
  const std::vector<double> c3{1, 2, 3};
  CHECK(code_of([&] { kernel_eval(rbf, a, c3); }) == ErrorCode::DimensionMismatch);
  CHECK(parse_kernel_kind("rbf") == KernelKind::rbf);
  CHECK(to_string(KernelKind::polynomial) == "polynomial");
}

TEST_CASE("kernel cache keeps rows under the budget and evicts least recently used") {
  std::size_t fills = 0;
  KernelCache cache(10, 3 * 10 * sizeof(double), [&](std::size_t r, std::span<double> out) {
    ++fills;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = static_cast<double>(r * 100 + j);
  });
  CHECK(cache.capacity_rows() == 3);
  CHECK(cache.row(1)[4] == 104.0);
  cache.row(2);
  cache.row(3);
  cache.row(1);
  CHECK(fills == 3);
  cache.row(4);  // evicts 2
  cache.row(1);
  CHECK(fills == 4);
  cache.row(2);
  CHECK(fills == 5);
  CHECK(cache.hits() == 2);
  KernelCache tiny(10, 0, [](std::size_t, std::span<double>) {});
  CHECK(tiny.capacity_rows() == 2);
}

TEST_CASE("single point gives a constant model") {
  for (auto kind : {KernelKind::linear, KernelKind::polynomial, KernelKind::rbf}) {
    KernelSpec k{.kind = kind};
    const auto m = train(column({2.0}), std::vector<double>{0.7}, TrainConfig{}, k);
    CHECK(m.sv_count() == 0);
    CHECK(m.bias == 0.7);
    const auto pred = predict(m, column({-3, 0, 5}));
    for (double v : pred) CHECK(v == 0.7);
    CHECK(kkt_violation(m, column({2.0}), std::vector<double>{0.7}, TrainConfig{}) == 0.0);
  }
}

TEST_CASE("three point linear problem is the flattest function inside the tube") {
  const auto x = column({0, 1, 2});
  const std::vector<double> y{0, 1, 2};
  TrainConfig cfg;
  cfg.c = 10;
  cfg.epsilon = 0.1;
  cfg.tol = 1e-10;
  const KernelSpec lin{.kind = KernelKind::linear};
  const auto m = train(x, y, cfg, lin);
  const auto coef = expand_coefficients(m, x);
  double slope = 0.0;
  for (std::size_t i = 0; i < 3; ++i) slope += coef[i] * x(i, 0);
  CHECK(std::abs(slope - 0.9) < 1e-6);
  CHECK(std::abs(m.bias - 0.1) < 1e-6);
  CHECK(std::abs(predict(m, column({1.0}))[0] - 1.0) < 1e-6);
  // Brute-force optimum over a fine coefficient grid, computed offline.
  CHECK(std::abs(dual_objective(m, x, y, cfg) - 0.405) < 1e-6);
  CHECK(std::abs(coef[0] + 0.45) < 1e-6);
  CHECK(std::abs(coef[1]) < 1e-6);
  CHECK(std::abs(coef[2] - 0.45) < 1e-6);
}

TEST_CASE("a tube wider than the spread gives no support vectors") {
  const auto s = smooth_problem(30, 4);
  const double mean = std::accumulate(s.y.begin(), s.y.end(), 0.0) / static_cast<double>(s.y.size());
  double spread = 0.0;
  for (double v : s.y) spread = std::max(spread, std::abs(v - mean));
  TrainConfig cfg;
  cfg.epsilon = spread + 0.01;
  const auto m = train(s.x, s.y, cfg, KernelSpec{});
  CHECK(m.sv_count() == 0);
  const auto pred = predict(m, s.x);
  for (double v : pred) CHECK(v == pred.front());
}

TEST_CASE("training rejects bad input") {
  CHECK(code_of([] { train(Matrix(0, 2), std::vector<double>{}, TrainConfig{}, KernelSpec{}); }) == ErrorCode::NoData);
  CHECK(code_of([] { train(column({1, 2}), std::vector<double>{1}, TrainConfig{}, KernelSpec{}); }) ==
        ErrorCode::LengthMismatch);
  TrainConfig bad;
  bad.c = 0;
  CHECK_THROWS_AS(train(column({1}), std::vector<double>{1}, bad, KernelSpec{}), Error);
  KernelSpec badk;
  badk.gamma = -1;
  CHECK_THROWS_AS(train(column({1}), std::vector<double>{1}, TrainConfig{}, badk), Error);
}

TEST_CASE("prediction shape checks") {
  const auto m = train(column({0, 1, 2}), std::vector<double>{0, 1, 0}, TrainConfig{}, KernelSpec{});
  CHECK(predict(m, Matrix(0, 1)).empty());
  CHECK(code_of([&] { predict(m, Matrix(2, 3)); }) == ErrorCode::DimensionMismatch);
  CHECK(dual_objective(SvrModel{.n_features = 1}, column({0, 1}), std::vector<double>{0, 1}, TrainConfig{}) == 0.0);
}

TEST_CASE("SMO matches the reference QP solver on seeded random problems") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const auto p = random_svr_problem(seed);
    const auto m = train(p.x, p.y, p.cfg, p.kernel);
    CHECK_FALSE(m.meta.hit_iteration_limit);
    const auto cmp = helio::testing::compare_with_reference(p, m);
    REQUIRE(cmp.reference_converged);
    INFO("seed " << seed);
    CHECK(cmp.objective_gap < 1e-6);
    CHECK(cmp.prediction_gap < 1e-4);
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("KKT conditions hold on converged models") {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto p = random_svr_problem(seed);
    p.cfg.tol = 1e-3;
    const auto m = train(p.x, p.y, p.cfg, p.kernel);
    const auto k = helio::testing::kkt_report(p, m);
    const double n = static_cast<double>(p.x.rows());
    INFO("seed " << seed);
    CHECK(k.equality <= 1e-9 * p.cfg.c * n);
    CHECK(k.box_excess <= 1e-12);
    CHECK(k.free_residual <= 10 * p.cfg.tol);
    CHECK(kkt_violation(m, p.x, p.y, p.cfg) <= p.cfg.tol);
  }
}

TEST_CASE("zeroed coefficients violate optimality") {
  const auto s = smooth_problem(40, 2);
  TrainConfig cfg;
  auto m = train(s.x, s.y, cfg, KernelSpec{});
  REQUIRE(m.sv_count() > 0);
  std::fill(m.dual_coefs.begin(), m.dual_coefs.end(), 0.0);
  CHECK(kkt_violation(m, s.x, s.y, cfg) > cfg.tol);
}

TEST_CASE("tight and loose tolerances reach nearly the same objective") {
  const auto s = smooth_problem(150, 3);
  TrainConfig loose, tight;
  loose.c = tight.c = 4;
  tight.tol = 1e-6;
  const auto a = train(s.x, s.y, loose, KernelSpec{});
  const auto b = train(s.x, s.y, tight, KernelSpec{});
  CHECK(std::abs(dual_objective(a, s.x, s.y, loose) - dual_objective(b, s.x, s.y, tight)) < 1e-3);
}

TEST_CASE("both working-set rules and any cache size agree") {
  const auto s = smooth_problem(200, 8);
  TrainConfig first;
  first.c = 8;
  first.tol = 1e-6;
  auto second = first;
  second.selection = WorkingSetSelection::second_order;
  auto small_cache = first;
  small_cache.cache_mb = 0.0;
  const auto a = train(s.x, s.y, first, KernelSpec{});
  const auto b = train(s.x, s.y, second, KernelSpec{});
  const auto c = train(s.x, s.y, small_cache, KernelSpec{});
  CHECK(std::abs(dual_objective(a, s.x, s.y, first) - dual_objective(b, s.x, s.y, first)) < 1e-6);
  CHECK(a.dual_coefs == c.dual_coefs);
  CHECK(a.bias == c.bias);
}

TEST_CASE("shrinking reaches the same optimum") {
  const auto s = smooth_problem(300, 12);
  for (double c : {1.0, 16.0}) {
    TrainConfig on;
    on.c = c;
    on.tol = 1e-5;
    auto off = on;
    off.shrinking = false;
    const auto a = train(s.x, s.y, on, KernelSpec{});
    const auto b = train(s.x, s.y, off, KernelSpec{});
    CHECK_FALSE(a.meta.hit_iteration_limit);
    CHECK(a.meta.kkt_violation <= on.tol);
    CHECK(kkt_violation(a, s.x, s.y, on) <= 10 * on.tol);
    const double oa = dual_objective(a, s.x, s.y, on), ob = dual_objective(b, s.x, s.y, on);
    CHECK(std::abs(oa - ob) <= 1e-6 * std::max(1.0, std::abs(ob)));
  }
}

TEST_CASE("warm start converges to the same optimum") {
  const auto s = smooth_problem(120, 6);
  TrainConfig cfg;
  cfg.c = 4;
  cfg.tol = 1e-6;
  const auto cold = train(s.x, s.y, cfg, KernelSpec{});
  const auto coef = expand_coefficients(cold, s.x);
  const auto warm = train(s.x, s.y, cfg, KernelSpec{}, coef);
  CHECK(warm.meta.iterations <= 1);
  CHECK(std::abs(dual_objective(warm, s.x, s.y, cfg) - dual_objective(cold, s.x, s.y, cfg)) < 1e-9);
  // A start off the equality constraint is ignored.
  std::vector<double> bad(s.y.size(), 0.0);
  bad[0] = 1.0;
  const auto ignored = train(s.x, s.y, cfg, KernelSpec{}, bad);
  CHECK(ignored.dual_coefs == cold.dual_coefs);
}

TEST_CASE("support-vector count shrinks as the tube widens") {
  int monotone = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto p = random_svr_problem(seed);
    p.cfg.tol = 1e-6;
    std::size_t last = p.x.rows() + 1;
    bool ok = true;
    for (double eps : {0.0, 0.05, 0.1, 0.2, 0.4}) {
      p.cfg.epsilon = eps;
      const auto count = train(p.x, p.y, p.cfg, p.kernel).sv_count();
      ok = ok && count <= last;
      last = count;
    }
    monotone += ok ? 1 : 0;
    ++total;
  }
  MESSAGE("support-vector count non-increasing in epsilon on " << monotone << " of " << total << " problems");
  CHECK(monotone > 0);
}

TEST_CASE("training is deterministic") {
  const auto s = smooth_problem(100, 5);
  const auto a = train(s.x, s.y, TrainConfig{}, KernelSpec{});
  const auto b = train(s.x, s.y, TrainConfig{}, KernelSpec{});
  CHECK(save_model(a) == save_model(b));
}

TEST_CASE("model files round-trip and detect corruption") {
  const auto s = smooth_problem(60, 7);
  auto m = train(s.x, s.y, TrainConfig{}, KernelSpec{.gamma = 0.3});
  const auto bytes = save_model(m);
  CHECK(bytes.rfind("magic=HELIOSVR\nversion=1\n", 0) == 0);
  const auto back = load_model(bytes);
  CHECK(predict(back, s.x) == predict(m, s.x));
  CHECK(save_model(back) == bytes);

  const auto truncated = bytes.substr(0, bytes.size() / 2);
  CHECK(code_of([&] { load_model(truncated); }) == ErrorCode::ChecksumMismatch);
  auto flipped = bytes;
  flipped[flipped.find("bias=") + 6] ^= 1;
  CHECK(code_of([&] { load_model(flipped); }) == ErrorCode::ChecksumMismatch);
  auto bumped = bytes;
  bumped.replace(bumped.find("version=1"), 9, "version=2");
  CHECK(code_of([&] { load_model(bumped); }) == ErrorCode::VersionUnsupported);
  CHECK(code_of([] { load_model("magic=OTHER\nversion=1\n"); }) == ErrorCode::BadMagic);
}
