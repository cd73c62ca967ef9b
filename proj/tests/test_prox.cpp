#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"
#include "vipeg/prox.hpp"
#include "vipeg/rng.hpp"
#include "vipeg/vec.hpp"

using Catch::Approx;
using vipeg::Vec;

TEST_CASE("nonnegative projection clips the negative part") {
  CHECK(vipeg::project_nonneg(Vec{1.0, -2.0, 0.0, 3.5}) == Vec{1.0, 0.0, 0.0, 3.5});
}

TEST_CASE("simplex projection on hand-checked inputs") {
  // Uniform shortfall is spread evenly.
  const Vec p = vipeg::project_scaled_simplex(Vec{0.5, 0.5, 0.5, 0.5}, 4.0);
  for (double v : p) CHECK(v == Approx(1.0).margin(1e-14));
  // A point already on the simplex is fixed.
  const Vec q = vipeg::project_scaled_simplex(Vec{0.2, 0.3, 0.5}, 1.0);
  CHECK(q[0] == Approx(0.2).margin(1e-14));
  CHECK(q[1] == Approx(0.3).margin(1e-14));
  CHECK(q[2] == Approx(0.5).margin(1e-14));
  // Strongly dominated coordinate drops to zero.
  const Vec r = vipeg::project_scaled_simplex(Vec{10.0, -10.0}, 1.0);
  CHECK(r[0] == Approx(1.0).margin(1e-14));
  CHECK(r[1] == Approx(0.0).margin(1e-14));
}

TEST_CASE("simplex projection validates its inputs") {
  CHECK_THROWS_AS(vipeg::project_scaled_simplex(Vec{}, 1.0), vipeg::InvalidInputError);
  CHECK_THROWS_AS(vipeg::project_scaled_simplex(Vec{1.0}, 0.0), vipeg::InvalidInputError);
  CHECK_THROWS_AS(vipeg::project_scaled_simplex(Vec{1.0}, -2.0), vipeg::InvalidInputError);
}

TEST_CASE("simplex projection agrees with exhaustive support-set search") {
  vipeg::Rng rng(4242);
  for (int trial = 0; trial < 400; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(6));
    const double total = (trial % 3 == 0) ? 1.0 : (trial % 3 == 1 ? 2.5 : double(d));
    Vec v(d);
    for (auto& vi : v) vi = rng.uniform(-10.0, 10.0);
    const Vec fast = vipeg::project_scaled_simplex(v, total);
    const Vec brute = testsupport::simplex_projection_bruteforce(v, total);
    REQUIRE(fast.size() == brute.size());
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
      CHECK(std::abs(fast[i] - brute[i]) < 1e-9);
      CHECK(fast[i] >= -1e-15);
      sum += fast[i];
    }
    CHECK(sum == Approx(total).margin(1e-9));
  }
}

TEST_CASE("projections are idempotent") {
  vipeg::Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    Vec v(5);
    for (auto& vi : v) vi = rng.uniform(-3.0, 3.0);
    const Vec p1 = vipeg::project_scaled_simplex(v, 2.0);
    const Vec p2 = vipeg::project_scaled_simplex(p1, 2.0);
    CHECK(vipeg::dist2(p1, p2) < 1e-12);
    const Vec o1 = vipeg::project_nonneg(v);
    CHECK(vipeg::project_nonneg(o1) == o1);
  }
}

TEST_CASE("soft thresholding shrinks towards zero componentwise") {
  const Vec out = vipeg::soft_threshold(Vec{3.0, -0.5, 0.2, -4.0}, 1.0);
  CHECK(out[0] == Approx(2.0).margin(1e-15));
  CHECK(out[1] == Approx(0.0).margin(1e-15));
  CHECK(out[2] == Approx(0.0).margin(1e-15));
  CHECK(out[3] == Approx(-3.0).margin(1e-15));
}

TEST_CASE("weighted l1 proximal map scales the threshold by lambda") {
  auto prox = vipeg::prox_for(vipeg::L1Weight{0.5});
  const Vec out = prox(Vec{3.0, -0.2}, 2.0);  // threshold = 2.0 * 0.5 = 1.0
  CHECK(out[0] == Approx(2.0).margin(1e-15));
  CHECK(out[1] == Approx(0.0).margin(1e-15));
}

// The defining variational property of a proximal map p = prox_{lam g}(u):
// <u - p, y - p> <= lam * (g(y) - g(p)) for every y.
TEST_CASE("all shipped proximal maps satisfy the defining inequality") {
  vipeg::Rng rng(777);
  const double tol = 1e-9;

  SECTION("nonnegative orthant") {
    vipeg::FeasibleSetSpec set;
    set.kind = vipeg::FeasibleSetSpec::Kind::NonnegOrthant;
    auto prox = vipeg::prox_for(set);
    for (int trial = 0; trial < 200; ++trial) {
      Vec u(6), y(6);
      for (auto& x : u) x = rng.uniform(-5.0, 5.0);
      for (auto& x : y) x = std::abs(rng.uniform(-5.0, 5.0));
      const Vec p = prox(u, 1.0 + rng.uniform01());
      CHECK(vipeg::dot(vipeg::sub(u, p), vipeg::sub(y, p)) <= tol);
    }
  }

  SECTION("scaled simplex") {
    vipeg::FeasibleSetSpec set;
    set.kind = vipeg::FeasibleSetSpec::Kind::ScaledSimplex;
    set.total = 3.0;
    auto prox = vipeg::prox_for(set);
    for (int trial = 0; trial < 200; ++trial) {
      Vec u(5), raw(5);
      for (auto& x : u) x = rng.uniform(-5.0, 5.0);
      for (auto& x : raw) x = rng.uniform(-5.0, 5.0);
      const Vec y = vipeg::project_scaled_simplex(raw, set.total);
      const Vec p = prox(u, 0.5 + rng.uniform01());
      CHECK(vipeg::dot(vipeg::sub(u, p), vipeg::sub(y, p)) <= tol);
    }
  }

  SECTION("weighted l1") {
    const double mu = 0.7;
    auto prox = vipeg::prox_for(vipeg::L1Weight{mu});
    auto g = vipeg::l1_value(mu);
    for (int trial = 0; trial < 200; ++trial) {
      Vec u(6), y(6);
      for (auto& x : u) x = rng.uniform(-5.0, 5.0);
      for (auto& x : y) x = rng.uniform(-5.0, 5.0);
      const double lam = 0.3 + rng.uniform01();
      const Vec p = prox(u, lam);
      const double lhs = vipeg::dot(vipeg::sub(u, p), vipeg::sub(y, p));
      CHECK(lhs <= lam * (g(y) - g(p)) + tol);
    }
  }
}

TEST_CASE("indicator functions report feasibility") {
  vipeg::FeasibleSetSpec orthant;
  orthant.kind = vipeg::FeasibleSetSpec::Kind::NonnegOrthant;
  auto g_orthant = vipeg::indicator_for(orthant);
  CHECK(g_orthant(Vec{0.0, 1.0}) == 0.0);
  CHECK(std::isinf(g_orthant(Vec{-0.1, 1.0})));

  vipeg::FeasibleSetSpec simplex;
  simplex.kind = vipeg::FeasibleSetSpec::Kind::ScaledSimplex;
  simplex.total = 2.0;
  auto g_simplex = vipeg::indicator_for(simplex);
  CHECK(g_simplex(Vec{1.0, 1.0}) == 0.0);
  CHECK(std::isinf(g_simplex(Vec{2.0, 1.0})));
  CHECK(std::isinf(g_simplex(Vec{-0.5, 2.5})));

  vipeg::FeasibleSetSpec free_set;
  free_set.kind = vipeg::FeasibleSetSpec::Kind::Free;
  auto g_free = vipeg::indicator_for(free_set);
  CHECK(g_free(Vec{-100.0, 100.0}) == 0.0);
}

TEST_CASE("l1 value function sums absolute values with the weight") {
  auto g = vipeg::l1_value(0.25);
  CHECK(g(Vec{1.0, -3.0, 0.0}) == Approx(1.0).margin(1e-15));
}
