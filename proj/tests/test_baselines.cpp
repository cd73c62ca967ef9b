#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"
#include "vipeg/baselines.hpp"
#include "vipeg/problems.hpp"

using Catch::Approx;
using vipeg::Status;
using vipeg::Vec;

namespace {

vipeg::ProblemInstance scalar_identity() {
  vipeg::ProblemInstance p;
  p.name = "scalar";
  p.dim = 1;
  p.operator_eval = [](const Vec& x) { return x; };
  p.prox_eval = [](const Vec& v, double) { return v; };
  p.g_eval = [](const Vec&) { return 0.0; };
  p.lipschitz = 1.0;
  return p;
}

struct DenseLasso {
  std::vector<Vec> A;
  Vec b;
  double mu;

  Vec multiply(const Vec& x) const {
    Vec out(A.size(), 0.0);
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t j = 0; j < x.size(); ++j) out[i] += A[i][j] * x[j];
    return out;
  }

  Vec gradient(const Vec& x) const {
    const Vec r = vipeg::sub(multiply(x), b);
    Vec g(x.size(), 0.0);
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) g[j] += A[i][j] * r[i];
    return g;
  }

  vipeg::ProblemInstance instance() const {
    vipeg::ProblemInstance p;
    p.name = "lasso-toy";
    p.dim = static_cast<int>(A[0].size());
    p.operator_eval = [self = *this](const Vec& x) { return self.gradient(x); };
    p.f_eval = [self = *this](const Vec& x) {
      const Vec r = vipeg::sub(self.multiply(x), self.b);
      return 0.5 * vipeg::dot(r, r);
    };
    p.prox_eval = vipeg::prox_for(vipeg::L1Weight{mu});
    p.g_eval = vipeg::l1_value(mu);
    return p;
  }
};

DenseLasso lasso_toy() {
  DenseLasso l;
  l.A = {{1.0, 0.5, -0.2},
         {0.0, 1.2, 0.3},
         {0.7, -0.4, 1.0},
         {-0.3, 0.8, 0.5},
         {0.2, 0.1, -1.1}};
  l.b = Vec{1.0, -0.5, 0.3, 0.8, -0.2};
  l.mu = 0.1;
  return l;
}

}  // namespace

TEST_CASE("forward-backward-forward line search on the scalar identity") {
  auto problem = scalar_identity();
  auto tally = testsupport::attach_tally(problem);
  vipeg::BaselineConfig config;
  const auto res = vipeg::tfbf_solve(problem, config, Vec{1.0});

  REQUIRE(res.status == Status::Converged);
  CHECK(std::abs(res.final_x[0]) < 1e-5);
  REQUIRE_FALSE(res.trace.empty());
  // First iteration: the unit trial step fails (1 > theta), one shrink to 0.7.
  CHECK(res.trace[0].lambda == Approx(0.7).margin(1e-15));
  CHECK(res.trace[0].backtracks == 1);
  CHECK(res.trace[0].residual == Approx(0.7).margin(1e-15));
  // The line search regrows lambda by 1.2x after accepted steps, so the
  // fixed-point residual may tick up on regrowth iterations; it never grows
  // by more than that factor and decays over any short window.
  for (size_t i = 0; i + 1 < res.trace.size(); ++i)
    CHECK(res.trace[i + 1].residual < 1.21 * res.trace[i].residual);
  for (size_t i = 0; i + 5 < res.trace.size(); ++i)
    CHECK(res.trace[i + 5].residual < res.trace[i].residual);
  CHECK(res.trace.back().residual < res.trace.front().residual);
  CHECK(res.num_f_calls == tally->f);
  CHECK(res.num_prox_calls == tally->prox);
}

TEST_CASE("forward-backward-forward detects a stationary start without iterating") {
  vipeg::ProblemInstance p;
  p.name = "shifted";
  p.dim = 1;
  p.operator_eval = [](const Vec& x) { return Vec{x[0] - 1.0}; };
  p.prox_eval = [](const Vec& v, double) { return v; };
  vipeg::BaselineConfig config;
  const auto res = vipeg::tfbf_solve(p, config, Vec{1.0});
  CHECK(res.status == Status::StationaryStop);
  CHECK(res.iterations() == 0);
  CHECK(res.trace.empty());
  CHECK(res.final_residual == 0.0);
  CHECK(res.final_x == Vec{1.0});
  CHECK(res.num_f_calls == 2);   // F(x) plus the line-search F(y)
  CHECK(res.num_prox_calls == 1);
}

TEST_CASE("forward-backward-forward solves the four-dimensional complementarity benchmark") {
  auto problem = vipeg::make_kojima_shindo();
  vipeg::BaselineConfig config;
  const auto res = vipeg::tfbf_solve(problem, config, Vec{0.0, 0.0, 0.0, 0.0});
  REQUIRE(res.status == Status::Converged);
  CHECK(res.iterations() >= 20);
  CHECK(res.iterations() <= 400);
}

TEST_CASE("fixed-step extragradient contracts linearly on the scalar identity") {
  auto problem = scalar_identity();
  vipeg::BaselineConfig config;  // lambda = 0.9 / L = 0.9
  const auto res = vipeg::korpelevich_solve(problem, config, Vec{1.0});
  REQUIRE(res.status == Status::Converged);
  REQUIRE(res.trace.size() >= 100);
  for (std::size_t i = 0; i + 1 < res.trace.size(); ++i) {
    CHECK(res.trace[i + 1].residual / res.trace[i].residual == Approx(0.91).margin(1e-9));
    CHECK(res.trace[i].lambda == Approx(0.9).margin(1e-15));
  }
  // Two operator and two prox evaluations per completed iteration, one of
  // each for the final residual check.
  CHECK(res.num_f_calls == 2 * res.trace.size() + 1);
  CHECK(res.num_prox_calls == 2 * res.trace.size() + 1);
}

TEST_CASE("fixed-step extragradient requires a usable step size") {
  auto problem = testsupport::spd_affine_problem({{3.0, 1.0}, {1.0, 2.0}}, Vec{0.3, 0.7});
  vipeg::BaselineConfig config;
  // No Lipschitz constant on the instance and no fixed step: unusable.
  CHECK_THROWS_AS(vipeg::korpelevich_solve(problem, config, Vec{0.0, 0.0}),
                  vipeg::UnsupportedOperationError);
  // A fixed step makes it run.
  config.lambda_fixed = 0.2;
  const auto res = vipeg::korpelevich_solve(problem, config, Vec{0.0, 0.0});
  REQUIRE(res.status == Status::Converged);
  CHECK(vipeg::dist2(res.final_x, Vec{0.3, 0.7}) < 1e-4);
  // A step at or above 1/L is rejected when L is known.
  auto scalar = scalar_identity();
  config.lambda_fixed = 1.2;
  CHECK_THROWS_AS(vipeg::korpelevich_solve(scalar, config, Vec{1.0}),
                  vipeg::InvalidInputError);
}

TEST_CASE("the monotone-step baseline equals the plain solver with correction off") {
  auto p1 = vipeg::make_kojima_shindo();
  vipeg::BaselineConfig bc;
  const auto mpg = vipeg::mpg_solve(p1, bc, Vec{0.0, 0.0, 0.0, 0.0});

  auto p2 = vipeg::make_kojima_shindo();
  vipeg::SolverConfig sc;
  sc.delta = bc.delta_mpg;
  sc.alpha = bc.alpha_mpg;
  sc.epsilon = bc.epsilon;
  sc.max_iter = bc.max_iter;
  sc.seed = bc.seed;
  sc.correction = false;
  const auto peg = vipeg::peg_solve(p2, sc, Vec{0.0, 0.0, 0.0, 0.0});

  CHECK(mpg.solver_name == "mpg");
  CHECK(peg.solver_name == "peg");
  CHECK(mpg.status == peg.status);
  REQUIRE(mpg.trace.size() == peg.trace.size());
  for (std::size_t i = 0; i < mpg.trace.size(); ++i) {
    CHECK(mpg.trace[i].residual == peg.trace[i].residual);
    CHECK(mpg.trace[i].lambda == peg.trace[i].lambda);
  }
  CHECK(mpg.final_x == peg.final_x);
}

TEST_CASE("accelerated proximal gradient solves the unit quadratic in two iterations") {
  vipeg::ProblemInstance p;
  p.name = "quadratic";
  p.dim = 1;
  p.operator_eval = [](const Vec& x) { return x; };
  p.f_eval = [](const Vec& x) { return 0.5 * x[0] * x[0]; };
  p.prox_eval = [](const Vec& v, double) { return v; };

  vipeg::BaselineConfig config;
  const auto res = vipeg::fista_solve(p, config, Vec{1.0});
  REQUIRE(res.status == Status::Converged);
  CHECK(res.iterations() == 2);
  CHECK(res.final_x == Vec{0.0});
  CHECK(res.trace[0].lambda == 1.0);
  CHECK(res.trace[0].backtracks == 0);
  CHECK(res.trace[0].residual == Approx(1.0).margin(1e-15));
}

TEST_CASE("accelerated proximal gradient backtracks to an admissible step") {
  // f(x) = 2 x^2 has curvature 4; the quadratic model accepts lambda <= 1/4,
  // reached after four shrinks by 0.7.
  vipeg::ProblemInstance p;
  p.name = "steep-quadratic";
  p.dim = 1;
  p.operator_eval = [](const Vec& x) { return Vec{4.0 * x[0]}; };
  p.f_eval = [](const Vec& x) { return 2.0 * x[0] * x[0]; };
  p.prox_eval = [](const Vec& v, double) { return v; };

  vipeg::BaselineConfig config;
  config.epsilon = 1e-9;
  const auto res = vipeg::fista_solve(p, config, Vec{1.0});
  REQUIRE(res.status == Status::Converged);
  CHECK(res.trace[0].backtracks == 4);
  CHECK(res.trace[0].lambda == Approx(std::pow(0.7, 4)).epsilon(1e-12));
  CHECK(std::abs(res.final_x[0]) < 1e-8);
}

TEST_CASE("accelerated proximal gradient reports objective stagnation") {
  // Consistent linear f with a g that cancels it: the objective is constant
  // while the gradient mapping never vanishes, so the stagnation guard must
  // fire after twenty flat iterations.
  vipeg::ProblemInstance p;
  p.name = "flat-objective";
  p.dim = 2;
  p.operator_eval = [](const Vec&) { return Vec{1.0, 1.0}; };
  p.f_eval = [](const Vec& x) { return x[0] + x[1]; };
  p.g_eval = [](const Vec& x) { return -(x[0] + x[1]); };
  p.prox_eval = [](const Vec& v, double) { return v; };

  vipeg::BaselineConfig config;
  const auto res = vipeg::fista_solve(p, config, Vec{0.0, 0.0});
  CHECK(res.status == Status::StationaryStop);
  CHECK(res.iterations() == 21);
}

TEST_CASE("accelerated proximal gradient reaches first-order optimality on a sparse fit") {
  const auto lasso = lasso_toy();
  auto problem = lasso.instance();
  vipeg::BaselineConfig config;
  config.epsilon = 1e-10;
  config.max_iter = 20000;
  const auto res = vipeg::fista_solve(problem, config, Vec{0.0, 0.0, 0.0});
  REQUIRE(vipeg::run_succeeded(res.status));

  const Vec grad = lasso.gradient(res.final_x);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (std::abs(res.final_x[i]) > 1e-10) {
      CHECK(std::abs(grad[i] + lasso.mu * (res.final_x[i] > 0 ? 1.0 : -1.0)) < 1e-7);
    } else {
      CHECK(std::abs(grad[i]) <= lasso.mu + 1e-7);
    }
  }
  // One gradient per iteration; value-function probes are not tallied.
  CHECK(res.num_f_calls == res.trace.size());
}

TEST_CASE("accelerated proximal gradient needs the smooth objective") {
  auto problem = testsupport::spd_affine_problem({{3.0, 1.0}, {1.0, 2.0}}, Vec{0.3, 0.7});
  vipeg::BaselineConfig config;
  CHECK_THROWS_AS(vipeg::fista_solve(problem, config, Vec{0.0, 0.0}),
                  vipeg::UnsupportedOperationError);
}

TEST_CASE("baseline configuration validation") {
  vipeg::BaselineConfig good;
  CHECK_NOTHROW(good.validate());
  vipeg::BaselineConfig c = good;
  c.beta = 1.0;
  CHECK_THROWS_AS(c.validate(), vipeg::InvalidInputError);
  c = good;
  c.theta = 0.0;
  CHECK_THROWS_AS(c.validate(), vipeg::InvalidInputError);
  c = good;
  c.lambda_init = 0.0;
  CHECK_THROWS_AS(c.validate(), vipeg::InvalidInputError);
  c = good;
  c.lambda_fixed = -0.5;
  CHECK_THROWS_AS(c.validate(), vipeg::InvalidInputError);
  c = good;
  c.alpha_mpg = 0.5;  // above kappa(1.01)
  CHECK_THROWS_AS(c.validate(), vipeg::InvalidInputError);
}
