#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <utility>

#include "vipeg/solvers.hpp"

namespace vipeg {

struct BaselineConfig {
  double beta = 0.7;    // line-search shrink factor
  double theta = 0.99;  // forward-backward-forward acceptance fraction
  double alpha_mpg = 0.41;
  double delta_mpg = 1.01;
  double lambda_init = 1.0;             // first line-search trial step
  std::optional<double> lambda_fixed;   // fixed-step override where applicable
  double epsilon = 1e-6;
  int max_iter = 100000;
  std::uint64_t seed = 12345;
  bool record_snapshots = false;

  void validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidInputError("BaselineConfig: beta must lie in ]0,1[");
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidInputError("BaselineConfig: theta must lie in ]0,1[");
    if (!(epsilon > 0.0)) throw InvalidInputError("BaselineConfig: epsilon must be positive");
    if (max_iter <= 0) throw InvalidInputError("BaselineConfig: max_iter must be positive");
    if (!(lambda_init > 0.0)) throw InvalidInputError("BaselineConfig: lambda_init must be positive");
    require_delta_in_domain(delta_mpg, "BaselineConfig");
    if (!(alpha_mpg > 0.0) || !(alpha_mpg < kappa(delta_mpg)))
      throw InvalidInputError("BaselineConfig: alpha_mpg must lie in ]0, kappa(delta_mpg)[");
    if (lambda_fixed && !(*lambda_fixed > 0.0))
      throw InvalidInputError("BaselineConfig: lambda_fixed must be positive");
  }
};

// Forward-backward-forward splitting with Armijo-type step search:
//   y = prox_{lambda g}(x - lambda F(x)),  accept lambda once
//   lambda ||F(x) - F(y)|| <= theta ||x - y||,  then  x+ = y + lambda (F(x) - F(y)).
// Each iteration restarts the search at 1.2x the last accepted step.
inline RunResult tfbf_solve(ProblemInstance& problem, const BaselineConfig& config, const Vec& x0) {
  config.validate();
  if (static_cast<int>(x0.size()) != problem.dim)
    throw InvalidInputError("tfbf_solve: x0 dimension mismatch");
  problem.reset_counters();
  const auto t0 = std::chrono::steady_clock::now();

  RunResult res;
  res.solver_name = "tfbf";
  const double diverge_bound = 1e12 * (1.0 + norm2(x0));

  Vec x = x0;
  double lam_accepted = config.lambda_init;
  res.status = Status::MaxIterReached;
  res.final_x = x;

  for (int n = 1; n <= config.max_iter; ++n) {
    const Vec fx = problem.F(x);
    double lam = n == 1 ? config.lambda_init : 1.2 * lam_accepted;
    int trials = 0;
    Vec y, fy;
    for (;;) {
      y = problem.prox(axpy_neg(x, lam, fx), lam);
      fy = problem.F(y);
      if (lam * dist2(fx, fy) <= config.theta * dist2(x, y)) break;
      if (trials >= kBacktrackCap)
        throw LinesearchError("tfbf_solve: no acceptable step after " +
                              std::to_string(kBacktrackCap) + " shrinks");
      lam *= config.beta;
      ++trials;
    }

    // fixed-point residual at the accepted step, checked before updating
    const double r = dist2(x, y);
    res.final_residual = r;
    if (is_stationary(r, x)) {
      res.status = Status::StationaryStop;
      res.final_x = std::move(x);
      break;
    }
    if (r < config.epsilon) {
      res.status = Status::Converged;
      res.final_x = std::move(x);
      break;
    }

    Vec x_next = extrapolate(y, lam, fx, fy);  // y + lambda (F(x) - F(y))
    res.trace.push_back({n, r, lam, trials, problem.num_f_calls, problem.num_prox_calls,
                         detail::elapsed_since(t0)});
    if (config.record_snapshots) res.iterate_snapshots.push_back(x_next);

    if (!all_finite(x_next) || norm2(x_next) > diverge_bound) {
      res.status = Status::Diverged;
      res.final_x = std::move(x_next);
      break;
    }
    x = std::move(x_next);
    lam_accepted = lam;
    res.final_x = x;
  }

  res.num_f_calls = problem.num_f_calls;
  res.num_prox_calls = problem.num_prox_calls;
  res.wall_time_s = detail::elapsed_since(t0);
  return res;
}

// Plain method with the monotone step-size prediction and no correction.
inline RunResult mpg_solve(ProblemInstance& problem, const BaselineConfig& config, const Vec& x0) {
  config.validate();
  SolverConfig sc;
  sc.delta = config.delta_mpg;
  sc.alpha = config.alpha_mpg;
  sc.epsilon = config.epsilon;
  sc.max_iter = config.max_iter;
  sc.seed = config.seed;
  sc.correction = false;
  sc.record_snapshots = config.record_snapshots;
  if (config.lambda_fixed) sc.lambda0 = Lambda0Explicit{*config.lambda_fixed};
  return detail::run_peg_family(problem, sc, x0, /*relaxed=*/false, "mpg");
}

// Fixed-step extragradient; needs a Lipschitz constant for the default step.
inline RunResult korpelevich_solve(ProblemInstance& problem, const BaselineConfig& config, const Vec& x0) {
  config.validate();
  if (static_cast<int>(x0.size()) != problem.dim)
    throw InvalidInputError("korpelevich_solve: x0 dimension mismatch");
  double lam;
  if (config.lambda_fixed) {
    lam = *config.lambda_fixed;
  } else {
    if (!problem.lipschitz)
      throw UnsupportedOperationError("korpelevich_solve: problem has no Lipschitz constant");
    lam = 0.9 / *problem.lipschitz;
  }
  if (problem.lipschitz && !(lam * *problem.lipschitz < 1.0))
    throw InvalidInputError("korpelevich_solve: step must stay below 1/L");

  problem.reset_counters();
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  res.solver_name = "korpelevich";
  const double diverge_bound = 1e12 * (1.0 + norm2(x0));

  Vec x = x0;
  res.status = Status::MaxIterReached;
  res.final_x = x;

  for (int n = 1; n <= config.max_iter; ++n) {
    const Vec fx = problem.F(x);
    const Vec y = problem.prox(axpy_neg(x, lam, fx), lam);
    const double r = dist2(x, y);
    res.final_residual = r;
    if (is_stationary(r, x)) {
      res.status = Status::StationaryStop;
      res.final_x = std::move(x);
      break;
    }
    if (r < config.epsilon) {
      res.status = Status::Converged;
      res.final_x = std::move(x);
      break;
    }
    const Vec fy = problem.F(y);
    Vec x_next = problem.prox(axpy_neg(x, lam, fy), lam);
    res.trace.push_back({n, r, lam, 0, problem.num_f_calls, problem.num_prox_calls,
                         detail::elapsed_since(t0)});
    if (config.record_snapshots) res.iterate_snapshots.push_back(x_next);

    if (!all_finite(x_next) || norm2(x_next) > diverge_bound) {
      res.status = Status::Diverged;
      res.final_x = std::move(x_next);
      break;
    }
    x = std::move(x_next);
    res.final_x = x;
  }

  res.num_f_calls = problem.num_f_calls;
  res.num_prox_calls = problem.num_prox_calls;
  res.wall_time_s = detail::elapsed_since(t0);
  return res;
}

// Accelerated proximal gradient with backtracking on the quadratic model.
// Requires f_eval (the smooth objective whose gradient is operator_eval);
// value-function calls are not tallied in num_f_calls, gradients are.
// The reported residual is the gradient-mapping norm ||x+ - z|| / lambda.
inline RunResult fista_solve(ProblemInstance& problem, const BaselineConfig& config, const Vec& x0) {
  config.validate();
  if (static_cast<int>(x0.size()) != problem.dim)
    throw InvalidInputError("fista_solve: x0 dimension mismatch");
  if (!problem.f_eval)
    throw UnsupportedOperationError("fista_solve: problem has no smooth objective evaluator");
  problem.reset_counters();
  const auto t0 = std::chrono::steady_clock::now();

  RunResult res;
  res.solver_name = "fista";
  const double diverge_bound = 1e12 * (1.0 + norm2(x0));
  const auto g_value = [&](const Vec& v) { return problem.g_eval ? problem.g_eval(v) : 0.0; };

  Vec x = x0;  // last prox output
  Vec z = x0;  // extrapolated point
  double t = 1.0;
  double lam = config.lambda_init;
  double phi_prev = std::numeric_limits<double>::infinity();
  int stall = 0;
  res.status = Status::MaxIterReached;
  res.final_x = x;

  for (int n = 1; n <= config.max_iter; ++n) {
    const double fz = problem.f_eval(z);
    const Vec grad = problem.F(z);
    int trials = 0;
    Vec x_cand;
    for (;;) {
      x_cand = problem.prox(axpy_neg(z, lam, grad), lam);
      const Vec dzx = sub(x_cand, z);
      const double model = fz + dot(grad, dzx) + dot(dzx, dzx) / (2.0 * lam);
      const double fc = problem.f_eval(x_cand);
      if (fc <= model + 1e-12 * (1.0 + std::abs(model))) break;
      if (trials >= kBacktrackCap)
        throw LinesearchError("fista_solve: no acceptable step after " +
                              std::to_string(kBacktrackCap) + " shrinks");
      lam *= config.beta;
      ++trials;
    }

    const double r = dist2(x_cand, z) / lam;
    res.trace.push_back({n, r, lam, trials, problem.num_f_calls, problem.num_prox_calls,
                         detail::elapsed_since(t0)});
    if (config.record_snapshots) res.iterate_snapshots.push_back(x_cand);
    res.final_residual = r;

    if (r < config.epsilon) {
      res.status = Status::Converged;
      res.final_x = std::move(x_cand);
      break;
    }
    const double phi = problem.f_eval(x_cand) + g_value(x_cand);
    if (std::abs(phi - phi_prev) <= 1e-15 * (1.0 + std::abs(phi)))
      ++stall;
    else
      stall = 0;
    phi_prev = phi;
    if (stall >= 20) {
      res.status = Status::StationaryStop;
      res.final_x = std::move(x_cand);
      break;
    }
    if (!all_finite(x_cand) || norm2(x_cand) > diverge_bound) {
      res.status = Status::Diverged;
      res.final_x = std::move(x_cand);
      break;
    }

    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    z = extrapolate(x_cand, (t - 1.0) / t_next, x_cand, x);
    x = std::move(x_cand);
    t = t_next;
    res.final_x = x;
  }

  res.num_f_calls = problem.num_f_calls;
  res.num_prox_calls = problem.num_prox_calls;
  res.wall_time_s = detail::elapsed_since(t0);
  return res;
}

}  // namespace vipeg
