#pragma once

#include <chrono>
#include <optional>
#include <utility>

#include "vipeg/core.hpp"

namespace vipeg {

inline constexpr int kBacktrackCap = 200;

// Numerical stand-in for the exact stop x_{n+1} = x_n = y_n.
inline bool is_stationary(double res, const Vec& x) { return res < 1e-14 * (1.0 + norm2(x)); }

struct CorrectionResult {
  Vec x_next;
  double lambda;
  int backtracks;
};

// Shrink lambda by gamma until the prox step stays within the tolerance zeta.
// Reuses the already-computed F(y): every retry costs one prox and no
// operator evaluation.
inline CorrectionResult correction_step(ProblemInstance& problem, const Vec& x, const Vec& fy,
                                        double lambda, double zeta, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw InvalidInputError("correction_step: gamma must lie in ]0,1[");
  if (!(lambda > 0.0)) throw InvalidInputError("correction_step: lambda must be positive");
  int backtracks = 0;
  for (;;) {
    Vec x_next = problem.prox(axpy_neg(x, lambda, fy), lambda);
    if (dist2(x_next, x) <= zeta) return {std::move(x_next), lambda, backtracks};
    if (backtracks >= kBacktrackCap)
      throw CorrectionError("correction_step: no acceptance after " +
                            std::to_string(kBacktrackCap) + " shrinks");
    lambda *= gamma;
    ++backtracks;
  }
}

namespace detail {

inline double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// One loop serves both variants. The plain method keeps lambda nonincreasing
// and corrects only for delta < 1; the relaxed one lets lambda grow by the
// phi schedule under the lambda_hat cap and always corrects. A config
// override can force correction either way.
inline RunResult run_peg_family(ProblemInstance& problem, const SolverConfig& config, const Vec& x0,
                                bool relaxed, const char* name) {
  config.validate();
  if (static_cast<int>(x0.size()) != problem.dim)
    throw InvalidInputError("solve: x0 dimension mismatch");
  problem.reset_counters();
  Rng rng(config.seed);
  const auto t0 = std::chrono::steady_clock::now();

  RunResult res;
  res.solver_name = name;

  // Step 0: y_0 = x_0, x_1 = prox_{lambda_0 g}(x_0 - lambda_0 F(x_0)).
  Vec fy0;
  double lambda0;
  if (const auto* fixed = std::get_if<Lambda0Explicit>(&config.lambda0)) {
    lambda0 = fixed->value;
    fy0 = problem.F(x0);
  } else {
    const auto& boot = std::get<Lambda0Bootstrap>(config.lambda0);
    lambda0 = bootstrap_lambda0(problem, x0, boot.perturb_scale, rng, &fy0);
  }
  res.lambda0 = lambda0;
  Vec x1 = problem.prox(axpy_neg(x0, lambda0, fy0), lambda0);

  if (config.record_snapshots) {
    res.x0_snapshot = x0;
    res.x1_snapshot = x1;
  }

  const double ref_norm = dist2(x1, x0);  // ||x_1 - x_0||, caps zeta for good
  const double diverge_bound = 1e12 * (1.0 + norm2(x0));
  const bool correction_on = config.correction ? *config.correction
                                               : (relaxed ? true : config.delta < 1.0);

  Vec x_prev = x0;
  Vec x = std::move(x1);
  Vec y_prev = x0;        // y_0 = x_0
  Vec fy_prev = std::move(fy0);
  double lambda_prev = lambda0;

  res.status = Status::MaxIterReached;
  res.final_x = x;

  for (int n = 1; n <= config.max_iter; ++n) {
    Vec y = extrapolate(x, config.delta, x, x_prev);
    Vec fy = problem.F(y);

    std::optional<StepCaps> caps;
    if (relaxed)
      caps = StepCaps{phi_schedule(n - 1, config.delta, config.n_hat, config.n_zero),
                      config.lambda_hat};
    double lambda = predict_lambda(lambda_prev, config.alpha, y, y_prev, fy, fy_prev, caps);

    Vec x_next;
    int backtracks = 0;
    if (correction_on) {
      const double zeta = zeta_bound(dist2(x, x_prev), ref_norm, config.zeta_min, config.mu, config.nu);
      CorrectionResult corr = correction_step(problem, x, fy, lambda, zeta, config.gamma);
      x_next = std::move(corr.x_next);
      lambda = corr.lambda;
      backtracks = corr.backtracks;
    } else {
      x_next = problem.prox(axpy_neg(x, lambda, fy), lambda);
    }

    const double r = residual(x_next, x, y);
    res.trace.push_back({n, r, lambda, backtracks, problem.num_f_calls, problem.num_prox_calls,
                         elapsed_since(t0)});
    if (config.record_snapshots) {
      res.y_snapshots.push_back(y);
      res.iterate_snapshots.push_back(x_next);
    }
    res.final_residual = r;

    if (is_stationary(r, x)) {
      res.status = Status::StationaryStop;
      res.final_x = std::move(x_next);
      break;
    }
    if (r < config.epsilon) {
      res.status = Status::Converged;
      res.final_x = std::move(x_next);
      break;
    }
    if (!all_finite(x_next) || norm2(x_next) > diverge_bound) {
      res.status = Status::Diverged;
      res.final_x = std::move(x_next);
      break;
    }

    x_prev = std::move(x);
    x = std::move(x_next);
    y_prev = std::move(y);
    fy_prev = std::move(fy);
    lambda_prev = lambda;
    res.final_x = x;
  }

  res.num_f_calls = problem.num_f_calls;
  res.num_prox_calls = problem.num_prox_calls;
  res.wall_time_s = elapsed_since(t0);
  return res;
}

}  // namespace detail

inline RunResult peg_solve(ProblemInstance& problem, const SolverConfig& config, const Vec& x0) {
  return detail::run_peg_family(problem, config, x0, /*relaxed=*/false, "peg");
}

inline RunResult ipeg_solve(ProblemInstance& problem, const SolverConfig& config, const Vec& x0) {
  return detail::run_peg_family(problem, config, x0, /*relaxed=*/true, "ipeg");
}

struct ErgodicIterate {
  Vec x_hat;
  double lambda_hat;  // total weight sum_{l=n1+1}^{j} lambda_l + (1+delta) lambda_n1
};

// Weighted running average
//   x_hat_j = ( sum_{l=n1+1}^{j} lambda_l y_l + (1+delta) lambda_n1 x_n1 ) / lambda_hat_j,
// which collapses to a convex combination of the prox outputs x_l, so it
// stays in dom g. Arrays use absolute indexing: lambdas[l] and ys[l] must be
// valid for l in [n1, j].
inline ErgodicIterate ergodic_iterate(const std::vector<double>& lambdas, const std::vector<Vec>& ys,
                                      const Vec& x_n1, double lambda_n1, double delta, int n1, int j) {
  if (n1 < 0 || j <= n1) throw InvalidInputError("ergodic_iterate: need 0 <= n1 < j");
  if (static_cast<std::size_t>(j) >= ys.size() || static_cast<std::size_t>(j) >= lambdas.size())
    throw InvalidInputError("ergodic_iterate: trace arrays do not cover index j");
  if (!(lambda_n1 > 0.0)) throw InvalidInputError("ergodic_iterate: lambda_n1 must be positive");

  const double w0 = (1.0 + delta) * lambda_n1;
  double weight = w0;
  Vec acc = scaled(x_n1, w0);
  for (int l = n1 + 1; l <= j; ++l) {
    const double w = lambdas[l];
    if (!(w > 0.0)) throw InvalidInputError("ergodic_iterate: nonpositive lambda in trace");
    require_same_dim(ys[l], acc, "ergodic_iterate");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * ys[l][i];
    weight += w;
  }
  for (auto& v : acc) v /= weight;
  return {std::move(acc), weight};
}

// Same average assembled from a snapshot-recording run: lambda_l comes from
// the trace (lambda_0 from the bootstrap), y_l and x_n1 from the snapshots.
inline ErgodicIterate ergodic_from_result(const RunResult& res, double delta, int n1, int j) {
  if (res.y_snapshots.empty())
    throw UnsupportedOperationError("ergodic_from_result: run recorded no snapshots");
  if (n1 < 0 || j <= n1 || static_cast<std::size_t>(j) > res.trace.size())
    throw InvalidInputError("ergodic_from_result: need 0 <= n1 < j <= iterations");

  const auto lambda_at = [&](int l) { return l == 0 ? res.lambda0 : res.trace[l - 1].lambda; };
  const Vec& x_n1 = n1 == 0   ? res.x0_snapshot
                    : n1 == 1 ? res.x1_snapshot
                              : res.iterate_snapshots[n1 - 2];

  const double w0 = (1.0 + delta) * lambda_at(n1);
  double weight = w0;
  Vec acc = scaled(x_n1, w0);
  for (int l = n1 + 1; l <= j; ++l) {
    const double w = lambda_at(l);
    const Vec& y = res.y_snapshots[l - 1];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * y[i];
    weight += w;
  }
  for (auto& v : acc) v /= weight;
  return {std::move(acc), weight};
}

}  // namespace vipeg
