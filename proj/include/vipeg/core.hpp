#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vipeg/errors.hpp"
#include "vipeg/prox.hpp"
#include "vipeg/rng.hpp"
#include "vipeg/stepsize.hpp"
#include "vipeg/vec.hpp"

namespace vipeg {

using OperatorFn = std::function<Vec(const Vec&)>;

// A variational-inequality instance: find x* with
//   <F(x*), y - x*> + g(y) - g(x*) >= 0  for all y.
// operator_eval is F, prox_eval is prox_{lambda g}. g_eval/f_eval are optional
// diagnostics (g value resp. smooth objective when F is a gradient).
// Evaluation counters live here so every solver shares one tally.
struct ProblemInstance {
  std::string name;
  int dim = 0;
  OperatorFn operator_eval;
  ProxFn prox_eval;
  ScalarFn g_eval;                  // empty if unavailable
  ScalarFn f_eval;                  // empty if unavailable
  std::optional<double> lipschitz;  // operator Lipschitz constant when known

  std::uint64_t num_f_calls = 0;
  std::uint64_t num_prox_calls = 0;

  Vec F(const Vec& x) {
    if (static_cast<int>(x.size()) != dim)
      throw InvalidInputError("ProblemInstance::F: point has dimension " +
                              std::to_string(x.size()) + ", expected " + std::to_string(dim));
    ++num_f_calls;
    return operator_eval(x);
  }

  Vec prox(const Vec& v, double lambda) {
    if (static_cast<int>(v.size()) != dim)
      throw InvalidInputError("ProblemInstance::prox: point has dimension " +
                              std::to_string(v.size()) + ", expected " + std::to_string(dim));
    ++num_prox_calls;
    return prox_eval(v, lambda);
  }

  void reset_counters() {
    num_f_calls = 0;
    num_prox_calls = 0;
  }
};

enum class Status { Converged, MaxIterReached, StationaryStop, Diverged };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::MaxIterReached: return "max-iter";
    case Status::StationaryStop: return "stationary";
    case Status::Diverged: return "diverged";
  }
  return "unknown";
}

inline std::optional<Status> status_from_string(const std::string& s) {
  if (s == "converged") return Status::Converged;
  if (s == "max-iter") return Status::MaxIterReached;
  if (s == "stationary") return Status::StationaryStop;
  if (s == "diverged") return Status::Diverged;
  return std::nullopt;
}

// How lambda_0 is chosen: a fixed positive value, or the two-point bootstrap
// lambda_0 = ||y_-1 - y_0|| / ||F(y_-1) - F(y_0)|| at a random perturbation y_-1.
struct Lambda0Explicit {
  double value = 1.0;
};
struct Lambda0Bootstrap {
  // perturbation scale; <= 0 means the default 1e-3 * (1 + ||y0||)
  double perturb_scale = 0.0;
};
using Lambda0Policy = std::variant<Lambda0Explicit, Lambda0Bootstrap>;

struct SolverConfig {
  double delta = 1.01;
  double alpha = 0.41;
  double gamma = 0.7;    // correction shrink factor
  double epsilon = 1e-6;
  int max_iter = 100000;

  // correction tolerance parameters, 1 < mu <= nu
  double zeta_min = 1e-6;
  double mu = 10.0;
  double nu = 10.0;

  // relaxed-variant controls
  double lambda_hat = 1e6;
  int n_hat = 500;
  int n_zero = 1000;

  Lambda0Policy lambda0 = Lambda0Bootstrap{};
  std::uint64_t seed = 12345;

  // std::nullopt: the algorithm's own rule (plain: correction iff delta < 1,
  // relaxed: always). Set to force it on or off.
  std::optional<bool> correction;

  bool record_snapshots = false;

  void validate() const {
    require_delta_in_domain(delta, "SolverConfig");
    if (!(alpha > 0.0) || !(alpha < kappa(delta)))
      throw InvalidInputError("SolverConfig: alpha must lie in ]0, kappa(delta)[ = ]0, " +
                              std::to_string(kappa(delta)) + "[, got " + std::to_string(alpha));
    if (!(gamma > 0.0) || !(gamma < 1.0))
      throw InvalidInputError("SolverConfig: gamma must lie in ]0,1[");
    if (!(epsilon > 0.0)) throw InvalidInputError("SolverConfig: epsilon must be positive");
    if (max_iter <= 0) throw InvalidInputError("SolverConfig: max_iter must be positive");
    if (!(zeta_min > 0.0)) throw InvalidInputError("SolverConfig: zeta_min must be positive");
    if (!(mu > 1.0) || !(nu >= mu))
      throw InvalidInputError("SolverConfig: need 1 < mu <= nu");
    if (!(lambda_hat > 0.0)) throw InvalidInputError("SolverConfig: lambda_hat must be positive");
    if (n_hat < 0 || n_zero < n_hat)
      throw InvalidInputError("SolverConfig: need 0 <= n_hat <= n_zero");
    if (const auto* fixed = std::get_if<Lambda0Explicit>(&lambda0)) {
      if (!(fixed->value > 0.0))
        throw InvalidInputError("SolverConfig: explicit lambda0 must be positive");
    }
  }
};

struct IterationRecord {
  int iter = 0;              // 1-based iteration index
  double residual = 0.0;     // ||x_{n+1} - y_n|| + ||x_n - y_n||
  double lambda = 0.0;       // accepted step size
  int backtracks = 0;        // correction / line-search shrinks this iteration
  std::uint64_t f_calls = 0;     // cumulative operator evaluations
  std::uint64_t prox_calls = 0;  // cumulative prox evaluations
  double elapsed_s = 0.0;        // seconds since the run started
};

struct RunResult {
  Status status = Status::MaxIterReached;
  std::string solver_name;
  Vec final_x;
  double final_residual = std::numeric_limits<double>::infinity();
  double lambda0 = 0.0;
  std::vector<IterationRecord> trace;
  std::uint64_t num_f_calls = 0;
  std::uint64_t num_prox_calls = 0;
  double wall_time_s = 0.0;

  // filled only when SolverConfig::record_snapshots: snapshot i belongs to
  // trace[i], i.e. iterate_snapshots[i] = x_{i+2} is off by the step-0 pair,
  // which is kept separately below.
  std::vector<Vec> iterate_snapshots;  // x_{n+1} for n = 1, 2, ...
  std::vector<Vec> y_snapshots;        // y_n for n = 1, 2, ...
  Vec x0_snapshot;
  Vec x1_snapshot;

  int iterations() const { return static_cast<int>(trace.size()); }
};

// r = ||x_next - y|| + ||x - y||
inline double residual(const Vec& x_next, const Vec& x, const Vec& y) {
  require_same_dim(x_next, y, "residual");
  require_same_dim(x, y, "residual");
  return dist2(x_next, y) + dist2(x, y);
}

// Duality-gap-style merit <F(x), y - x> + g(y) - g(x); +infinity when y is
// infeasible, invalid-input when x itself is outside dom g.
inline double gap_function(ProblemInstance& problem, const Vec& x, const Vec& y) {
  if (!problem.g_eval)
    throw UnsupportedOperationError("gap_function: problem has no g evaluator");
  require_same_dim(x, y, "gap_function");
  const double gy = problem.g_eval(y);
  if (std::isinf(gy)) return std::numeric_limits<double>::infinity();
  const double gx = problem.g_eval(x);
  if (!std::isfinite(gx))
    throw InvalidInputError("gap_function: reference point lies outside dom g");
  const Vec fx = problem.F(x);
  return dot(fx, sub(y, x)) + gy - gx;
}

inline double default_perturb_scale(const Vec& y0) { return 1e-3 * (1.0 + norm2(y0)); }

namespace detail {

// Bootstrap lambda_0 from a random two-point curvature probe; also hands back
// F(y0) so the caller can reuse it for the step-0 prox.
inline double bootstrap_lambda0(ProblemInstance& problem, const Vec& y0, double perturb_scale,
                                Rng& rng, Vec* fy0_out) {
  const Vec fy0 = problem.F(y0);
  if (fy0_out) *fy0_out = fy0;
  const double scale = perturb_scale > 0.0 ? perturb_scale : default_perturb_scale(y0);
  for (int attempt = 0; attempt < 9; ++attempt) {
    Vec ym(y0.size());
    for (std::size_t i = 0; i < y0.size(); ++i) ym[i] = y0[i] + scale * rng.uniform(-1.0, 1.0);
    const Vec fym = problem.F(ym);
    const double df = dist2(fym, fy0);
    const double dy = dist2(ym, y0);
    if (df > 0.0 && dy > 0.0) {
      const double lam = dy / df;
      if (std::isfinite(lam) && lam > 0.0) return lam;
    }
  }
  return 1.0;  // locally constant operator: any positive step works
}

}  // namespace detail

inline double init_lambda0(ProblemInstance& problem, const Vec& y0, double perturb_scale, Rng& rng) {
  if (static_cast<int>(y0.size()) != problem.dim)
    throw InvalidInputError("init_lambda0: y0 dimension mismatch");
  return detail::bootstrap_lambda0(problem, y0, perturb_scale, rng, nullptr);
}

}  // namespace vipeg
