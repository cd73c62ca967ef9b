#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "vipeg/errors.hpp"
#include "vipeg/vec.hpp"

namespace vipeg {

// Extrapolation weights below (sqrt(5)-1)/2 make the step-size cap vanish.
inline const double kDeltaLowerBound = (std::sqrt(5.0) - 1.0) / 2.0;

inline void require_delta_in_domain(double delta, const char* where) {
  if (!(delta > kDeltaLowerBound))
    throw InvalidInputError(std::string(where) + ": delta must exceed (sqrt(5)-1)/2 ~= 0.618034, got " +
                            std::to_string(delta));
}

// Closed form for the largest admissible ratio alpha/1 of step-size slack at
// extrapolation weight delta:
//
//   kappa(delta) = max_{e1,e2>0} min{ e1 / (delta (e1^2 + e2 + 1)),
//                                     (delta^2+delta-1) e1 e2 / (delta^3 (1+e2)) }
//
// attained at e1 = sqrt(a+1), e2 = sqrt(a+1) - 1 with a = delta^2/(delta^2+delta-1),
// where both branches of the min coincide.
struct KappaParams {
  double delta;
  double a;
  double eps1;
  double eps2;

  explicit KappaParams(double delta_) : delta(delta_) {
    require_delta_in_domain(delta_, "KappaParams");
    a = delta * delta / (delta * delta + delta - 1.0);
    eps1 = std::sqrt(a + 1.0);
    eps2 = eps1 - 1.0;
  }
};

inline double kappa(double delta) {
  const KappaParams p(delta);
  const double s = std::sqrt(p.a + 1.0);
  return s / (delta * (p.a + 1.0 + s));
}

namespace detail {

inline double kappa_objective(double delta, double e1, double e2) {
  const double b1 = e1 / (delta * (e1 * e1 + e2 + 1.0));
  const double b2 = (delta * delta + delta - 1.0) * e1 * e2 / (delta * delta * delta * (1.0 + e2));
  return std::min(b1, b2);
}

}  // namespace detail

// Independent check of kappa(): coarse grid search over (0,10]^2 followed by
// two zoom passes around the incumbent. grid_size is the number of cells per
// axis and per pass.
inline double kappa_oracle(double delta, int grid_size = 400) {
  require_delta_in_domain(delta, "kappa_oracle");
  if (grid_size < 100) throw InvalidInputError("kappa_oracle: grid_size must be >= 100");

  double lo1 = 0.0, hi1 = 10.0, lo2 = 0.0, hi2 = 10.0;
  double best = -1.0, be1 = 1.0, be2 = 1.0;
  for (int pass = 0; pass < 3; ++pass) {
    const double step1 = (hi1 - lo1) / grid_size;
    const double step2 = (hi2 - lo2) / grid_size;
    for (int i = 1; i <= grid_size; ++i) {
      const double e1 = lo1 + i * step1;
      for (int j = 1; j <= grid_size; ++j) {
        const double e2 = lo2 + j * step2;
        const double v = detail::kappa_objective(delta, e1, e2);
        if (v > best) {
          best = v;
          be1 = e1;
          be2 = e2;
        }
      }
    }
    lo1 = std::max(0.0, be1 - 2.0 * step1);
    hi1 = std::min(10.0, be1 + 2.0 * step1);
    lo2 = std::max(0.0, be2 - 2.0 * step2);
    hi2 = std::min(10.0, be2 + 2.0 * step2);
  }
  return best;
}

struct StepCaps {
  double phi_factor;  // relaxation factor applied to the previous step
  double lambda_hat;  // hard upper bound
};

// Local-curvature prediction of the next step size. Without caps:
//   lambda = min{ lambda_prev, alpha ||y - y_prev|| / ||Fy - Fy_prev|| },
// with caps (the relaxed variant):
//   lambda = min{ phi * lambda_prev, alpha ||dy||/||dF||, lambda_hat }.
// A vanishing ||dF|| makes the quotient +infinity, i.e. no curvature cap.
inline double predict_lambda(double lambda_prev, double alpha, const Vec& y, const Vec& y_prev,
                             const Vec& fy, const Vec& fy_prev,
                             const std::optional<StepCaps>& caps = std::nullopt) {
  if (!(lambda_prev > 0.0)) throw InvalidInputError("predict_lambda: lambda_prev must be positive");
  if (!(alpha > 0.0)) throw InvalidInputError("predict_lambda: alpha must be positive");
  const double dy = dist2(y, y_prev);
  const double df = dist2(fy, fy_prev);
  const double quotient = df == 0.0 ? std::numeric_limits<double>::infinity() : alpha * dy / df;
  double lam;
  if (caps) {
    lam = std::min({caps->phi_factor * lambda_prev, quotient, caps->lambda_hat});
  } else {
    lam = std::min(lambda_prev, quotient);
  }
  return std::max(lam, std::numeric_limits<double>::min());
}

// Relaxation schedule: fully relaxed ((1+delta)/delta) up to n_hat, then a
// gentle descent toward 1, forced to exactly 1 from n_zero on.
inline double phi_schedule(int n, double delta, int n_hat = 500, int n_zero = 1000) {
  if (n < 0) throw InvalidInputError("phi_schedule: n must be nonnegative");
  if (!(delta > 0.0)) throw InvalidInputError("phi_schedule: delta must be positive");
  if (n >= n_zero) return 1.0;
  if (n <= n_hat) return (1.0 + delta) / delta;
  const double k = static_cast<double>(n - n_hat);
  return (1.0 + delta + k) / (delta + k);
}

// Correction tolerance: max{zeta_min, min{mu*||x - x_prev||, nu*||x1 - x0||}}.
// Callers must arrange 1 < mu <= nu and zeta_min > 0.
inline double zeta_bound(double step_norm, double ref_norm, double zeta_min, double mu, double nu) {
  return std::max(zeta_min, std::min(mu * step_norm, nu * ref_norm));
}

inline double zeta_update(const Vec& x, const Vec& x_prev, const Vec& x1, const Vec& x0,
                          double zeta_min, double mu, double nu) {
  return zeta_bound(dist2(x, x_prev), dist2(x1, x0), zeta_min, mu, nu);
}

}  // namespace vipeg
