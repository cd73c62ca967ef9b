#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "vipeg/errors.hpp"
#include "vipeg/vec.hpp"

namespace vipeg {

using ProxFn = std::function<Vec(const Vec&, double)>;
using ScalarFn = std::function<double(const Vec&)>;

struct FeasibleSetSpec {
  enum class Kind { Free, NonnegOrthant, ScaledSimplex };
  Kind kind = Kind::Free;
  double total = 1.0;  // simplex only: sum of coordinates
};

inline Vec project_nonneg(const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i], 0.0);
  return out;
}

// Euclidean projection onto {x >= 0, sum x_i = total} by the sort-and-threshold
// rule: find the largest k with u_(k) > (sum of k largest - total)/k, then
// shift everything down by that threshold and clip.
inline Vec project_scaled_simplex(const Vec& v, double total) {
  if (!(total > 0.0)) throw InvalidInputError("project_scaled_simplex: total must be positive");
  if (v.empty()) throw InvalidInputError("project_scaled_simplex: empty input");
  Vec u(v);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumsum += u[k];
    const double t = (cumsum - total) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0)
      theta = t;
    else
      break;
  }
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

inline Vec soft_threshold(const Vec& v, double tau) {
  if (tau < 0.0) throw InvalidInputError("soft_threshold: threshold must be nonnegative");
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - tau;
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
  return out;
}

struct L1Weight {
  double mu;
};

// prox_{lambda g} factories. For set indicators the prox is the projection and
// ignores lambda; for g = mu*||.||_1 it is soft thresholding at lambda*mu.
inline ProxFn prox_for(const FeasibleSetSpec& spec) {
  switch (spec.kind) {
    case FeasibleSetSpec::Kind::Free:
      return [](const Vec& v, double) { return v; };
    case FeasibleSetSpec::Kind::NonnegOrthant:
      return [](const Vec& v, double) { return project_nonneg(v); };
    case FeasibleSetSpec::Kind::ScaledSimplex: {
      if (!(spec.total > 0.0))
        throw InvalidInputError("prox_for: simplex total must be positive");
      const double total = spec.total;
      return [total](const Vec& v, double) { return project_scaled_simplex(v, total); };
    }
  }
  throw InvalidInputError("prox_for: unknown feasible-set kind");
}

inline ProxFn prox_for(const L1Weight& w) {
  if (!(w.mu >= 0.0) || !std::isfinite(w.mu))
    throw InvalidInputError("prox_for: l1 weight must be finite and nonnegative");
  const double mu = w.mu;
  return [mu](const Vec& v, double lambda) { return soft_threshold(v, lambda * mu); };
}

// Matching g evaluators. Indicators return 0 inside the set (within an
// absolute feasibility tolerance) and +infinity outside.
inline ScalarFn indicator_for(const FeasibleSetSpec& spec, double tol = 1e-8) {
  const double inf = std::numeric_limits<double>::infinity();
  switch (spec.kind) {
    case FeasibleSetSpec::Kind::Free:
      return [](const Vec&) { return 0.0; };
    case FeasibleSetSpec::Kind::NonnegOrthant:
      return [tol, inf](const Vec& x) {
        for (double v : x)
          if (v < -tol) return inf;
        return 0.0;
      };
    case FeasibleSetSpec::Kind::ScaledSimplex: {
      const double total = spec.total;
      return [total, tol, inf](const Vec& x) {
        double s = 0.0;
        for (double v : x) {
          if (v < -tol) return inf;
          s += v;
        }
        const double scale = std::max(1.0, std::abs(total));
        return std::abs(s - total) <= tol * scale ? 0.0 : inf;
      };
    }
  }
  throw InvalidInputError("indicator_for: unknown feasible-set kind");
}

inline ScalarFn l1_value(double mu) {
  return [mu](const Vec& x) { return mu * norm1(x); };
}

}  // namespace vipeg
