#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "vipeg/vipeg.hpp"

namespace testsupport {

using vipeg::ProblemInstance;
using vipeg::Vec;

// Exhaustive projection onto {x >= 0, sum = total}: try every support set,
// solve the equality-constrained least squares on it, keep the feasible
// candidate closest to v. Exponential in dim, fine for dim <= 6.
inline Vec simplex_projection_bruteforce(const Vec& v, double total) {
  const int d = static_cast<int>(v.size());
  Vec best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) {
        sum += v[i];
        ++count;
      }
    const double theta = (sum - total) / count;
    Vec cand(d, 0.0);
    bool feasible = true;
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) {
        cand[i] = v[i] - theta;
        if (cand[i] < -1e-12) {
          feasible = false;
          break;
        }
      }
    if (!feasible) continue;
    double dist = 0.0;
    for (int i = 0; i < d; ++i) {
      const double diff = cand[i] - v[i];
      dist += diff * diff;
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = cand;
    }
  }
  return best;
}

// Central finite differences of a scalar function.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-5) {
  Vec g(x.size());
  Vec xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = h * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + step;
    xm[i] = x[i] - step;
    g[i] = (f(xp) - f(xm)) / (2.0 * step);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

// Dense-matrix reference for the tridiagonal-plus-separable operator: builds
// E explicitly instead of using the stencil sweep.
inline Vec sun_operator_reference(const Vec& x) {
  const int d = static_cast<int>(x.size());
  std::vector<double> E(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    E[i * d + i] = 4.0;
    if (i > 0) E[i * d + i - 1] = 1.0;
    if (i + 1 < d) E[i * d + i + 1] = -2.0;
  }
  Vec out(d);
  for (int i = 0; i < d; ++i) {
    const double xm = i > 0 ? x[i - 1] : 0.0;
    const double xp = i + 1 < d ? x[i + 1] : 0.0;
    double row = 0.0;
    for (int j = 0; j < d; ++j) row += E[i * d + j] * x[j];
    out[i] = xm * xm + x[i] * x[i] + xm * x[i] + x[i] * xp + row - 1.0;
  }
  return out;
}

inline ProblemInstance identity_operator_problem(int dim) {
  ProblemInstance p;
  p.name = "identity";
  p.dim = dim;
  p.operator_eval = [](const Vec& x) { return x; };
  p.prox_eval = [](const Vec& v, double) { return v; };
  p.g_eval = [](const Vec&) { return 0.0; };
  p.lipschitz = 1.0;
  return p;
}

inline ProblemInstance zero_operator_on_orthant(int dim) {
  vipeg::FeasibleSetSpec set;
  set.kind = vipeg::FeasibleSetSpec::Kind::NonnegOrthant;
  ProblemInstance p;
  p.name = "zero-orthant";
  p.dim = dim;
  p.operator_eval = [dim](const Vec&) { return Vec(dim, 0.0); };
  p.prox_eval = vipeg::prox_for(set);
  p.g_eval = vipeg::indicator_for(set);
  p.lipschitz = 0.0;
  return p;
}

// F(x) = A (x - shift) for symmetric positive definite A; solution of the
// unconstrained problem is x = shift.
inline ProblemInstance spd_affine_problem(const std::vector<Vec>& A, const Vec& shift) {
  const int d = static_cast<int>(shift.size());
  ProblemInstance p;
  p.name = "spd-affine";
  p.dim = d;
  p.operator_eval = [A, shift, d](const Vec& x) {
    Vec out(d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out[i] += A[i][j] * (x[j] - shift[j]);
    return out;
  };
  p.prox_eval = [](const Vec& v, double) { return v; };
  p.g_eval = [](const Vec&) { return 0.0; };
  return p;
}

struct CallTally {
  std::uint64_t f = 0;
  std::uint64_t prox = 0;
};

// Wrap a problem's callbacks with an external tally, to cross-check the
// instance counters with an independent instrument.
inline std::shared_ptr<CallTally> attach_tally(ProblemInstance& p) {
  auto tally = std::make_shared<CallTally>();
  auto op = p.operator_eval;
  p.operator_eval = [op, tally](const Vec& x) {
    ++tally->f;
    return op(x);
  };
  auto pr = p.prox_eval;
  p.prox_eval = [pr, tally](const Vec& v, double lam) {
    ++tally->prox;
    return pr(v, lam);
  };
  return tally;
}

inline double slope_loglog(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [x, y] : pts) {
    if (!(x > 0.0) || !(y > 0.0)) continue;
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testsupport
