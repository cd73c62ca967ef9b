#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "vipeg/core.hpp"

namespace vipeg {

// Compressed-sparse-row matrix, just big enough for the dataset problems.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;  // size rows + 1
  std::vector<int> col_idx;
  std::vector<double> values;

  using Triplet = std::tuple<int, int, double>;

  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> trips) {
    if (rows < 0 || cols < 0) throw InvalidInputError("SparseMatrix: negative shape");
    for (const auto& [r, c, v] : trips) {
      if (r < 0 || r >= rows || c < 0 || c >= cols)
        throw InvalidInputError("SparseMatrix: entry (" + std::to_string(r) + "," +
                                std::to_string(c) + ") outside " + std::to_string(rows) + "x" +
                                std::to_string(cols));
      if (!std::isfinite(v)) throw InvalidInputError("SparseMatrix: non-finite entry value");
    }
    std::sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    for (std::size_t k = 1; k < trips.size(); ++k) {
      if (std::get<0>(trips[k]) == std::get<0>(trips[k - 1]) &&
          std::get<1>(trips[k]) == std::get<1>(trips[k - 1]))
        throw InvalidInputError("SparseMatrix: duplicate entry at (" +
                                std::to_string(std::get<0>(trips[k])) + "," +
                                std::to_string(std::get<1>(trips[k])) + ")");
    }
    SparseMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    m.col_idx.reserve(trips.size());
    m.values.reserve(trips.size());
    for (const auto& [r, c, v] : trips) {
      ++m.row_ptr[r + 1];
      m.col_idx.push_back(c);
      m.values.push_back(v);
    }
    for (int r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
  }

  std::size_t nnz() const { return values.size(); }

  Vec multiply(const Vec& x) const {
    if (static_cast<int>(x.size()) != cols)
      throw InvalidInputError("SparseMatrix::multiply: dimension mismatch");
    Vec out(rows, 0.0);
    for (int r = 0; r < rows; ++r)
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) out[r] += values[k] * x[col_idx[k]];
    return out;
  }

  Vec multiply_transpose(const Vec& u) const {
    if (static_cast<int>(u.size()) != rows)
      throw InvalidInputError("SparseMatrix::multiply_transpose: dimension mismatch");
    Vec out(cols, 0.0);
    for (int r = 0; r < rows; ++r)
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) out[col_idx[k]] += values[k] * u[r];
    return out;
  }

  std::vector<Triplet> entries() const {
    std::vector<Triplet> out;
    out.reserve(values.size());
    for (int r = 0; r < rows; ++r)
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) out.emplace_back(r, col_idx[k], values[k]);
    return out;
  }
};

struct DatasetFixture {
  SparseMatrix features;    // m x n
  std::vector<int> labels;  // entries in {-1, +1}, one per row
};

namespace detail {

inline double parse_double_token(std::string_view tok, const char* what, int line_no) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError("line " + std::to_string(line_no) + ": malformed " + what + " '" +
                     std::string(tok) + "'");
  return v;
}

inline int parse_index_token(std::string_view tok, int line_no) {
  int v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size() || v < 1)
    throw ParseError("line " + std::to_string(line_no) + ": feature index must be a positive integer, got '" +
                     std::string(tok) + "'");
  return v;
}

}  // namespace detail

// svmlight-style text: one sample per line, "label idx:val idx:val ...",
// 1-based indices, '#' starts a comment. Duplicate indices within a line keep
// the last value and bump *duplicate_warnings.
inline DatasetFixture parse_sparse_dataset(std::string_view text, int* duplicate_warnings = nullptr) {
  if (duplicate_warnings) *duplicate_warnings = 0;
  std::vector<SparseMatrix::Triplet> trips;
  std::vector<int> labels;
  int max_col = 0;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
      if (j > i) toks.push_back(line.substr(i, j - i));
      i = j;
    }
    if (toks.empty()) continue;

    const double raw_label = detail::parse_double_token(toks[0], "label", line_no);
    const int row = static_cast<int>(labels.size());
    labels.push_back(raw_label > 0.0 ? 1 : -1);

    std::vector<std::pair<int, double>> feats;
    for (std::size_t t = 1; t < toks.size(); ++t) {
      const auto colon = toks[t].find(':');
      if (colon == std::string_view::npos)
        throw ParseError("line " + std::to_string(line_no) + ": expected idx:value, got '" +
                         std::string(toks[t]) + "'");
      const int idx = detail::parse_index_token(toks[t].substr(0, colon), line_no);
      const double val = detail::parse_double_token(toks[t].substr(colon + 1), "feature value", line_no);
      bool replaced = false;
      for (auto& [c, v] : feats) {
        if (c == idx) {
          v = val;  // last occurrence wins
          replaced = true;
          if (duplicate_warnings) ++*duplicate_warnings;
          break;
        }
      }
      if (!replaced) feats.emplace_back(idx, val);
      max_col = std::max(max_col, idx);
    }
    for (const auto& [c, v] : feats) trips.emplace_back(row, c - 1, v);
  }
  DatasetFixture out;
  out.labels = std::move(labels);
  out.features = SparseMatrix::from_triplets(static_cast<int>(out.labels.size()), max_col,
                                             std::move(trips));
  return out;
}

// Canonical inverse of parse_sparse_dataset: "+1"/"-1" labels, ascending
// 1-based indices, shortest round-trip value formatting.
inline std::string serialize_dataset(const DatasetFixture& data) {
  if (data.labels.size() != static_cast<std::size_t>(data.features.rows))
    throw InvalidInputError("serialize_dataset: label count differs from row count");
  std::string out;
  char buf[64];
  for (int r = 0; r < data.features.rows; ++r) {
    out += data.labels[r] > 0 ? "+1" : "-1";
    for (int k = data.features.row_ptr[r]; k < data.features.row_ptr[r + 1]; ++k) {
      out += ' ';
      out += std::to_string(data.features.col_idx[k] + 1);
      out += ':';
      const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, data.features.values[k]);
      (void)ec;
      out.append(buf, p);
    }
    out += '\n';
  }
  return out;
}

// Largest eigenvalue of a symmetric positive-semidefinite operator by power
// iteration, run to a tight relative tolerance and nudged up by 1e-9 so the
// result can be treated as an upper bound on downstream uses.
inline double power_iteration_eig(const std::function<Vec(const Vec&)>& apply, int dim,
                                  std::uint64_t seed = 9001, int max_iters = 5000) {
  if (dim <= 0) throw InvalidInputError("power_iteration_eig: dim must be positive");
  Rng rng(seed);
  Vec v = rng.uniform_vec(dim, -1.0, 1.0);
  double nv = norm2(v);
  if (nv == 0.0) v[0] = nv = 1.0;
  for (auto& c : v) c /= nv;
  double eig = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vec w = apply(v);
    const double ray = dot(v, w);
    const double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] /= nw;
    v = std::move(w);
    if (it > 0 && std::abs(ray - eig) <= 1e-13 * std::max(1.0, std::abs(ray))) {
      eig = ray;
      break;
    }
    eig = ray;
  }
  return eig * (1.0 + 1e-9);
}

// ---- problem family 1: tridiagonal-plus-separable operator on orthant/simplex

// F_i(x) = (x_{i-1}^2 + x_i^2 + x_{i-1} x_i + x_i x_{i+1})
//          + (4 x_i + x_{i-1} - 2 x_{i+1}) - 1,    x_0 = x_{d+1} = 0,
// evaluated with an O(d) stencil sweep.
inline ProblemInstance make_sun_problem(int d, FeasibleSetSpec::Kind set_kind) {
  if (d < 1) throw InvalidInputError("make_sun_problem: d must be >= 1");
  if (set_kind == FeasibleSetSpec::Kind::Free)
    throw InvalidInputError("make_sun_problem: feasible set must be the orthant or the simplex");
  FeasibleSetSpec set;
  set.kind = set_kind;
  set.total = static_cast<double>(d);

  ProblemInstance p;
  p.name = std::string("sun-") +
           (set_kind == FeasibleSetSpec::Kind::NonnegOrthant ? "orthant" : "simplex") + "-d" +
           std::to_string(d);
  p.dim = d;
  p.operator_eval = [d](const Vec& x) {
    Vec out(d);
    for (int i = 0; i < d; ++i) {
      const double xm = i > 0 ? x[i - 1] : 0.0;
      const double xp = i + 1 < d ? x[i + 1] : 0.0;
      const double gi = xm * xm + x[i] * x[i] + xm * x[i] + x[i] * xp;
      const double ei = 4.0 * x[i] + xm - 2.0 * xp;
      out[i] = gi + ei - 1.0;
    }
    return out;
  };
  p.prox_eval = prox_for(set);
  p.g_eval = indicator_for(set);
  return p;
}

// ---- problem family 2: four-dimensional polynomial complementarity problem

inline ProblemInstance make_kojima_shindo() {
  ProblemInstance p;
  p.name = "kojima-shindo";
  p.dim = 4;
  p.operator_eval = [](const Vec& x) {
    const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3];
    return Vec{
        3.0 * x1 * x1 + 2.0 * x1 * x2 + 2.0 * x2 * x2 + x3 + 3.0 * x4 - 6.0,
        2.0 * x1 * x1 + x1 + x2 * x2 + 10.0 * x3 + 2.0 * x4 - 2.0,
        3.0 * x1 * x1 + x1 * x2 + 2.0 * x2 * x2 + 2.0 * x3 + 9.0 * x4 - 9.0,
        x1 * x1 + 3.0 * x2 * x2 + 2.0 * x3 + 3.0 * x4 - 3.0,
    };
  };
  FeasibleSetSpec set;
  set.kind = FeasibleSetSpec::Kind::ScaledSimplex;
  set.total = 4.0;
  p.prox_eval = prox_for(set);
  p.g_eval = indicator_for(set);
  return p;
}

// ---- problem family 3: random affine operator F(x) = Mx + q on the simplex

// M = N N^T + S + D with N uniform on (-5,5), S skew-symmetric built from a
// uniform strict upper triangle, D diagonal uniform on (0, 0.3); q uniform on
// (-500, 0). Draw order: N row-major, S upper triangle row-major, D, then q.
inline ProblemInstance make_hphard(int m, std::uint64_t gen_seed) {
  if (m < 1) throw InvalidInputError("make_hphard: m must be >= 1");
  Rng rng(gen_seed);
  std::vector<double> N(static_cast<std::size_t>(m) * m);
  for (auto& v : N) v = rng.uniform(-5.0, 5.0);

  auto M = std::make_shared<std::vector<double>>(static_cast<std::size_t>(m) * m, 0.0);
  auto& Mm = *M;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += N[i * m + k] * N[j * m + k];
      Mm[i * m + j] = s;
      Mm[j * m + i] = s;
    }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double s = rng.uniform(-5.0, 5.0);
      Mm[i * m + j] += s;
      Mm[j * m + i] -= s;
    }
  for (int i = 0; i < m; ++i) Mm[i * m + i] += rng.uniform(0.0, 0.3);

  auto q = std::make_shared<Vec>(m);
  for (auto& v : *q) v = rng.uniform(-500.0, 0.0);

  const auto matvec = [m, M](const Vec& x) {
    Vec out(m);
    const auto& A = *M;
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += A[i * m + j] * x[j];
      out[i] = s;
    }
    return out;
  };
  const auto matvec_t = [m, M](const Vec& u) {
    Vec out(m, 0.0);
    const auto& A = *M;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) out[j] += A[i * m + j] * u[i];
    return out;
  };

  ProblemInstance p;
  p.name = "hphard-m" + std::to_string(m) + "-seed" + std::to_string(gen_seed);
  p.dim = m;
  p.operator_eval = [matvec, q](const Vec& x) {
    Vec out = matvec(x);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (*q)[i];
    return out;
  };
  FeasibleSetSpec set;
  set.kind = FeasibleSetSpec::Kind::ScaledSimplex;
  set.total = static_cast<double>(m);
  p.prox_eval = prox_for(set);
  p.g_eval = indicator_for(set);
  p.lipschitz = std::sqrt(
      power_iteration_eig([&](const Vec& v) { return matvec_t(matvec(v)); }, m));
  return p;
}

// ---- problem family 4: sparse logistic regression with l1 penalty

namespace detail {

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

inline double log1pexp(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

}  // namespace detail

// minimize mu ||x||_1 + (1/m) sum_i log(1 + exp((Kx)_i)) with K_ij = -l_i h_ij,
// so F(x) = (1/m) K^T sigma(Kx) and the gradient Lipschitz bound is
// ||K^T K||_2 / (4m). mu defaults to mu_factor * ||H^T l||_inf.
inline ProblemInstance make_logreg(const DatasetFixture& data, double mu_factor = 0.005) {
  const int m = data.features.rows, n = data.features.cols;
  if (m < 1 || n < 1) throw InvalidInputError("make_logreg: dataset must be nonempty");
  if (data.labels.size() != static_cast<std::size_t>(m))
    throw InvalidInputError("make_logreg: label count differs from row count");
  for (int l : data.labels)
    if (l != 1 && l != -1) throw InvalidInputError("make_logreg: labels must be +1 or -1");
  if (!(mu_factor >= 0.0)) throw InvalidInputError("make_logreg: mu_factor must be nonnegative");

  auto K = std::make_shared<SparseMatrix>(data.features);
  for (int r = 0; r < m; ++r)
    for (int k = K->row_ptr[r]; k < K->row_ptr[r + 1]; ++k) K->values[k] *= -data.labels[r];

  Vec lvec(m);
  for (int i = 0; i < m; ++i) lvec[i] = static_cast<double>(data.labels[i]);
  const double mu = mu_factor * norm_inf(data.features.multiply_transpose(lvec));

  ProblemInstance p;
  p.name = "logreg-m" + std::to_string(m) + "-n" + std::to_string(n);
  p.dim = n;
  p.operator_eval = [K, m](const Vec& x) {
    Vec kx = K->multiply(x);
    for (auto& t : kx) t = detail::sigmoid(t);
    Vec out = K->multiply_transpose(kx);
    for (auto& v : out) v /= m;
    return out;
  };
  p.f_eval = [K, m](const Vec& x) {
    const Vec kx = K->multiply(x);
    double s = 0.0;
    for (double t : kx) s += detail::log1pexp(t);
    return s / m;
  };
  p.prox_eval = prox_for(L1Weight{mu});
  p.g_eval = l1_value(mu);
  p.lipschitz =
      power_iteration_eig([&](const Vec& v) { return K->multiply_transpose(K->multiply(v)); }, n) /
      (4.0 * m);
  return p;
}

// Random sparse binary-classification data with a planted sparse weight
// vector; labels are the sign of a lightly noised margin.
inline DatasetFixture make_synthetic_logreg_data(int m, int n, int nnz_per_row, std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidInputError("make_synthetic_logreg_data: m and n must be >= 1");
  if (nnz_per_row < 1 || nnz_per_row > n)
    throw InvalidInputError("make_synthetic_logreg_data: need 1 <= nnz_per_row <= n");
  Rng rng(seed);
  Vec w(n, 0.0);
  bool any = false;
  for (int j = 0; j < n; ++j)
    if (rng.uniform01() < 0.1) {
      w[j] = rng.normal();
      any = true;
    }
  if (!any) w[0] = 1.0;

  std::vector<SparseMatrix::Triplet> trips;
  std::vector<int> labels(m);
  std::vector<int> cols(nnz_per_row);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < nnz_per_row; ++c) {
      int pick;
      bool fresh;
      do {
        pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        fresh = true;
        for (int t = 0; t < c; ++t)
          if (cols[t] == pick) {
            fresh = false;
            break;
          }
      } while (!fresh);
      cols[c] = pick;
    }
    // Noise at twice the typical signal scale keeps the classes overlapping,
    // like measured corpora; nearly separable labels would push the logistic
    // minimizer into a flat valley and make the fixture degenerate.
    double margin = 2.0 * rng.normal();
    for (int c = 0; c < nnz_per_row; ++c) {
      const double v = rng.normal();
      trips.emplace_back(i, cols[c], v);
      margin += v * w[cols[c]];
    }
    labels[i] = margin >= 0.0 ? 1 : -1;
  }
  DatasetFixture out;
  out.features = SparseMatrix::from_triplets(m, n, std::move(trips));
  out.labels = std::move(labels);
  return out;
}

// ---- scalar counterexample: extrapolated forward step on F(x) = x, g = 0

enum class DivergenceClass { Converges, Diverges, Inconclusive };

struct DivergenceReport {
  std::vector<double> trace;  // x_0, x_1, ...
  DivergenceClass classification = DivergenceClass::Inconclusive;
  double root_small = 0.0;  // characteristic-root magnitudes, ascending
  double root_large = 0.0;
};

// x_{n+1} = (1 - lambda - delta*lambda) x_n + delta*lambda x_{n-1}, x_{-1} = x_0.
// Diverges once |x_n| > 1e6 |x_0|, converges once |x_n| < 1e-8 |x_0|.
inline DivergenceReport divergence_example(double delta, double lambda, double x0 = 1.0,
                                           int steps = 200) {
  if (!(delta > 0.0) || !(lambda > 0.0))
    throw InvalidInputError("divergence_example: delta and lambda must be positive");
  if (x0 == 0.0) throw InvalidInputError("divergence_example: x0 must be nonzero");
  if (steps < 10) throw InvalidInputError("divergence_example: steps must be >= 10");

  const double b = 1.0 - lambda - delta * lambda;
  const double disc = std::sqrt(b * b + 4.0 * delta * lambda);
  DivergenceReport rep;
  rep.root_small = std::abs((b - disc) / 2.0);
  rep.root_large = std::abs((b + disc) / 2.0);
  if (rep.root_small > rep.root_large) std::swap(rep.root_small, rep.root_large);

  double x_prev = x0, x = x0;
  rep.trace.push_back(x0);
  const double up = 1e6 * std::abs(x0), down = 1e-8 * std::abs(x0);
  for (int n = 0; n < steps; ++n) {
    const double x_next = b * x + delta * lambda * x_prev;
    rep.trace.push_back(x_next);
    x_prev = x;
    x = x_next;
    if (std::abs(x) > up) {
      rep.classification = DivergenceClass::Diverges;
      break;
    }
    if (std::abs(x) < down) {
      rep.classification = DivergenceClass::Converges;
      break;
    }
  }
  return rep;
}

}  // namespace vipeg
