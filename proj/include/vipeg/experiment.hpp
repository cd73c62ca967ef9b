#pragma once

#include <atomic>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "vipeg/baselines.hpp"
#include "vipeg/problems.hpp"
#include "vipeg/solvers.hpp"
#include "vipeg/trace_io.hpp"

namespace vipeg {

struct ProblemEntry {
  std::string id;
  std::string kind;
  std::map<std::string, std::string> kv;
};

struct SolverEntry {
  std::string id;
  std::string method;
  std::map<std::string, std::string> kv;
};

struct ExperimentSpec {
  std::uint64_t seed = 12345;
  double epsilon = 1e-6;
  int max_iter = 100000;
  int repetitions = 1;
  std::string out_dir;
  std::vector<ProblemEntry> problems;
  std::vector<SolverEntry> solvers;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline double spec_double(const std::string& v, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidInputError(ctx + ": malformed number '" + v + "'");
  }
}

inline long long spec_int(const std::string& v, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const long long d = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidInputError(ctx + ": malformed integer '" + v + "'");
  }
}

inline std::uint64_t spec_u64(const std::string& v, const std::string& ctx) {
  std::uint64_t d = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw InvalidInputError(ctx + ": malformed unsigned integer '" + v + "'");
  return d;
}

inline const std::set<std::string>& solver_keys_for(const std::string& method) {
  static const std::set<std::string> peg{"delta",  "alpha",   "gamma",   "zeta_min",
                                         "mu",     "nu",      "lambda0", "perturb_scale",
                                         "correction", "epsilon", "max_iter"};
  static const std::set<std::string> ipeg{"delta",      "alpha",   "gamma",    "zeta_min",
                                          "mu",         "nu",      "lambda0",  "perturb_scale",
                                          "correction", "epsilon", "max_iter", "lambda_hat",
                                          "n_hat",      "n_zero"};
  static const std::set<std::string> mpg{"delta", "alpha", "lambda0", "perturb_scale", "epsilon",
                                         "max_iter"};
  static const std::set<std::string> tfbf{"beta", "theta", "lambda_init", "epsilon", "max_iter"};
  static const std::set<std::string> fista{"beta", "lambda_init", "epsilon", "max_iter"};
  static const std::set<std::string> korp{"lambda_fixed", "epsilon", "max_iter"};
  if (method == "peg") return peg;
  if (method == "ipeg") return ipeg;
  if (method == "mpg") return mpg;
  if (method == "tfbf") return tfbf;
  if (method == "fista") return fista;
  if (method == "korpelevich") return korp;
  throw InvalidInputError("unknown solver method '" + method + "'");
}

inline void validate_problem_entry(const ProblemEntry& e) {
  const std::string ctx = "[problem " + e.id + "]";
  std::set<std::string> allowed{"kind", "x0"};
  if (e.kind == "sun") {
    allowed.insert({"dim", "set"});
  } else if (e.kind == "kojima-shindo") {
    // nothing extra
  } else if (e.kind == "hphard") {
    allowed.insert({"m", "gen_seed"});
  } else if (e.kind == "logreg") {
    allowed.insert({"data", "synthetic_m", "synthetic_n", "synthetic_nnz", "synthetic_seed",
                    "mu_factor"});
  } else {
    throw InvalidInputError(ctx + ": unknown problem kind '" + e.kind + "'");
  }
  for (const auto& [k, v] : e.kv) {
    if (!allowed.count(k)) throw InvalidInputError(ctx + ": unknown key '" + k + "'");
    (void)v;
  }
  if (e.kind == "sun" && e.kv.count("set")) {
    const auto& s = e.kv.at("set");
    if (s != "orthant" && s != "simplex")
      throw InvalidInputError(ctx + ": set must be 'orthant' or 'simplex'");
  }
  if (e.kind == "logreg" && !e.kv.count("data") && !e.kv.count("synthetic_m"))
    throw InvalidInputError(ctx + ": logreg needs either data= or synthetic_m=/synthetic_n=");
}

}  // namespace detail

// INI-style grid description:
//   [experiment]            seed / epsilon / max_iter / repetitions / out_dir
//   [problem NAME]  ...     kind= plus family parameters, optional x0=
//   [solver NAME]   ...     method= plus per-method overrides
// '#' and ';' start comments. Every section/key is checked here, so a bad
// grid fails before anything runs.
inline ExperimentSpec parse_experiment_text(const std::string& text) {
  ExperimentSpec spec;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::string section;       // "", "experiment", "problem", "solver"
  std::string section_name;  // entry id for problem/solver
  std::map<std::string, std::string> exp_kv;
  std::set<std::string> seen_sections;

  while (std::getline(in, line)) {
    ++line_no;
    std::string t = detail::trim(line);
    if (const auto hash = t.find_first_of("#;"); hash != std::string::npos)
      t = detail::trim(t.substr(0, hash));
    if (t.empty()) continue;

    if (t.front() == '[') {
      if (t.back() != ']')
        throw ParseError("line " + std::to_string(line_no) + ": unterminated section header");
      const std::string inner = detail::trim(t.substr(1, t.size() - 2));
      if (inner == "experiment") {
        section = "experiment";
        section_name.clear();
      } else if (inner.rfind("problem", 0) == 0) {
        section = "problem";
        section_name = detail::trim(inner.substr(7));
        if (section_name.empty())
          throw ParseError("line " + std::to_string(line_no) + ": problem section needs a name");
        spec.problems.push_back({section_name, "", {}});
      } else if (inner.rfind("solver", 0) == 0) {
        section = "solver";
        section_name = detail::trim(inner.substr(6));
        if (section_name.empty())
          throw ParseError("line " + std::to_string(line_no) + ": solver section needs a name");
        spec.solvers.push_back({section_name, "", {}});
      } else {
        throw ParseError("line " + std::to_string(line_no) + ": unknown section '" + inner + "'");
      }
      if (!seen_sections.insert(inner).second)
        throw ParseError("line " + std::to_string(line_no) + ": duplicate section '" + inner + "'");
      continue;
    }

    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string val = detail::trim(t.substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key");
    if (section.empty())
      throw ParseError("line " + std::to_string(line_no) + ": key outside any section");

    if (section == "experiment") {
      if (!exp_kv.emplace(key, val).second)
        throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    } else if (section == "problem") {
      auto& kv = spec.problems.back().kv;
      if (key == "kind") {
        if (!spec.problems.back().kind.empty())
          throw ParseError("line " + std::to_string(line_no) + ": duplicate key 'kind'");
        spec.problems.back().kind = val;
      } else if (!kv.emplace(key, val).second) {
        throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      }
    } else {
      auto& kv = spec.solvers.back().kv;
      if (key == "method") {
        if (!spec.solvers.back().method.empty())
          throw ParseError("line " + std::to_string(line_no) + ": duplicate key 'method'");
        spec.solvers.back().method = val;
      } else if (!kv.emplace(key, val).second) {
        throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      }
    }
  }

  for (const auto& [k, v] : exp_kv) {
    if (k == "seed")
      spec.seed = detail::spec_u64(v, "[experiment] seed");
    else if (k == "epsilon")
      spec.epsilon = detail::spec_double(v, "[experiment] epsilon");
    else if (k == "max_iter")
      spec.max_iter = static_cast<int>(detail::spec_int(v, "[experiment] max_iter"));
    else if (k == "repetitions")
      spec.repetitions = static_cast<int>(detail::spec_int(v, "[experiment] repetitions"));
    else if (k == "out_dir")
      spec.out_dir = v;
    else
      throw InvalidInputError("[experiment]: unknown key '" + k + "'");
  }

  if (spec.problems.empty()) throw InvalidInputError("experiment needs at least one [problem] section");
  if (spec.solvers.empty()) throw InvalidInputError("experiment needs at least one [solver] section");
  if (!(spec.epsilon > 0.0)) throw InvalidInputError("[experiment]: epsilon must be positive");
  if (spec.max_iter <= 0) throw InvalidInputError("[experiment]: max_iter must be positive");
  if (spec.repetitions <= 0) throw InvalidInputError("[experiment]: repetitions must be positive");

  for (const auto& p : spec.problems) {
    if (p.kind.empty())
      throw InvalidInputError("[problem " + p.id + "]: missing kind=");
    detail::validate_problem_entry(p);
  }
  for (const auto& s : spec.solvers) {
    if (s.method.empty())
      throw InvalidInputError("[solver " + s.id + "]: missing method=");
    const auto& allowed = detail::solver_keys_for(s.method);  // throws on unknown method
    for (const auto& [k, v] : s.kv) {
      if (!allowed.count(k))
        throw InvalidInputError("[solver " + s.id + "]: key '" + k + "' not valid for method '" +
                                s.method + "'");
      (void)v;
    }
  }
  return spec;
}

inline ExperimentSpec parse_experiment_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open experiment spec '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_experiment_text(ss.str());
}

// VIPEG_SEED in the environment beats the seed in the spec file.
inline void apply_env_seed(ExperimentSpec& spec) {
  if (const char* env = std::getenv("VIPEG_SEED")) {
    spec.seed = detail::spec_u64(env, "VIPEG_SEED");
  }
}

struct BuiltProblem {
  ProblemInstance instance;
  Vec x0;
};

namespace detail {

inline Vec parse_x0(const std::string& val, int dim, Rng& rng, const std::string& ctx) {
  if (val == "zeros") return Vec(dim, 0.0);
  if (val == "ones") return Vec(dim, 1.0);
  if (val.rfind("uniform:", 0) == 0) {
    const std::string rest = val.substr(8);
    const auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw InvalidInputError(ctx + ": x0 uniform needs 'uniform:lo,hi'");
    const double lo = spec_double(trim(rest.substr(0, comma)), ctx + " x0");
    const double hi = spec_double(trim(rest.substr(comma + 1)), ctx + " x0");
    if (!(hi > lo)) throw InvalidInputError(ctx + ": x0 uniform needs lo < hi");
    return rng.uniform_vec(dim, lo, hi);
  }
  // explicit comma-separated coordinates
  Vec out;
  std::size_t pos = 0;
  while (pos <= val.size()) {
    auto comma = val.find(',', pos);
    if (comma == std::string::npos) comma = val.size();
    out.push_back(spec_double(trim(val.substr(pos, comma - pos)), ctx + " x0"));
    pos = comma + 1;
  }
  if (static_cast<int>(out.size()) != dim)
    throw InvalidInputError(ctx + ": x0 has " + std::to_string(out.size()) +
                            " coordinates, problem dimension is " + std::to_string(dim));
  return out;
}

}  // namespace detail

// Instantiate a problem section. x0_seed only feeds randomized starts, so a
// fixed spec seed pins the whole grid.
inline BuiltProblem build_problem(const ProblemEntry& e, std::uint64_t x0_seed) {
  const std::string ctx = "[problem " + e.id + "]";
  const auto get = [&](const char* k) -> const std::string* {
    const auto it = e.kv.find(k);
    return it == e.kv.end() ? nullptr : &it->second;
  };

  BuiltProblem out;
  std::string x0_default;
  if (e.kind == "sun") {
    const int dim = get("dim") ? static_cast<int>(detail::spec_int(*get("dim"), ctx + " dim")) : 1000;
    const auto kind = (get("set") && *get("set") == std::string("simplex"))
                          ? FeasibleSetSpec::Kind::ScaledSimplex
                          : FeasibleSetSpec::Kind::NonnegOrthant;
    out.instance = make_sun_problem(dim, kind);
    x0_default = "uniform:-10,10";
  } else if (e.kind == "kojima-shindo") {
    out.instance = make_kojima_shindo();
    x0_default = "zeros";
  } else if (e.kind == "hphard") {
    const int m = get("m") ? static_cast<int>(detail::spec_int(*get("m"), ctx + " m")) : 500;
    const std::uint64_t gs = get("gen_seed") ? detail::spec_u64(*get("gen_seed"), ctx + " gen_seed") : 1;
    out.instance = make_hphard(m, gs);
    x0_default = "ones";
  } else if (e.kind == "logreg") {
    DatasetFixture data;
    if (const auto* path = get("data")) {
      std::ifstream f(*path, std::ios::binary);
      if (!f) throw IoError(ctx + ": cannot open dataset '" + *path + "'");
      std::ostringstream ss;
      ss << f.rdbuf();
      data = parse_sparse_dataset(ss.str());
    } else {
      const int m = static_cast<int>(detail::spec_int(*get("synthetic_m"), ctx + " synthetic_m"));
      if (!get("synthetic_n")) throw InvalidInputError(ctx + ": synthetic data needs synthetic_n=");
      const int n = static_cast<int>(detail::spec_int(*get("synthetic_n"), ctx + " synthetic_n"));
      const int nnz = get("synthetic_nnz")
                          ? static_cast<int>(detail::spec_int(*get("synthetic_nnz"), ctx + " synthetic_nnz"))
                          : std::max(1, n / 10);
      const std::uint64_t ds =
          get("synthetic_seed") ? detail::spec_u64(*get("synthetic_seed"), ctx + " synthetic_seed") : 7;
      data = make_synthetic_logreg_data(m, n, nnz, ds);
    }
    const double mu_factor =
        get("mu_factor") ? detail::spec_double(*get("mu_factor"), ctx + " mu_factor") : 0.005;
    out.instance = make_logreg(data, mu_factor);
    x0_default = "zeros";
  } else {
    throw InvalidInputError(ctx + ": unknown problem kind '" + e.kind + "'");
  }
  out.instance.name = e.id;

  Rng rng(derive_seed(x0_seed, 0xF00D, 0, 0));
  const std::string x0_spec = get("x0") ? *get("x0") : x0_default;
  out.x0 = detail::parse_x0(x0_spec, out.instance.dim, rng, ctx);
  return out;
}

// Run one solver section on one built problem.
inline RunResult run_solver_entry(const SolverEntry& s, const ExperimentSpec& spec,
                                  ProblemInstance& problem, const Vec& x0, std::uint64_t cell_seed) {
  const std::string ctx = "[solver " + s.id + "]";
  const auto get = [&](const char* k) -> const std::string* {
    const auto it = s.kv.find(k);
    return it == s.kv.end() ? nullptr : &it->second;
  };
  const double epsilon = get("epsilon") ? detail::spec_double(*get("epsilon"), ctx + " epsilon")
                                        : spec.epsilon;
  const int max_iter = get("max_iter")
                           ? static_cast<int>(detail::spec_int(*get("max_iter"), ctx + " max_iter"))
                           : spec.max_iter;

  if (s.method == "peg" || s.method == "ipeg") {
    SolverConfig c;
    c.epsilon = epsilon;
    c.max_iter = max_iter;
    c.seed = cell_seed;
    if (get("delta")) c.delta = detail::spec_double(*get("delta"), ctx + " delta");
    if (get("alpha")) c.alpha = detail::spec_double(*get("alpha"), ctx + " alpha");
    if (get("gamma")) c.gamma = detail::spec_double(*get("gamma"), ctx + " gamma");
    if (get("zeta_min")) c.zeta_min = detail::spec_double(*get("zeta_min"), ctx + " zeta_min");
    if (get("mu")) c.mu = detail::spec_double(*get("mu"), ctx + " mu");
    if (get("nu")) c.nu = detail::spec_double(*get("nu"), ctx + " nu");
    if (get("lambda_hat")) c.lambda_hat = detail::spec_double(*get("lambda_hat"), ctx + " lambda_hat");
    if (get("n_hat")) c.n_hat = static_cast<int>(detail::spec_int(*get("n_hat"), ctx + " n_hat"));
    if (get("n_zero")) c.n_zero = static_cast<int>(detail::spec_int(*get("n_zero"), ctx + " n_zero"));
    double perturb = 0.0;
    if (get("perturb_scale")) perturb = detail::spec_double(*get("perturb_scale"), ctx + " perturb_scale");
    if (const auto* l0 = get("lambda0")) {
      if (*l0 == "bootstrap")
        c.lambda0 = Lambda0Bootstrap{perturb};
      else
        c.lambda0 = Lambda0Explicit{detail::spec_double(*l0, ctx + " lambda0")};
    } else {
      c.lambda0 = Lambda0Bootstrap{perturb};
    }
    if (const auto* corr = get("correction")) {
      if (*corr == "on")
        c.correction = true;
      else if (*corr == "off")
        c.correction = false;
      else if (*corr != "auto")
        throw InvalidInputError(ctx + ": correction must be on/off/auto");
    }
    return s.method == "peg" ? peg_solve(problem, c, x0) : ipeg_solve(problem, c, x0);
  }

  BaselineConfig c;
  c.epsilon = epsilon;
  c.max_iter = max_iter;
  c.seed = cell_seed;
  if (get("beta")) c.beta = detail::spec_double(*get("beta"), ctx + " beta");
  if (get("theta")) c.theta = detail::spec_double(*get("theta"), ctx + " theta");
  if (get("lambda_init")) c.lambda_init = detail::spec_double(*get("lambda_init"), ctx + " lambda_init");
  if (get("lambda_fixed")) c.lambda_fixed = detail::spec_double(*get("lambda_fixed"), ctx + " lambda_fixed");
  if (s.method == "mpg") {
    if (get("delta")) c.delta_mpg = detail::spec_double(*get("delta"), ctx + " delta");
    if (get("alpha")) c.alpha_mpg = detail::spec_double(*get("alpha"), ctx + " alpha");
    if (const auto* l0 = get("lambda0"); l0 && *l0 != "bootstrap")
      c.lambda_fixed = detail::spec_double(*l0, ctx + " lambda0");
    return mpg_solve(problem, c, x0);
  }
  if (s.method == "tfbf") return tfbf_solve(problem, c, x0);
  if (s.method == "fista") return fista_solve(problem, c, x0);
  if (s.method == "korpelevich") return korpelevich_solve(problem, c, x0);
  throw InvalidInputError(ctx + ": unknown method '" + s.method + "'");
}

struct ExperimentOutput {
  std::vector<SummaryRow> rows;  // same order as runs
  std::vector<std::pair<std::string, RunResult>> runs;  // (file stem, result)
};

namespace detail {

inline std::string sanitize_id(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

}  // namespace detail

// Run the full problem x solver x repetition grid. Seeds derive from
// (spec seed, problem index, solver index) only, so repetitions repeat the
// exact same run and exist purely for wall-time averaging. jobs > 1 runs
// cells on a small thread pool; results and files come out in sorted order
// either way.
inline ExperimentOutput run_experiment(const ExperimentSpec& spec, int jobs = 1) {
  if (jobs < 1) throw InvalidInputError("run_experiment: jobs must be >= 1");

  std::vector<BuiltProblem> built;
  built.reserve(spec.problems.size());
  for (std::size_t p = 0; p < spec.problems.size(); ++p)
    built.push_back(build_problem(spec.problems[p], derive_seed(spec.seed, p, 0, 0)));

  struct Cell {
    std::size_t p, s;
    int rep;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < spec.problems.size(); ++p)
    for (std::size_t s = 0; s < spec.solvers.size(); ++s)
      for (int rep = 1; rep <= spec.repetitions; ++rep) cells.push_back({p, s, rep});

  std::vector<RunResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;

  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& c = cells[i];
      try {
        ProblemInstance instance = built[c.p].instance;  // private counters per run
        results[i] = run_solver_entry(spec.solvers[c.s], spec, instance, built[c.p].x0,
                                      derive_seed(spec.seed, c.p, c.s + 1, 0));
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  ExperimentOutput out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    const RunResult& r = results[i];
    SummaryRow row;
    row.problem = spec.problems[c.p].id;
    row.solver = spec.solvers[c.s].id;
    row.rep = c.rep;
    row.iterations = r.iterations();
    row.prox_calls = r.num_prox_calls;
    row.f_calls = r.num_f_calls;
    row.wall_time_s = r.wall_time_s;
    row.final_residual = r.final_residual;
    row.status = r.status;
    out.rows.push_back(std::move(row));
    out.runs.emplace_back(detail::sanitize_id(spec.problems[c.p].id) + "__" +
                              detail::sanitize_id(spec.solvers[c.s].id) + "__rep" +
                              std::to_string(c.rep),
                          results[i]);
  }

  // sorted by (problem, solver, rep) regardless of construction or run order
  std::vector<std::size_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ka = std::tie(out.rows[a].problem, out.rows[a].solver, out.rows[a].rep);
    const auto kb = std::tie(out.rows[b].problem, out.rows[b].solver, out.rows[b].rep);
    return ka < kb;
  });
  ExperimentOutput sorted;
  for (std::size_t i : order) {
    sorted.rows.push_back(std::move(out.rows[i]));
    sorted.runs.push_back(std::move(out.runs[i]));
  }
  return sorted;
}

// Single collector for everything run_experiment produced: one trace CSV per
// cell (timing zeroed for reproducibility) plus summary.csv / summary.txt.
inline void write_experiment_outputs(const ExperimentOutput& out, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  for (const auto& [stem, result] : out.runs)
    emit_trace_csv(result, out_dir + "/" + stem + ".csv", /*include_timing=*/false);
  {
    std::ofstream f(out_dir + "/summary.csv", std::ios::binary);
    if (!f) throw IoError("cannot open '" + out_dir + "/summary.csv'");
    f << render_summary_csv(out.rows);
  }
  {
    std::ofstream f(out_dir + "/summary.txt", std::ios::binary);
    if (!f) throw IoError("cannot open '" + out_dir + "/summary.txt'");
    f << format_summary_table(out.rows);
  }
}

inline bool run_succeeded(Status s) {
  return s == Status::Converged || s == Status::StationaryStop;
}

}  // namespace vipeg
