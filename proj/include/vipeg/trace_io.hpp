#pragma once

#include <algorithm>
#include <array>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vipeg/core.hpp"

namespace vipeg {

inline const char* kTraceHeader = "iter,residual,lambda,backtracks,f_calls,prox_calls,elapsed_s";

namespace detail {

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_csv_double(const std::string& s, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": malformed number '" + s + "'");
  }
}

inline long long parse_csv_int(const std::string& s, int line_no) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": malformed integer '" + s + "'");
  }
}

}  // namespace detail

// One row per iteration; floats carry 17 significant digits so values
// round-trip exactly. include_timing=false zeroes elapsed_s, which keeps
// repeated runs byte-identical.
inline std::string render_trace_csv(const RunResult& res, bool include_timing = true) {
  std::string out = kTraceHeader;
  out += '\n';
  char buf[200];
  for (const auto& rec : res.trace) {
    std::snprintf(buf, sizeof buf, "%d,%s,%s,%d,%" PRIu64 ",%" PRIu64 ",%s", rec.iter,
                  detail::fmt_g17(rec.residual).c_str(), detail::fmt_g17(rec.lambda).c_str(),
                  rec.backtracks, rec.f_calls, rec.prox_calls,
                  detail::fmt_g17(include_timing ? rec.elapsed_s : 0.0).c_str());
    out += buf;
    out += '\n';
  }
  return out;
}

inline void emit_trace_csv(const RunResult& res, const std::string& path, bool include_timing = true) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("emit_trace_csv: cannot open '" + path + "'");
  f << render_trace_csv(res, include_timing);
  if (!f) throw IoError("emit_trace_csv: write failed for '" + path + "'");
}

inline std::vector<IterationRecord> parse_trace_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trace csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader)
    throw ParseError("trace csv: unexpected header '" + line + "'");
  std::vector<IterationRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 7)
      throw ParseError("line " + std::to_string(line_no) + ": expected 7 fields, got " +
                       std::to_string(f.size()));
    IterationRecord rec;
    rec.iter = static_cast<int>(detail::parse_csv_int(f[0], line_no));
    rec.residual = detail::parse_csv_double(f[1], line_no);
    rec.lambda = detail::parse_csv_double(f[2], line_no);
    rec.backtracks = static_cast<int>(detail::parse_csv_int(f[3], line_no));
    rec.f_calls = static_cast<std::uint64_t>(detail::parse_csv_int(f[4], line_no));
    rec.prox_calls = static_cast<std::uint64_t>(detail::parse_csv_int(f[5], line_no));
    rec.elapsed_s = detail::parse_csv_double(f[6], line_no);
    out.push_back(rec);
  }
  return out;
}

inline std::vector<IterationRecord> parse_trace_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("parse_trace_csv: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_trace_csv_text(ss.str());
}

struct SummaryRow {
  std::string problem;
  std::string solver;
  int rep = 1;
  int iterations = 0;
  std::uint64_t prox_calls = 0;
  std::uint64_t f_calls = 0;
  double wall_time_s = 0.0;
  double final_residual = 0.0;
  Status status = Status::MaxIterReached;
};

inline const char* kSummaryHeader = "problem,solver,rep,iterations,prox_calls,f_calls,wall_time_s,final_residual,status";

inline std::string render_summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = kSummaryHeader;
  out += '\n';
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%d,%" PRIu64 ",%" PRIu64 ",%s,%s,%s",
                  r.problem.c_str(), r.solver.c_str(), r.rep, r.iterations, r.prox_calls,
                  r.f_calls, detail::fmt_g17(r.wall_time_s).c_str(),
                  detail::fmt_g17(r.final_residual).c_str(), to_string(r.status));
    out += buf;
    out += '\n';
  }
  return out;
}

inline std::vector<SummaryRow> parse_summary_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("summary csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSummaryHeader) throw ParseError("summary csv: unexpected header '" + line + "'");
  std::vector<SummaryRow> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 9)
      throw ParseError("line " + std::to_string(line_no) + ": expected 9 fields, got " +
                       std::to_string(f.size()));
    SummaryRow r;
    r.problem = f[0];
    r.solver = f[1];
    r.rep = static_cast<int>(detail::parse_csv_int(f[2], line_no));
    r.iterations = static_cast<int>(detail::parse_csv_int(f[3], line_no));
    r.prox_calls = static_cast<std::uint64_t>(detail::parse_csv_int(f[4], line_no));
    r.f_calls = static_cast<std::uint64_t>(detail::parse_csv_int(f[5], line_no));
    r.wall_time_s = detail::parse_csv_double(f[6], line_no);
    r.final_residual = detail::parse_csv_double(f[7], line_no);
    const auto st = status_from_string(f[8]);
    if (!st) throw ParseError("line " + std::to_string(line_no) + ": unknown status '" + f[8] + "'");
    r.status = *st;
    out.push_back(r);
  }
  return out;
}

// Fixed-width table for terminals; numbers are rounded for reading, the CSV
// keeps the full precision.
inline std::string format_summary_table(const std::vector<SummaryRow>& rows) {
  const char* titles[9] = {"problem", "solver", "rep", "iter", "prox", "F", "time_s", "residual", "status"};
  std::vector<std::array<std::string, 9>> cells;
  char buf[64];
  for (const auto& r : rows) {
    std::array<std::string, 9> c;
    c[0] = r.problem;
    c[1] = r.solver;
    c[2] = std::to_string(r.rep);
    c[3] = std::to_string(r.iterations);
    c[4] = std::to_string(r.prox_calls);
    c[5] = std::to_string(r.f_calls);
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_time_s);
    c[6] = buf;
    std::snprintf(buf, sizeof buf, "%.3e", r.final_residual);
    c[7] = buf;
    c[8] = to_string(r.status);
    cells.push_back(std::move(c));
  }
  std::size_t width[9];
  for (int j = 0; j < 9; ++j) {
    width[j] = std::string(titles[j]).size();
    for (const auto& c : cells) width[j] = std::max(width[j], c[j].size());
  }
  std::string out;
  const auto pad = [&](const std::string& s, std::size_t w, bool right) {
    std::string p(w - s.size(), ' ');
    return right ? p + s : s + p;
  };
  for (int j = 0; j < 9; ++j) {
    out += pad(titles[j], width[j], j >= 2 && j <= 7);
    out += j == 8 ? "\n" : "  ";
  }
  for (const auto& c : cells) {
    for (int j = 0; j < 9; ++j) {
      out += pad(c[j], width[j], j >= 2 && j <= 7);
      out += j == 8 ? "\n" : "  ";
    }
  }
  return out;
}

}  // namespace vipeg
