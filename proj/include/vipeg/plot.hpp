#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "vipeg/errors.hpp"

namespace vipeg {

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

enum class YScale { Linear, Log };

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string fmt_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

// Self-contained SVG line chart. Log scale clamps nonpositive values to 1e-16
// and says so in a footnote rather than dropping points silently.
inline std::string render_svg_plot(const std::vector<PlotSeries>& series, YScale yscale,
                                   const std::string& title = "", const std::string& x_label = "",
                                   const std::string& y_label = "") {
  if (series.empty()) throw InvalidInputError("render_svg_plot: no series");
  for (const auto& s : series)
    if (s.points.empty())
      throw InvalidInputError("render_svg_plot: series '" + s.name + "' is empty");

  const double clamp_floor = 1e-16;
  bool clamped = false;
  double xmin = series[0].points[0].first, xmax = xmin;
  double ymin = 0.0, ymax = 0.0;
  bool y_init = false;
  for (const auto& s : series)
    for (const auto& [x, y_raw] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      double y = y_raw;
      if (yscale == YScale::Log) {
        if (y < clamp_floor) {
          y = clamp_floor;
          clamped = true;
        }
        y = std::log10(y);
      }
      if (!y_init) {
        ymin = ymax = y;
        y_init = true;
      } else {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double W = 760, H = 480, ML = 78, MR = 24, MT = 42, MB = 58;
  const auto sx = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  const auto sy = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  const int n_colors = 8;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt_g6(W) +
         "\" height=\"" + detail::fmt_g6(H) + "\" viewBox=\"0 0 " + detail::fmt_g6(W) + " " +
         detail::fmt_g6(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    svg += "<text x=\"" + detail::fmt_g6(W / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
           detail::xml_escape(title) + "</text>\n";

  // gridlines + ticks
  const int n_ticks = 6;
  for (int t = 0; t <= n_ticks; ++t) {
    const double fx = xmin + (xmax - xmin) * t / n_ticks;
    const double px = sx(fx);
    svg += "<line x1=\"" + detail::fmt_g6(px) + "\" y1=\"" + detail::fmt_g6(MT) + "\" x2=\"" +
           detail::fmt_g6(px) + "\" y2=\"" + detail::fmt_g6(H - MB) +
           "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::fmt_g6(px) + "\" y=\"" + detail::fmt_g6(H - MB + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::fmt_g6(fx) + "</text>\n";
  }
  for (int t = 0; t <= n_ticks; ++t) {
    const double fy = ymin + (ymax - ymin) * t / n_ticks;
    const double py = sy(fy);
    svg += "<line x1=\"" + detail::fmt_g6(ML) + "\" y1=\"" + detail::fmt_g6(py) + "\" x2=\"" +
           detail::fmt_g6(W - MR) + "\" y2=\"" + detail::fmt_g6(py) +
           "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    const std::string label =
        yscale == YScale::Log ? ("1e" + detail::fmt_g6(fy)) : detail::fmt_g6(fy);
    svg += "<text x=\"" + detail::fmt_g6(ML - 6) + "\" y=\"" + detail::fmt_g6(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + label +
           "</text>\n";
  }
  // axes
  svg += "<line x1=\"" + detail::fmt_g6(ML) + "\" y1=\"" + detail::fmt_g6(H - MB) + "\" x2=\"" +
         detail::fmt_g6(W - MR) + "\" y2=\"" + detail::fmt_g6(H - MB) +
         "\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
  svg += "<line x1=\"" + detail::fmt_g6(ML) + "\" y1=\"" + detail::fmt_g6(MT) + "\" x2=\"" +
         detail::fmt_g6(ML) + "\" y2=\"" + detail::fmt_g6(H - MB) +
         "\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
  if (!x_label.empty())
    svg += "<text x=\"" + detail::fmt_g6((ML + W - MR) / 2) + "\" y=\"" + detail::fmt_g6(H - 14) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           detail::xml_escape(x_label) + "</text>\n";
  if (!y_label.empty())
    svg += "<text x=\"20\" y=\"" + detail::fmt_g6((MT + H - MB) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 20 " +
           detail::fmt_g6((MT + H - MB) / 2) + ")\">" + detail::xml_escape(y_label) + "</text>\n";

  // data
  for (std::size_t si = 0; si < series.size(); ++si) {
    std::string pts;
    for (const auto& [x, y_raw] : series[si].points) {
      double y = y_raw;
      if (yscale == YScale::Log) y = std::log10(std::max(y, clamp_floor));
      pts += detail::fmt_g6(sx(x)) + "," + detail::fmt_g6(sy(y)) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(palette[si % n_colors]) +
           "\" stroke-width=\"1.6\" points=\"" + pts + "\"/>\n";
  }

  // legend
  const double lgx = W - MR - 190, lgy = MT + 10;
  svg += "<rect x=\"" + detail::fmt_g6(lgx - 8) + "\" y=\"" + detail::fmt_g6(lgy - 14) +
         "\" width=\"190\" height=\"" + detail::fmt_g6(series.size() * 18.0 + 10) +
         "\" fill=\"white\" fill-opacity=\"0.85\" stroke=\"#cccccc\"/>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const double ly = lgy + si * 18.0;
    svg += "<line x1=\"" + detail::fmt_g6(lgx) + "\" y1=\"" + detail::fmt_g6(ly - 4) + "\" x2=\"" +
           detail::fmt_g6(lgx + 24) + "\" y2=\"" + detail::fmt_g6(ly - 4) + "\" stroke=\"" +
           palette[si % n_colors] + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::fmt_g6(lgx + 30) + "\" y=\"" + detail::fmt_g6(ly) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::xml_escape(series[si].name) +
           "</text>\n";
  }

  if (clamped)
    svg += "<text x=\"" + detail::fmt_g6(ML) + "\" y=\"" + detail::fmt_g6(H - 2) +
           "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#777777\">note: nonpositive values clamped to 1e-16 for the log scale</text>\n";
  svg += "</svg>\n";
  return svg;
}

inline void emit_svg_plot(const std::vector<PlotSeries>& series, YScale yscale,
                          const std::string& path, const std::string& title = "",
                          const std::string& x_label = "", const std::string& y_label = "") {
  const std::string svg = render_svg_plot(series, yscale, title, x_label, y_label);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("emit_svg_plot: cannot open '" + path + "'");
  f << svg;
  if (!f) throw IoError("emit_svg_plot: write failed for '" + path + "'");
}

}  // namespace vipeg
