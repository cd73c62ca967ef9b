#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vipeg/vipeg.hpp"

namespace {

int cmd_run(const std::string& spec_path, const std::string& out_override, int jobs) {
  vipeg::ExperimentSpec spec = vipeg::parse_experiment_file(spec_path);
  vipeg::apply_env_seed(spec);
  if (!out_override.empty()) spec.out_dir = out_override;
  const vipeg::ExperimentOutput out = vipeg::run_experiment(spec, jobs);
  if (!spec.out_dir.empty()) {
    vipeg::write_experiment_outputs(out, spec.out_dir);
    std::cout << "wrote " << out.runs.size() << " trace files + summary.{csv,txt} to "
              << spec.out_dir << "\n\n";
  }
  std::cout << vipeg::format_summary_table(out.rows);
  for (const auto& row : out.rows)
    if (!vipeg::run_succeeded(row.status)) return 2;
  return 0;
}

int cmd_kappa(double delta, bool with_oracle, int grid) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", vipeg::kappa(delta));
  std::cout << "kappa(" << delta << ") = " << buf << "\n";
  if (with_oracle) {
    const double oracle = vipeg::kappa_oracle(delta, grid);
    std::snprintf(buf, sizeof buf, "%.12g", oracle);
    std::cout << "grid-search oracle (" << grid << "^2 cells, 3 passes) = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(oracle - vipeg::kappa(delta)));
    std::cout << "difference = " << buf << "\n";
  }
  return 0;
}

int cmd_demo_divergence(double delta, double lambda, double x0, int steps) {
  const vipeg::DivergenceReport rep = vipeg::divergence_example(delta, lambda, x0, steps);
  std::cout << "extrapolated forward step on F(x) = x, g = 0:\n"
            << "  x_{n+1} = (1 - lambda - delta*lambda) x_n + delta*lambda x_{n-1},  x_{-1} = x_0\n"
            << "  delta = " << delta << ", lambda = " << lambda << ", x_0 = " << x0 << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g, %.6g", rep.root_small, rep.root_large);
  std::cout << "characteristic-root magnitudes: " << buf << "\n";
  std::cout << "stable step threshold 2/(2*delta+1) = " << 2.0 / (2.0 * delta + 1.0) << "\n";
  switch (rep.classification) {
    case vipeg::DivergenceClass::Diverges:
      std::cout << "classification: diverges (|x_n| exceeded 1e6*|x_0| after "
                << rep.trace.size() - 1 << " steps)\n";
      break;
    case vipeg::DivergenceClass::Converges:
      std::cout << "classification: converges (|x_n| fell below 1e-8*|x_0| after "
                << rep.trace.size() - 1 << " steps)\n";
      break;
    case vipeg::DivergenceClass::Inconclusive:
      std::cout << "classification: inconclusive after " << rep.trace.size() - 1 << " steps\n";
      break;
  }
  const std::size_t head = std::min<std::size_t>(8, rep.trace.size());
  std::cout << "trace:";
  for (std::size_t i = 0; i < head; ++i) {
    std::snprintf(buf, sizeof buf, " %.6g", rep.trace[i]);
    std::cout << buf;
  }
  if (rep.trace.size() > head + 2) {
    std::cout << " ...";
    for (std::size_t i = rep.trace.size() - 2; i < rep.trace.size(); ++i) {
      std::snprintf(buf, sizeof buf, " %.6g", rep.trace[i]);
      std::cout << buf;
    }
  }
  std::cout << "\n";
  return 0;
}

int cmd_plot(const std::vector<std::string>& files, const std::string& out, const std::string& column,
             bool linear, const std::string& title) {
  if (column != "residual" && column != "lambda")
    throw vipeg::InvalidInputError("plot: column must be 'residual' or 'lambda'");
  std::vector<vipeg::PlotSeries> series;
  for (const auto& path : files) {
    const auto trace = vipeg::parse_trace_csv(path);
    vipeg::PlotSeries s;
    s.name = std::filesystem::path(path).stem().string();
    for (const auto& rec : trace)
      s.points.emplace_back(static_cast<double>(rec.iter),
                            column == "residual" ? rec.residual : rec.lambda);
    if (s.points.empty())
      throw vipeg::InvalidInputError("plot: '" + path + "' has no data rows");
    series.push_back(std::move(s));
  }
  vipeg::emit_svg_plot(series, linear ? vipeg::YScale::Linear : vipeg::YScale::Log, out,
                       title.empty() ? column + " per iteration" : title, "iteration", column);
  std::cout << "wrote " << out << " (" << series.size() << " series)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational-inequality solver bench: extrapolated proximal gradient methods and baselines"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment grid from a spec file");
  std::string spec_path, out_override;
  int jobs = 1;
  run->add_option("spec", spec_path, "experiment spec file")->required();
  run->add_option("--out", out_override, "output directory (overrides out_dir in the spec)");
  run->add_option("--jobs", jobs, "worker threads for grid cells")->check(CLI::Range(1, 1024));

  auto* kap = app.add_subcommand("kappa", "print the step-ratio bound kappa(delta)");
  double kd = 1.01;
  bool with_oracle = false;
  int grid = 400;
  kap->add_option("--delta", kd, "extrapolation weight")->required();
  kap->add_flag("--oracle", with_oracle, "also run the grid-search oracle");
  kap->add_option("--grid", grid, "oracle grid cells per axis")->check(CLI::Range(100, 2000));

  auto* demo = app.add_subcommand("demo-divergence", "scalar recursion showing where plain extrapolation fails");
  double dd = 1.0, dl = 0.9, dx0 = 1.0;
  int dsteps = 200;
  demo->add_option("--delta", dd, "extrapolation weight")->required();
  demo->add_option("--lambda", dl, "fixed step size")->required();
  demo->add_option("--x0", dx0, "starting value");
  demo->add_option("--steps", dsteps, "maximum steps");

  auto* plot = app.add_subcommand("plot", "render trace CSVs as an SVG chart");
  std::vector<std::string> plot_files;
  std::string plot_out = "plot.svg", plot_col = "residual", plot_title;
  bool plot_linear = false;
  plot->add_option("traces", plot_files, "trace CSV files")->required();
  plot->add_option("--out", plot_out, "output SVG path");
  plot->add_option("--column", plot_col, "residual or lambda");
  plot->add_flag("--linear", plot_linear, "linear y axis (default: log)");
  plot->add_option("--title", plot_title, "chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(run)) return cmd_run(spec_path, out_override, jobs);
    if (app.got_subcommand(kap)) return cmd_kappa(kd, with_oracle, grid);
    if (app.got_subcommand(demo)) return cmd_demo_divergence(dd, dl, dx0, dsteps);
    if (app.got_subcommand(plot)) return cmd_plot(plot_files, plot_out, plot_col, plot_linear, plot_title);
  } catch (const vipeg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
