#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "capsim/analysis.hpp"
#include "capsim/config.hpp"
#include "capsim/engine.hpp"
#include "capsim/metrics.hpp"

namespace {

std::map<std::string, std::string> parse_params(const std::string& params) {
  std::map<std::string, std::string> out;
  std::stringstream ss(params);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--params", "expected key=value pairs: " + item);
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double param_d(const std::map<std::string, std::string>& p, const std::string& k,
               double def) {
  auto it = p.find(k);
  return it == p.end() ? def : std::stod(it->second);
}

int param_i(const std::map<std::string, std::string>& p, const std::string& k, int def) {
  auto it = p.find(k);
  return it == p.end() ? def : std::stoi(it->second);
}

void write_csv(const std::string& path, const std::vector<std::string>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << capsim::MetricsReport::csv_header() << '\n';
  for (const auto& r : rows) out << r << '\n';
}

int cmd_run(const std::string& config_path, std::uint64_t seed, bool seed_set,
            const std::string& out_path, const std::vector<std::string>& overrides,
            bool include_warmup) {
  capsim::ExperimentConfig cfg = capsim::load_config_file(config_path);
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw std::runtime_error("--set expects key=value: " + ov);
    capsim::apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
  }
  if (seed_set) cfg.seed = seed;
  if (include_warmup) cfg.include_warmup = true;
  cfg.validate();

  const capsim::MetricsReport report = capsim::run_experiment(cfg);
  if (!out_path.empty()) write_csv(out_path, {report.csv_row()});
  std::cout << report.to_json() << '\n';
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis, int n_seeds,
              const std::string& out_path, const std::vector<std::string>& overrides) {
  capsim::ExperimentConfig cfg = capsim::load_config_file(config_path);
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw std::runtime_error("--set expects key=value: " + ov);
    capsim::apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
  }

  std::string axis_key;
  std::vector<std::string> values;
  if (!axis.empty()) {
    const auto eq = axis.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--axis expects name=v1,v2,...: " + axis);
    axis_key = axis.substr(0, eq);
    std::stringstream ss(axis.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(item);
  }

  const auto points = capsim::run_sweep(cfg, axis_key, values, n_seeds,
                                        capsim::thread_count_from_env());

  std::vector<std::string> rows;
  struct Agg {
    int n = 0;
    double sum = 0, sum2 = 0, cbr = 0;
  };
  std::map<std::string, Agg> agg;
  int failures = 0;
  for (const auto& p : points) {
    if (!p.ok) {
      ++failures;
      std::cerr << "point " << p.axis_value << " seed " << p.seed << " failed: " << p.error
                << '\n';
      continue;
    }
    rows.push_back(p.report.csv_row());
    Agg& a = agg[p.axis_value];
    ++a.n;
    a.sum += p.report.avg_aoi_ms;
    a.sum2 += p.report.avg_aoi_ms * p.report.avg_aoi_ms;
    a.cbr += p.report.cbr;
  }
  if (!out_path.empty()) write_csv(out_path, rows);

  std::cout << "axis_value,n,mean_aoi,std_aoi,mean_cbr\n";
  for (const auto& [val, a] : agg) {
    const double mean = a.sum / a.n;
    const double var = std::max(0.0, a.sum2 / a.n - mean * mean);
    std::cout << (val.empty() ? "-" : val) << ',' << a.n << ',' << mean << ','
              << std::sqrt(var) << ',' << a.cbr / a.n << '\n';
  }
  return failures == 0 ? 0 : 1;
}

int cmd_analyze(const std::string& theorem, const std::string& params) {
  const auto p = parse_params(params);
  std::cout.precision(10);
  if (theorem == "static") {
    capsim::StaticAnalysisInput in;
    in.n_subch = param_i(p, "n_subch", 4);
    in.rri_ms = param_i(p, "rri", 50);
    in.t_fix_ms = param_d(p, "t_upd", 1000);
    const int v = param_i(p, "v", 0);
    std::cout << "aoi_static(" << in.n_subch << ", " << in.rri_ms << ", " << in.t_fix_ms
              << ") = " << capsim::aoi_static(in) << '\n';
    std::cout << "aoi_ideal(" << in.rri_ms << ") = " << capsim::aoi_ideal(in.rri_ms) << '\n';
    if (v >= 2) {
      const auto e = capsim::set_expectations(in.n_subch, in.rri_ms, v);
      std::cout << "E|same_subframe| = " << e.same_subframe << '\n'
                << "E|other_subframe| = " << e.other_subframe << '\n'
                << "E|transmitting_now| = " << e.transmitting_now << '\n'
                << "E|idle_now| = " << e.idle_now << '\n'
                << "E|other_subframe_tx| = " << e.other_subframe_tx << '\n'
                << "E|other_subframe_idle| = " << e.other_subframe_idle << '\n';
    }
  } else if (theorem == "dynamic") {
    capsim::DynamicAnalysisInput in;
    in.base.n_subch = param_i(p, "n_subch", 4);
    in.base.rri_ms = param_i(p, "rri", 50);
    in.base.t_fix_ms = param_d(p, "t_upd", 1000);
    in.x = param_d(p, "x", 0.7);
    in.y = param_d(p, "y", in.x);
    in.v0 = param_i(p, "v0", 40);
    std::cout << "collisions_per_rri = " << capsim::collision_count_per_rri(in) << '\n';
    std::cout << "aoi_dynamic = " << capsim::aoi_dynamic(in) << '\n';
  } else if (theorem == "optimal-rri") {
    const double t_upd = param_d(p, "t_upd", 400);
    const int n_subch = param_i(p, "n_subch", 4);
    const int t_ost = param_i(p, "t_ost", 5);
    const auto r = capsim::optimal_rri(t_upd, n_subch, t_ost);
    std::cout << "theoretical_ms = " << r.theoretical_ms << '\n';
    std::cout << "practical_ms = " << r.practical_ms << '\n';
  } else if (theorem == "convergence") {
    const int c = param_i(p, "c", 50);
    const int v = param_i(p, "v", 40);
    const auto m = capsim::convergence_margin(c, v);
    std::cout << "min_margin = " << m.min_value << '\n';
    std::cout << "argmin_free_subch = " << m.argmin_free_subch << '\n';
    std::cout << "argmin_reselectors = " << m.argmin_reselectors << '\n';
    std::cout << "all_positive = " << (m.all_positive ? "true" : "false") << '\n';
  } else {
    throw std::runtime_error("unknown theorem: " + theorem);
  }
  return 0;
}

int cmd_plot(const std::string& in_path, const std::string& x_col, const std::string& y_col,
             const std::string& series_col) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open: " + in_path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + in_path);

  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  auto col_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return static_cast<int>(i);
    throw std::runtime_error("no such column: " + name);
  };
  const int xi = col_index(x_col);
  const int yi = col_index(y_col);
  const int si = series_col.empty() ? -1 : col_index(series_col);

  std::cout << "x,y,series\n";
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) f.push_back(c);
    if (f.size() < cols.size()) continue;
    std::cout << f[xi] << ',' << f[yi] << ',' << (si >= 0 ? f[si] : std::string("all"))
              << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sidelink MAC scheduling simulator and analytical toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, axis, theorem, params, plot_in, x_col, y_col, series_col;
  std::uint64_t seed = 0;
  int n_seeds = 1;
  bool include_warmup = false;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", config_path, "config file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "seed override");
  run->add_option("--out", out_path, "CSV output path");
  run->add_option("--set", overrides, "key=value config overrides");
  run->add_flag("--include-warmup", include_warmup, "measure from t = 0");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("--config", config_path, "config file")->required();
  sweep->add_option("--axis", axis, "axis as key=v1,v2,...");
  sweep->add_option("--seeds", n_seeds, "seeds per point");
  sweep->add_option("--out", out_path, "CSV output path");
  sweep->add_option("--set", overrides, "key=value config overrides");

  auto* analyze = app.add_subcommand("analyze", "Evaluate closed-form results");
  analyze->add_option("--theorem", theorem, "static | dynamic | optimal-rri | convergence")
      ->required();
  analyze->add_option("--params", params, "comma-separated key=value parameters");

  auto* plot = app.add_subcommand("plot", "Reshape a results CSV into (x, y, series)");
  plot->add_option("--in", plot_in, "input CSV")->required();
  plot->add_option("--x", x_col, "x column")->required();
  plot->add_option("--y", y_col, "y column")->required();
  plot->add_option("--series", series_col, "series column");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, seed, seed_opt->count() > 0, out_path, overrides,
                     include_warmup);
    if (sweep->parsed()) return cmd_sweep(config_path, axis, n_seeds, out_path, overrides);
    if (analyze->parsed()) return cmd_analyze(theorem, params);
    if (plot->parsed()) return cmd_plot(plot_in, x_col, y_col, series_col);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
