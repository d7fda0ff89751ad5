// Command-line front end: run Monte Carlo experiments from a JSON config,
// sweep one instance parameter over a grid, evaluate the bound solvers,
// and plot CSV columns as an SVG chart.
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rested/harness.hpp"
#include "rested/svg.hpp"

namespace {

using namespace rested;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot read file: " + path);
  return std::string(std::istreambuf_iterator<char>(f),
                     std::istreambuf_iterator<char>());
}

double parse_double_strict(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number in " + what + ": " +
                                std::string(s));
  }
  return v;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(
          parse_double_strict({s.data() + start, i - start}, "--grid"));
      start = i + 1;
    }
  }
  if (out.empty()) throw std::invalid_argument("--grid must be non-empty");
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

CsvTable read_csv(const std::string& path) {
  const std::string text = read_file(path);
  CsvTable table;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.emplace_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (table.header.empty()) {
      table.header = std::move(fields);
    } else {
      if (fields.size() != table.header.size()) {
        throw std::invalid_argument("csv row width mismatch in " + path);
      }
      table.rows.push_back(std::move(fields));
    }
  }
  if (table.header.empty()) {
    throw std::invalid_argument("empty csv: " + path);
  }
  return table;
}

int do_run(const std::string& config_path, const std::string& policy,
           bool seed_set, std::uint64_t seed, int threads) {
  ExperimentConfig cfg = config_from_json_text(read_file(config_path));
  if (!policy.empty()) cfg.policies = {policy};
  if (seed_set) cfg.base_seed = seed;
  cfg.validate();
  const MonteCarloResult result = monte_carlo(cfg, threads);
  std::filesystem::create_directories(cfg.output_dir);
  const std::string rec_path = cfg.output_dir + "/records.csv";
  const std::string stats_path = cfg.output_dir + "/stats.csv";
  emit_csv(result.records, rec_path);
  emit_csv(result.stats, stats_path);
  std::cout << to_csv(result.stats);
  std::cerr << "wrote " << rec_path << " and " << stats_path << "\n";
  return 0;
}

int do_sweep(const std::string& config_path, const std::string& param,
             const std::string& grid_text, int threads) {
  const ExperimentConfig base = config_from_json_text(read_file(config_path));
  const std::vector<double> grid = parse_grid(grid_text);
  std::string csv =
      "param,value,policy,runs,mean_regret,std_regret,q50,q90,q99,"
      "frac_exceed,mean_tau_out\n";
  for (double v : grid) {
    ExperimentConfig cfg = base;
    if (param == "delta_gap") {
      if (cfg.instance.num_arms() != 2) {
        throw std::invalid_argument(
            "sweep over delta_gap needs a 2-arm instance");
      }
      cfg.instance.arms[1].alpha = cfg.instance.arms[0].alpha;
      cfg.instance.arms[1].beta = cfg.instance.arms[0].beta + v;
    } else if (param == "T") {
      if (!(v > 0.0) || v != std::floor(v)) {
        throw std::invalid_argument("T grid values must be positive integers");
      }
      cfg.instance.horizon_T = static_cast<long>(v);
      if (!cfg.delta_explicit) cfg.delta = 1.0 / v;
    } else {  // "rho": the option validator admits nothing else
      cfg.instance.rho = v;
    }
    cfg.validate();
    const MonteCarloResult result = monte_carlo(cfg, threads);
    for (const auto& s : result.stats.per_policy) {
      csv += param;
      csv += ',';
      csv += format_double(v);
      csv += ',';
      csv += s.policy;
      csv += ',';
      csv += std::to_string(s.runs);
      csv += ',';
      csv += format_double(s.mean_regret);
      csv += ',';
      csv += format_double(s.std_regret);
      csv += ',';
      csv += format_double(s.q50);
      csv += ',';
      csv += format_double(s.q90);
      csv += ',';
      csv += format_double(s.q99);
      csv += ',';
      csv += format_double(s.frac_exceed);
      csv += ',';
      csv += format_double(s.mean_tau_out);
      csv += '\n';
    }
  }
  std::filesystem::create_directories(base.output_dir);
  const std::string path = base.output_dir + "/sweep.csv";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << csv;
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + path);
  std::cout << csv;
  std::cerr << "wrote " << path << "\n";
  return 0;
}

int do_theory(const std::string& kind, double alpha, double dgap, double rho,
              double C, double U, long T, double kappa,
              const std::string& mode, const std::string& exponent,
              const std::string& instance_path, const std::string& out_path) {
  const auto need = [](double v, const char* name) {
    if (std::isnan(v)) {
      throw std::invalid_argument(std::string("theory: --") + name +
                                  " is required for this kind");
    }
    return v;
  };
  const auto need_T = [&]() {
    if (T < 1) throw std::invalid_argument("theory: --T is required");
    return T;
  };
  const SolveMode m =
      mode == "bisect" ? SolveMode::Bisect : SolveMode::Scan;

  BoundReport rep;
  if (kind == "tau_sub") {
    rep = tau_sub(need(alpha, "alpha"), need(dgap, "delta-gap"), rho, C,
                  need_T(), m);
  } else if (kind == "tau_sub_exact") {
    if (m == SolveMode::Bisect) {
      throw std::invalid_argument("tau_sub_exact supports scan mode only");
    }
    rep = tau_sub_exact(need(alpha, "alpha"), need(dgap, "delta-gap"), rho,
                        C, need_T());
  } else if (kind == "cor1_tau_sub") {
    rep = cor1_tau_sub(need(alpha, "alpha"), need(dgap, "delta-gap"), C,
                       need_T(), m);
  } else if (kind == "etc_n0") {
    rep = etc_n0(need(alpha, "alpha"), need(dgap, "delta-gap"), rho, U,
                 need_T(), kappa, m);
  } else if (kind == "cor2_n0") {
    rep = cor2_n0(need(alpha, "alpha"), need(dgap, "delta-gap"), U, need_T(),
                  m);
  } else {  // "nbar": the option validator admits nothing else
    if (instance_path.empty()) {
      throw std::invalid_argument("theory: --instance is required for nbar");
    }
    const BanditInstance inst =
        instance_from_json_text(read_file(instance_path));
    rep = rest_sure_nbar(inst, exponent == "squared"
                                   ? CRhoExponent::SquaredOnly
                                   : CRhoExponent::FourthPower);
  }

  const std::vector<BoundReport> reports{rep};
  if (!out_path.empty()) emit_csv(reports, out_path);
  std::cout << to_csv(reports);
  for (const auto& st : rep.stages) {
    std::cout << "# stage " << st.stage << ": arm " << st.arm << ", pulls "
              << st.pulls << ", witness " << to_string(st.witness)
              << ", tau_out " << st.tau_out << "\n";
  }
  return 0;
}

int do_plot(const std::string& input, const std::string& x_col,
            const std::string& y_col, const std::string& out_path,
            bool log_x, bool log_y) {
  const CsvTable table = read_csv(input);
  const int xc = table.column(x_col);
  const int yc = table.column(y_col);
  if (xc < 0) throw std::invalid_argument("no such column: " + x_col);
  if (yc < 0) throw std::invalid_argument("no such column: " + y_col);
  const int pc = table.column("policy");

  std::vector<PlotSeries> series;
  for (const auto& row : table.rows) {
    const std::string label =
        pc >= 0 ? row[static_cast<std::size_t>(pc)] : y_col;
    PlotSeries* dst = nullptr;
    for (auto& s : series) {
      if (s.label == label) {
        dst = &s;
        break;
      }
    }
    if (!dst) {
      series.push_back({label, {}});
      dst = &series.back();
    }
    dst->points.emplace_back(
        parse_double_strict(row[static_cast<std::size_t>(xc)], x_col),
        parse_double_strict(row[static_cast<std::size_t>(yc)], y_col));
  }
  PlotAxes axes;
  axes.x_label = x_col;
  axes.y_label = y_col;
  axes.log_x = log_x;
  axes.log_y = log_y;
  emit_svg_plot(series, out_path, axes);
  std::cerr << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rested-bandit simulation, inference, and bound toolkit"};
  app.require_subcommand(1);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto* run_cmd =
      app.add_subcommand("run", "run a Monte Carlo experiment from a config");
  std::string run_config, run_policy;
  std::uint64_t run_seed = 0;
  int run_threads = 0;
  run_cmd->add_option("--config", run_config, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--policy", run_policy,
                      "restrict to one policy (etc|rest_sure|uniform|greedy)");
  auto* seed_opt =
      run_cmd->add_option("--seed", run_seed, "override the base seed");
  run_cmd->add_option("--threads", run_threads,
                      "worker threads, 0 = hardware");

  auto* sweep_cmd = app.add_subcommand(
      "sweep", "rerun the experiment over a grid of one parameter");
  std::string sweep_config, sweep_param, sweep_grid;
  int sweep_threads = 0;
  sweep_cmd->add_option("--config", sweep_config, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--param", sweep_param, "which parameter to sweep")
      ->required()
      ->check(CLI::IsMember({"delta_gap", "T", "rho"}));
  sweep_cmd->add_option("--grid", sweep_grid, "comma-separated values")
      ->required();
  sweep_cmd->add_option("--threads", sweep_threads,
                        "worker threads, 0 = hardware");

  auto* theory_cmd =
      app.add_subcommand("theory", "evaluate a bound solver, emit CSV");
  std::string th_kind, th_mode = "scan", th_exponent = "fourth";
  std::string th_instance, th_out;
  double th_alpha = nan, th_dgap = nan, th_rho = 0.5, th_C = 0.5, th_U = 1.0,
         th_kappa = 0.0;
  long th_T = 0;
  theory_cmd->add_option("--kind", th_kind, "which bound to compute")
      ->required()
      ->check(CLI::IsMember({"tau_sub", "tau_sub_exact", "cor1_tau_sub",
                             "etc_n0", "cor2_n0", "nbar"}));
  theory_cmd->add_option("--alpha", th_alpha, "decay amplitude");
  theory_cmd->add_option("--delta-gap", th_dgap, "stationary gap Delta");
  theory_cmd->add_option("--rho", th_rho, "decay exponent (default 0.5)");
  theory_cmd->add_option("--C", th_C, "constant C (default 0.5)");
  theory_cmd->add_option("--U", th_U, "amplitude cap U (default 1)");
  theory_cmd->add_option("--T", th_T, "horizon");
  theory_cmd->add_option("--kappa", th_kappa,
                         "residual calibration constant (etc_n0)");
  theory_cmd->add_option("--mode", th_mode, "solver mode")
      ->check(CLI::IsMember({"scan", "bisect"}));
  theory_cmd
      ->add_option("--exponent", th_exponent,
                   "stage-constant exponent (nbar)")
      ->check(CLI::IsMember({"fourth", "squared"}));
  theory_cmd->add_option("--instance", th_instance,
                         "instance JSON (nbar only)");
  theory_cmd->add_option("--out", th_out, "also write the CSV here");

  auto* plot_cmd =
      app.add_subcommand("plot", "plot two CSV columns as an SVG chart");
  std::string plot_input, plot_x, plot_y, plot_out;
  bool plot_logx = false, plot_logy = false;
  plot_cmd->add_option("--input", plot_input, "input CSV")
      ->required()
      ->check(CLI::ExistingFile);
  plot_cmd->add_option("--x", plot_x, "x column name")->required();
  plot_cmd->add_option("--y", plot_y, "y column name")->required();
  plot_cmd->add_option("--out", plot_out, "output SVG path")->required();
  plot_cmd->add_flag("--logx", plot_logx, "log-scale x axis");
  plot_cmd->add_flag("--logy", plot_logy, "log-scale y axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad arguments are config errors
  }

  try {
    if (*run_cmd) {
      return do_run(run_config, run_policy, seed_opt->count() > 0, run_seed,
                    run_threads);
    }
    if (*sweep_cmd) {
      return do_sweep(sweep_config, sweep_param, sweep_grid, sweep_threads);
    }
    if (*theory_cmd) {
      return do_theory(th_kind, th_alpha, th_dgap, th_rho, th_C, th_U, th_T,
                       th_kappa, th_mode, th_exponent, th_instance, th_out);
    }
    return do_plot(plot_input, plot_x, plot_y, plot_out, plot_logx,
                   plot_logy);
  } catch (const rested::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
