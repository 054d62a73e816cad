// edcho: run, compare and sweep consensus scenarios; inspect graphs; design gains.
//
// Exit codes: 0 success, 1 invalid input, 2 divergence.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edcho/engine.hpp"
#include "edcho/graph.hpp"
#include "edcho/io.hpp"
#include "edcho/plot.hpp"
#include "edcho/scenario.hpp"

namespace {

using namespace edcho;

constexpr int kExitInvalid = 1;
constexpr int kExitDiverged = 2;

std::string vec_str(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index k = 0; k < v.size(); ++k) out += (k ? ", " : "") + io::format_double(v(k));
  return out + "]";
}

std::string vec_str(const std::vector<double>& v) {
  return vec_str(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

std::string settling_str(const std::optional<double>& t) { return t ? io::format_double(*t) : "none"; }

void print_metrics(const std::string& name, const Scenario& s, const Metrics& m) {
  std::cout << "scenario: " << name << " (" << protocol_name(s.protocol) << ")\n";
  std::cout << "settling_time: " << settling_str(m.settling_time) << " (threshold "
            << io::format_double(s.threshold()) << ", hold " << io::format_double(s.hold()) << ")\n";
  std::cout << "terminal_error: " << vec_str(m.terminal_error) << "\n";
  std::cout << "conservation_drift: " << vec_str(m.conservation_drift) << "\n";
}

int cmd_run(const std::string& path, const std::string& out_csv, const std::string& out_svg) {
  const Scenario s = io::load_scenario(path);
  const RunResult r = run_scenario(s);
  print_metrics(s.name, s, r.metrics);
  if (!out_csv.empty()) io::write_file_atomic(out_csv, io::trace_csv(r.trace));
  if (!out_svg.empty()) {
    io::write_file_atomic(out_svg, plot::render_svg(plot::trajectory_figure(r.trace, s.signals, s.name)));
  }
  return 0;
}

bool same_signals(const SignalBank& a, const SignalBank& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (io::signal_to_json(a.signals[i]) != io::signal_to_json(b.signals[i])) return false;
  }
  return true;
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& out) {
  std::vector<Scenario> scenarios;
  for (const auto& p : paths) scenarios.push_back(io::load_scenario(p));
  const Scenario& first = scenarios.front();
  for (std::size_t k = 1; k < scenarios.size(); ++k) {
    const Scenario& s = scenarios[k];
    if (!(s.graph == first.graph)) throw io::IoError(paths[k] + ": graph differs from " + paths[0]);
    if (!same_signals(s.signals, first.signals)) throw io::IoError(paths[k] + ": signals differ from " + paths[0]);
    if (!(s.integrator == first.integrator)) {
      throw io::IoError(paths[k] + ": integrator settings differ from " + paths[0]);
    }
  }

  std::vector<RunResult> results;
  for (const auto& s : scenarios) results.push_back(run_scenario(s));

  std::ostringstream table;
  table << "name,protocol,settling_time,terminal_err_0,max_terminal_err\n";
  std::vector<std::string> names;
  std::vector<const Trace*> traces;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const auto& m = results[k].metrics;
    const std::string st = m.settling_time ? io::format_double(*m.settling_time) : "";
    table << scenarios[k].name << ',' << protocol_name(scenarios[k].protocol) << ',' << st << ','
          << io::format_double(m.terminal_error(0)) << ',' << io::format_double(m.terminal_error.maxCoeff()) << '\n';
    print_metrics(scenarios[k].name, scenarios[k], m);
    names.push_back(scenarios[k].name + " (" + protocol_name(scenarios[k].protocol) + ")");
    traces.push_back(&results[k].trace);
  }
  io::write_file_atomic(out + ".csv", table.str());
  io::write_file_atomic(out + ".svg", plot::render_svg(plot::comparison_figure(names, traces)));
  std::cout << "wrote " << out << ".csv and " << out << ".svg\n";
  return 0;
}

int cmd_sweep(const std::string& path, const std::vector<double>& dts, const std::string& out) {
  const Scenario s = io::load_scenario(path);
  const auto rows = accuracy_vs_dt(s, dts);
  for (const auto& r : rows) std::cout << "dt " << io::format_double(r.dt) << ": " << vec_str(r.terminal_error) << "\n";
  io::write_file_atomic(out + ".csv", io::accuracy_table_csv(rows));
  io::write_file_atomic(out + ".svg", plot::render_svg(plot::sweep_figure(rows, s.name)));
  std::cout << "wrote " << out << ".csv and " << out << ".svg\n";
  return 0;
}

int cmd_graph_info(const std::string& source) {
  const Graph g = io::load_graph(source);
  const bool connected = is_connected(g);
  std::cout << "n: " << g.num_nodes() << "\n";
  std::cout << "edges: " << g.num_edges() << "\n";
  std::cout << "connected: " << (connected ? "true" : "false") << "\n";
  if (connected && g.num_nodes() > 1) {
    std::cout << "algebraic_connectivity: " << io::format_double(algebraic_connectivity(g)) << "\n";
  } else {
    std::cout << "algebraic_connectivity: undefined ("
              << (connected ? "single node" : "graph not connected") << ")\n";
  }
  if (connected) {
    std::cout << "flow_space_dim: " << flow_space_dim(g) << "\n";
    const Graph tree = spanning_tree(g);
    std::cout << "spanning_tree:";
    for (const auto& e : tree.edges()) std::cout << " (" << e.from << "," << e.to << ")";
    std::cout << "\n";
  } else {
    std::cout << "flow_space_dim: undefined\nspanning_tree: undefined\n";
  }
  return 0;
}

int cmd_design(int m, const std::vector<double>& lambdas, std::optional<double> k0, const std::string& search,
               std::optional<std::size_t> budget) {
  if (k0.has_value() == !search.empty()) throw io::IoError("design needs exactly one of --k0 or --search");
  if (k0) {
    std::cout << "gains: " << vec_str(design_gains(GainDesign{lambdas, *k0}, m)) << "\n";
    return 0;
  }
  if (!budget) throw io::IoError("--search needs --budget");
  const Scenario base = io::load_scenario(search);
  const auto result = search_k0(base, GainDesign{lambdas, 1.0}, m, *budget);
  for (const auto& a : result.attempts) {
    std::cout << "k0 " << io::format_double(a.k0) << ": "
              << (a.diverged ? "diverged" : a.settled ? "settled at " + settling_str(a.settling_time) : "not settled")
              << ", terminal err_0 " << io::format_double(a.terminal_error0) << "\n";
  }
  std::cout << "k0: " << io::format_double(result.k0) << "\n";
  std::cout << "gains: " << vec_str(result.gains) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact dynamic consensus simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_csv, out_svg, out_path, graph_source, search_path;
  std::vector<std::string> compare_paths;
  std::vector<double> dts{1e-3, 1e-4, 1e-5};
  std::vector<double> lambdas;
  int order = 0;
  std::optional<double> k0;
  std::optional<std::size_t> budget;

  auto* run = app.add_subcommand("run", "integrate one scenario and report metrics");
  run->add_option("scenario", scenario_path, "scenario JSON")->required();
  run->add_option("--out-csv", out_csv, "trace CSV output");
  run->add_option("--out-svg", out_svg, "trajectory/error SVG output");

  auto* compare = app.add_subcommand("compare", "run several protocols on the same setup");
  compare->add_option("scenarios", compare_paths, "scenario JSON files")->required();
  compare->add_option("--out", out_path, "output prefix (.csv and .svg are appended)")->required();

  auto* sweep = app.add_subcommand("sweep-dt", "terminal error as a function of the step size");
  sweep->add_option("scenario", scenario_path, "scenario JSON")->required();
  sweep->add_option("--dts", dts, "step sizes, largest first")->delimiter(',');
  sweep->add_option("--out", out_path, "output prefix (.csv and .svg are appended)")->required();

  auto* info = app.add_subcommand("graph-info", "print graph invariants");
  info->add_option("graph", graph_source, "graph JSON or preset name")->required();

  auto* design = app.add_subcommand("design", "compute protocol gains");
  design->add_option("--m", order, "highest derivative order")->required();
  design->add_option("--lambdas", lambdas, "lambda_1..lambda_m")->delimiter(',');
  design->add_option("--k0", k0, "leading gain");
  design->add_option("--search", search_path, "scenario used to search for k0");
  design->add_option("--budget", budget, "maximum number of k0 candidates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (run->parsed()) return cmd_run(scenario_path, out_csv, out_svg);
    if (compare->parsed()) return cmd_compare(compare_paths, out_path);
    if (sweep->parsed()) return cmd_sweep(scenario_path, dts, out_path);
    if (info->parsed()) return cmd_graph_info(graph_source);
    if (design->parsed()) return cmd_design(order, lambdas, k0, search_path, budget);
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
