#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <sstream>

#include "edcho/io.hpp"
#include "edcho/plot.hpp"

using namespace edcho;
using io::Json;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "edcho_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

Scenario small_scenario() {
  return io::scenario_from_json(Json::parse(R"({
    "preset": "scenario8",
    "integrator": {"dt": 1e-3, "t_end": 1.0, "record_stride": 10}
  })"));
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(GraphJson, RoundTripAndPresets) {
  const Graph g(4, {{0, 1}, {2, 1}, {3, 0}});
  EXPECT_EQ(io::graph_from_json(io::graph_to_json(g)), g);
  EXPECT_EQ(io::graph_from_json(Json("complete:3")), presets::complete(3));
  EXPECT_THROW(io::graph_from_json(Json::parse(R"({"n": 3})")), io::IoError);
  EXPECT_THROW(io::graph_from_json(Json::parse(R"({"n": 3, "edges": [[0, 1, 2]]})")), io::IoError);
  EXPECT_THROW(io::graph_from_json(Json::parse(R"({"n": 3, "edges": [[0, 3]]})")), GraphError);
}

TEST(GraphJson, LoadFromFile) {
  const auto path = temp_dir() / "g.json";
  io::write_file_atomic(path.string(), R"({"n": 3, "edges": [[0, 1], [1, 2]]})");
  EXPECT_EQ(io::load_graph(path.string()), presets::path(3));
  EXPECT_EQ(io::load_graph("scenario8"), presets::scenario8());
}

TEST(SignalJson, RoundTrip) {
  const std::vector<SignalSpec> specs = {sinusoid(0.5, 2.0, 1.0), polynomial({1, 2, 3}), constant(-1.5),
                                         sum({constant(1.0), sinusoid(1.0, 1.0, 0.0)})};
  for (const auto& s : specs) {
    const auto back = io::signal_from_json(io::signal_to_json(s));
    for (int mu = 0; mu < 4; ++mu) {
      EXPECT_EQ(eval_derivative(back, mu, 0.7), eval_derivative(s, mu, 0.7));
    }
  }
}

TEST(SignalJson, Errors) {
  EXPECT_THROW(io::signal_from_json(Json::parse(R"({"kind": "square"})")), io::IoError);
  EXPECT_THROW(io::signal_from_json(Json::parse(R"({"kind": "sinusoid", "a": -1, "omega": 1})")), io::IoError);
  EXPECT_THROW(io::signal_from_json(Json::parse(R"({"kind": "polynomial", "coeffs": []})")), io::IoError);
  EXPECT_THROW(io::signal_from_json(Json::parse(R"({"kind": "constant", "c": 1, "x": 2})")), io::IoError);
}

TEST(ScenarioJson, PresetExpandsToFullSetup) {
  const auto s = io::scenario_from_json(Json::parse(R"({"preset": "scenario8"})"));
  const auto ref = presets::scenario8_setup();
  EXPECT_EQ(s.graph, ref.graph);
  EXPECT_EQ(s.integrator, ref.integrator);
  EXPECT_EQ(s.initial_state, ref.initial_state);
  EXPECT_EQ(std::get<EdchoProtocol>(s.protocol).config.gains, std::get<EdchoProtocol>(ref.protocol).config.gains);
  EXPECT_DOUBLE_EQ(s.bound, ref.bound);
  ASSERT_EQ(s.signals.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(eval_derivative(s.signals.signals[i], 2, 1.3), eval_derivative(ref.signals.signals[i], 2, 1.3));
  }
}

TEST(ScenarioJson, GraphPresetReferenceWithExplicitFields) {
  const auto s = io::scenario_from_json(Json::parse(R"({
    "graph": "scenario8",
    "signals": "scenario8",
    "protocol": {"kind": "edcho", "m": 1, "lambdas": [1.5], "k0": 4, "L": 2.5},
    "initial_state": "scenario8"
  })"));
  EXPECT_EQ(s.graph, presets::scenario8());
  EXPECT_EQ(s.signals.order, 1);
  EXPECT_EQ(s.bound, 2.5);
  EXPECT_EQ(std::get<EdchoProtocol>(s.protocol).config.gains, (std::vector<double>{4.0, 1.5}));
  EXPECT_EQ(s.initial_state.cols(), 2);
  EXPECT_EQ(s.integrator, IntegratorConfig{});
}

TEST(ScenarioJson, BoundComputedWhenAbsent) {
  const auto s = io::scenario_from_json(Json::parse(R"({"preset": "scenario8", "protocol": {"kind": "fosm", "k": 7.5}})"));
  EXPECT_DOUBLE_EQ(s.bound, disturbance_bound(presets::scenario8_sinusoids(0), 0.0, 20.0, 10001));
  EXPECT_EQ(s.initial_state.cols(), 1);
}

TEST(ScenarioJson, ValidationErrors) {
  // Column sum 1 instead of 0.
  EXPECT_THROW(io::scenario_from_json(Json::parse(R"({
    "graph": "path:2", "signals": [{"kind": "constant", "c": 1}, {"kind": "constant", "c": 0}],
    "protocol": {"kind": "linear", "k": 1}, "initial_state": [[1.0], [0.0]]
  })")), ScenarioError);
  // Three signals on two nodes.
  EXPECT_THROW(io::scenario_from_json(Json::parse(R"({
    "graph": "path:2",
    "signals": [{"kind": "constant", "c": 1}, {"kind": "constant", "c": 0}, {"kind": "constant", "c": 2}],
    "protocol": {"kind": "linear", "k": 1}
  })")), ScenarioError);
  EXPECT_THROW(io::scenario_from_json(Json::parse(R"({"preset": "scenario8", "colour": 1})")), io::IoError);
  EXPECT_THROW(io::scenario_from_json(Json::parse(R"({"preset": "nope"})")), io::IoError);
  EXPECT_THROW(io::scenario_from_json(Json::parse(R"({"preset": "scenario8", "graph": "path:4"})")), io::IoError);
  EXPECT_THROW(io::scenario_from_json(Json::parse(R"({"preset": "scenario8", "protocol": {"kind": "pid"}})")),
               io::IoError);
}

TEST(ScenarioJson, ParseErrorReportsPosition) {
  try {
    io::parse_json_text("{\"graph\": [1, 2,, 3]}", "bad.json");
    FAIL() << "expected IoError";
  } catch (const io::IoError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("bad.json"), std::string::npos);
    EXPECT_NE(msg.find("byte 17"), std::string::npos);
  }
  EXPECT_THROW(io::load_scenario((temp_dir() / "missing.json").string()), io::IoError);
}

TEST(TraceCsv, HeaderLayout) {
  const auto h = io::trace_header(2, 2);
  const std::vector<std::string> expect{"t",      "x_0_0",  "x_0_1",  "x_1_0",      "x_1_1",     "y_0_0",
                                        "y_0_1",  "y_1_0",  "y_1_1",  "err_norm_0", "err_norm_1"};
  EXPECT_EQ(h, expect);
  // Eight agents, four columns: t + 32 states + 32 outputs + 4 norms.
  EXPECT_EQ(io::trace_header(8, 4).size(), 69u);
}

TEST(TraceCsv, RoundTripIsBitwise) {
  const auto s = small_scenario();
  const auto tr = simulate(s);
  std::istringstream in(io::trace_csv(tr));
  const auto table = io::parse_csv(in);
  ASSERT_EQ(table.rows.size(), tr.size());
  ASSERT_EQ(table.header.size(), 69u);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const auto& row = table.rows[k];
    std::size_t c = 0;
    EXPECT_TRUE(bit_equal(row[c++], tr.times[k]));
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index mu = 0; mu < 4; ++mu) EXPECT_TRUE(bit_equal(row[c++], tr.states[k](i, mu)));
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index mu = 0; mu < 4; ++mu) EXPECT_TRUE(bit_equal(row[c++], tr.outputs[k](i, mu)));
    for (Eigen::Index mu = 0; mu < 4; ++mu) EXPECT_TRUE(bit_equal(row[c++], tr.error_norms[k](mu)));
  }
}

TEST(TraceCsv, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 5e-324}) {
    EXPECT_TRUE(bit_equal(std::strtod(io::format_double(v).c_str(), nullptr), v));
  }
}

TEST(TraceCsv, ParseErrors) {
  std::istringstream bad("a,b\n1,x\n");
  EXPECT_THROW(io::parse_csv(bad), io::IoError);
  std::istringstream ragged("a,b\n1\n");
  EXPECT_THROW(io::parse_csv(ragged), io::IoError);
}

TEST(AtomicWrite, ReplacesFileWithoutLeftovers) {
  const auto dir = temp_dir() / "atomic";
  std::filesystem::remove_all(dir);
  const auto path = dir / "out.csv";
  io::write_file_atomic(path.string(), "first\n");
  io::write_file_atomic(path.string(), "second\n");
  EXPECT_EQ(io::read_file(path.string()), "second\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1u);
}

TEST(AccuracyTable, Layout) {
  std::vector<AccuracyRow> rows{{1e-3, Eigen::Vector2d(0.5, 2.0)}, {1e-4, Eigen::Vector2d(0.25, 1.0)}};
  EXPECT_EQ(io::accuracy_table_csv(rows), "dt,terminal_err_0,terminal_err_1\n0.001,0.5,2\n0.0001,0.25,1\n");
}

TEST(Svg, RenderingLeavesMetricsUntouched) {
  const auto s = small_scenario();
  const auto r = run_scenario(s);
  const Trace before = r.trace;
  const std::string svg = plot::render_svg(plot::trajectory_figure(r.trace, s.signals, s.name));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("#d62728"), std::string::npos);
  const auto m = compute_metrics(r.trace, s.threshold(), s.hold());
  EXPECT_EQ(m.terminal_error, r.metrics.terminal_error);
  EXPECT_EQ(m.settling_time, r.metrics.settling_time);
  EXPECT_EQ(m.conservation_drift, r.metrics.conservation_drift);
  for (std::size_t k = 0; k < before.size(); ++k) EXPECT_EQ(before.states[k], r.trace.states[k]);
}

TEST(Svg, LogAxesSkipNonPositiveValues) {
  plot::Figure fig;
  plot::Panel p;
  p.log_y = true;
  p.series.push_back({"s", {0, 1, 2, 3}, {1.0, 0.0, 1e-3, 10.0}, "", 1.0});
  fig.panels.push_back(p);
  const auto svg = plot::render_svg(fig);
  // The zero splits the series into two polylines.
  std::size_t count = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
  EXPECT_EQ(count, 2u);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}

TEST(Svg, SweepAndComparisonFigures) {
  std::vector<AccuracyRow> rows{{1e-3, Eigen::Vector2d(0.5, 2.0)}, {1e-4, Eigen::Vector2d(0.05, 1.0)}};
  const auto sweep = plot::sweep_figure(rows, "sweep");
  ASSERT_EQ(sweep.panels.size(), 1u);
  EXPECT_TRUE(sweep.panels[0].log_x);
  EXPECT_TRUE(sweep.panels[0].log_y);
  EXPECT_EQ(sweep.panels[0].series.size(), 2u);

  const auto s = small_scenario();
  const auto tr = simulate(s);
  const auto cmp = plot::comparison_figure({"a", "b"}, {&tr, &tr});
  EXPECT_EQ(cmp.panels[0].series.size(), 2u);
  EXPECT_FALSE(plot::render_svg(cmp).empty());
}
