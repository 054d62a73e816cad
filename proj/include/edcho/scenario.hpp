#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "edcho/engine.hpp"
#include "edcho/graph.hpp"
#include "edcho/protocols.hpp"
#include "edcho/signals.hpp"

namespace edcho {

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EdchoProtocol {
  ProtocolConfig config;
};
struct LinearProtocol {
  double gain = 1.0;
};
struct FosmProtocol {
  double gain = 1.0;
};
using ProtocolSpec = std::variant<EdchoProtocol, LinearProtocol, FosmProtocol>;

std::string protocol_name(const ProtocolSpec& p);

/// One simulation experiment: topology, references, protocol, step control
/// and initial agent states.
struct Scenario {
  std::string name;
  Graph graph = presets::path(1);
  SignalBank signals;
  ProtocolSpec protocol;
  IntegratorConfig integrator;
  /// n x (m+1) with m = signals.order; baselines use the first column only.
  Eigen::MatrixXd initial_state;
  /// Disturbance bound L used for the settling threshold.
  double bound = 0.0;
  std::optional<double> settling_threshold;
  std::optional<double> settling_hold;

  /// Enforces signal/graph counts, protocol order, zero column sums of the
  /// initial state and integrator sanity. Throws ScenarioError.
  void validate() const;

  Eigen::Index state_columns() const;
  double leading_gain() const;
  double threshold() const;
  double hold() const;
};

struct RunResult {
  Trace trace;
  Metrics metrics;
};

Dynamics build_dynamics(const Scenario& s);
Trace simulate(const Scenario& s);
RunResult run_scenario(const Scenario& s);

/// Returns a copy with a different protocol, keeping everything else.
Scenario with_protocol(const Scenario& s, ProtocolSpec protocol);

/// Returns a copy with a different step size (record_stride rescaled so the
/// recording interval is kept where possible).
Scenario with_dt(const Scenario& s, double dt);

struct AccuracyRow {
  double dt = 0.0;
  Eigen::VectorXd terminal_error;
};

/// Terminal consensus error per mu for each step size, in input order.
std::vector<AccuracyRow> accuracy_vs_dt(const Scenario& s, std::span<const double> dts);

// ---------------------------------------------------------------------------
// k0 search

struct K0Attempt {
  double k0 = 0.0;
  bool settled = false;
  bool diverged = false;
  std::optional<double> settling_time;
  double terminal_error0 = 0.0;
};

struct K0SearchResult {
  double k0 = 0.0;
  std::vector<double> gains;
  std::vector<K0Attempt> attempts;
};

/// Doubles k0 from `design.k0` until a run of `base` with gains from
/// design_gains settles, trying at most `budget` candidates. `base` supplies
/// graph, signals, initial state, integrator and settling settings; its
/// protocol is replaced. Throws ProtocolError when the budget runs out.
K0SearchResult search_k0(const Scenario& base, const GainDesign& design, int order,
                         std::size_t budget);

// ---------------------------------------------------------------------------
// Eight-agent reproduction setup

namespace presets {

inline constexpr double kScenario8Amplitudes[] = {0.99, 0.27, 0.02, 0.48, 0.18, 0.24, 0.65, 0.50};
inline constexpr double kScenario8Frequencies[] = {2.44, 1.70, 1.12, 0.26, 0.68, 1.73, 2.33, 0.02};
inline constexpr double kScenario8Phases[] = {1.25, 1.92, 6.25, 3.82, 0.70, 7.63, 9.93, 6.80};
inline constexpr double kScenario8Initial[] = {18.69, -4.17, -2.02, -1.49, -4.65, -4.52, 0.16, -2.00};
inline constexpr double kScenario8Gains[] = {7.5, 19.25, 17.75, 7.0};
inline constexpr double kScenario8LinearGain = 1.0;
inline constexpr double kScenario8FosmGain = 7.5;

SignalBank scenario8_sinusoids(int order = 3);
SignalBank scenario8_cubics(int order = 3);

/// First column from the eight listed values, higher columns zero.
Eigen::MatrixXd scenario8_initial(int order = 3);

enum class Scenario8Signals { kSinusoid, kCubic };

/// Full eight-agent high-order run: m = 3, listed gains, dt = 1e-5 over
/// 20 time units, recording every 100 steps.
Scenario scenario8_setup(Scenario8Signals signals = Scenario8Signals::kSinusoid);

}  // namespace presets

}  // namespace edcho
