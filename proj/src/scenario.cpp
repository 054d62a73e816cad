#include "edcho/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace edcho {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string protocol_name(const ProtocolSpec& p) {
  return std::visit(Overloaded{
                        [](const EdchoProtocol&) { return std::string("edcho"); },
                        [](const LinearProtocol&) { return std::string("linear"); },
                        [](const FosmProtocol&) { return std::string("fosm"); },
                    },
                    p);
}

void Scenario::validate() const {
  const auto n = graph.num_nodes();
  if (signals.size() != n) {
    throw ScenarioError("signal count " + std::to_string(signals.size()) +
                        " does not match graph node count " + std::to_string(n));
  }
  for (const auto& s : signals.signals) {
    try {
      s.validate();
    } catch (const SignalError& e) {
      throw ScenarioError(std::string("invalid signal: ") + e.what());
    }
  }
  if (!is_connected(graph)) throw ScenarioError("graph not connected");
  try {
    integrator.validate();
  } catch (const EngineError& e) {
    throw ScenarioError(std::string("invalid integrator: ") + e.what());
  }
  std::visit(Overloaded{
                 [&](const EdchoProtocol& p) {
                   try {
                     p.config.validate();
                   } catch (const ProtocolError& e) {
                     throw ScenarioError(std::string("invalid protocol: ") + e.what());
                   }
                   if (p.config.order != signals.order) {
                     throw ScenarioError("protocol order does not match signal bank order");
                   }
                 },
                 [](const LinearProtocol& p) {
                   if (!(p.gain > 0.0)) throw ScenarioError("linear gain must be positive");
                 },
                 [](const FosmProtocol& p) {
                   if (!(p.gain > 0.0)) throw ScenarioError("fosm gain must be positive");
                 },
             },
             protocol);
  if (initial_state.rows() != static_cast<Eigen::Index>(n) ||
      initial_state.cols() != static_cast<Eigen::Index>(signals.order) + 1) {
    throw ScenarioError("initial state must be " + std::to_string(n) + "x" +
                        std::to_string(signals.order + 1));
  }
  if (!initial_state.allFinite()) throw ScenarioError("initial state must be finite");
  if (!satisfies_zero_sum(initial_state, 1e-9)) {
    throw ScenarioError(
        "initial state violates the zero-sum condition: every column of x(t0) must sum to 0");
  }
  if (!(bound >= 0.0)) throw ScenarioError("disturbance bound must be >= 0");
  if (settling_threshold && !(*settling_threshold > 0.0)) {
    throw ScenarioError("settling threshold must be positive");
  }
  if (settling_hold && !(*settling_hold > 0.0)) throw ScenarioError("settling hold must be positive");
}

Eigen::Index Scenario::state_columns() const {
  if (const auto* p = std::get_if<EdchoProtocol>(&protocol)) {
    return static_cast<Eigen::Index>(p->config.order) + 1;
  }
  return 1;
}

double Scenario::leading_gain() const {
  return std::visit(Overloaded{
                        [](const EdchoProtocol& p) { return p.config.gains.front(); },
                        [](const LinearProtocol& p) { return p.gain; },
                        [](const FosmProtocol& p) { return p.gain; },
                    },
                    protocol);
}

double Scenario::threshold() const {
  if (settling_threshold) return *settling_threshold;
  return default_settling_threshold(integrator.dt, leading_gain(), bound, graph.num_nodes());
}

double Scenario::hold() const {
  if (settling_hold) return *settling_hold;
  return 0.1 * (integrator.t_end - integrator.t0);
}

Dynamics build_dynamics(const Scenario& s) {
  return std::visit(Overloaded{
                        [&](const EdchoProtocol& p) { return make_edcho(s.graph, p.config, s.signals); },
                        [&](const LinearProtocol& p) { return make_linear(s.graph, p.gain, s.signals); },
                        [&](const FosmProtocol& p) { return make_fosm(s.graph, p.gain, s.signals); },
                    },
                    s.protocol);
}

Trace simulate(const Scenario& s) {
  s.validate();
  const SimState initial{s.initial_state.leftCols(s.state_columns()), s.integrator.t0};
  return integrate(build_dynamics(s), s.signals, initial, s.integrator);
}

RunResult run_scenario(const Scenario& s) {
  RunResult r;
  r.trace = simulate(s);
  r.metrics = compute_metrics(r.trace, s.threshold(), s.hold());
  const double max_gain = std::visit(Overloaded{
                                         [](const EdchoProtocol& p) {
                                           return *std::max_element(p.config.gains.begin(), p.config.gains.end());
                                         },
                                         [](const LinearProtocol& p) { return p.gain; },
                                         [](const FosmProtocol& p) { return p.gain; },
                                     },
                                     s.protocol);
  // Pairwise terms cancel exactly; what remains is float accumulation plus
  // the zero-sum tolerance accepted at validation.
  const double allowed = 1e-8 * static_cast<double>(s.integrator.steps()) * max_gain + 1e-9;
  if (r.metrics.conservation_drift.maxCoeff() > allowed) {
    throw EngineError("column sums of the state drifted beyond " + std::to_string(allowed));
  }
  return r;
}

Scenario with_protocol(const Scenario& s, ProtocolSpec protocol) {
  Scenario out = s;
  out.protocol = std::move(protocol);
  return out;
}

Scenario with_dt(const Scenario& s, double dt) {
  Scenario out = s;
  const double interval = s.integrator.dt * static_cast<double>(s.integrator.record_stride);
  out.integrator.dt = dt;
  out.integrator.record_stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(interval / dt)));
  return out;
}

std::vector<AccuracyRow> accuracy_vs_dt(const Scenario& s, std::span<const double> dts) {
  if (dts.empty()) throw ScenarioError("dt list must not be empty");
  for (std::size_t k = 1; k < dts.size(); ++k) {
    if (!(dts[k] < dts[k - 1])) throw ScenarioError("dt list must be strictly descending");
  }
  std::vector<AccuracyRow> rows;
  rows.reserve(dts.size());
  for (double dt : dts) {
    const Trace trace = simulate(with_dt(s, dt));
    rows.push_back({dt, terminal_error(trace)});
  }
  return rows;
}

namespace presets {

SignalBank scenario8_sinusoids(int order) {
  SignalBank bank;
  bank.order = order;
  for (std::size_t i = 0; i < 8; ++i) {
    bank.signals.push_back(sinusoid(kScenario8Amplitudes[i], kScenario8Frequencies[i], kScenario8Phases[i]));
  }
  return bank;
}

SignalBank scenario8_cubics(int order) {
  SignalBank bank;
  bank.order = order;
  for (double a : kScenario8Amplitudes) bank.signals.push_back(polynomial({0.0, 0.0, 0.0, a}));
  return bank;
}

Eigen::MatrixXd scenario8_initial(int order) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(8, order + 1);
  for (Eigen::Index i = 0; i < 8; ++i) x(i, 0) = kScenario8Initial[i];
  return x;
}

Scenario scenario8_setup(Scenario8Signals signals) {
  Scenario s;
  s.name = signals == Scenario8Signals::kSinusoid ? "scenario8" : "scenario8_cubic";
  s.graph = presets::scenario8();
  s.signals = signals == Scenario8Signals::kSinusoid ? scenario8_sinusoids(3) : scenario8_cubics(3);
  ProtocolConfig cfg;
  cfg.order = 3;
  cfg.gains.assign(std::begin(kScenario8Gains), std::end(kScenario8Gains));
  s.integrator = IntegratorConfig{1e-5, 0.0, 20.0, 100};
  s.bound = disturbance_bound(s.signals, s.integrator.t0, s.integrator.t_end, 10001);
  cfg.bound = s.bound;
  s.protocol = EdchoProtocol{cfg};
  s.initial_state = scenario8_initial(3);
  return s;
}

}  // namespace presets

}  // namespace edcho
