#include "edcho/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

namespace edcho::io {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw IoError(where + ": missing key '" + key + "'");
  }
  return j.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw IoError(where + ": expected a number");
  return j.get<double>();
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) throw IoError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, where));
  return out;
}

std::size_t count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw IoError(where + ": expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw IoError(where + ": unknown key '" + key + "'");
  }
}

Json scenario8_defaults(const std::string& preset) {
  Json j;
  j["name"] = preset;
  j["graph"] = "scenario8";
  j["signals"] = preset;
  j["protocol"] = {{"kind", "edcho"},
                   {"m", 3},
                   {"gains", std::vector<double>(std::begin(presets::kScenario8Gains),
                                                 std::end(presets::kScenario8Gains))}};
  j["integrator"] = {{"dt", 1e-5}, {"t0", 0.0}, {"t_end", 20.0}, {"record_stride", 100}};
  j["initial_state"] = "scenario8";
  return j;
}

SignalBank bank_from_json(const Json& j, int order) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "scenario8") return presets::scenario8_sinusoids(order);
    if (name == "scenario8_cubic") return presets::scenario8_cubics(order);
    throw IoError("signals: unknown preset '" + name + "'");
  }
  if (!j.is_array()) throw IoError("signals: expected a preset name or an array of signals");
  SignalBank bank;
  bank.order = order;
  for (const auto& s : j) bank.signals.push_back(signal_from_json(s));
  return bank;
}

Eigen::MatrixXd initial_from_json(const Json& j, std::size_t n, int order) {
  const auto cols = static_cast<Eigen::Index>(order) + 1;
  const auto rows = static_cast<Eigen::Index>(n);
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "zeros") return Eigen::MatrixXd::Zero(rows, cols);
    if (name == "scenario8") {
      if (n != 8) throw IoError("initial_state: 'scenario8' needs an 8-node graph");
      return presets::scenario8_initial(order);
    }
    throw IoError("initial_state: unknown preset '" + name + "'");
  }
  if (!j.is_array() || j.size() != n) {
    throw IoError("initial_state: expected " + std::to_string(n) + " rows");
  }
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = numbers(j[static_cast<std::size_t>(i)], "initial_state");
    if (row.size() != static_cast<std::size_t>(cols)) {
      throw IoError("initial_state: row " + std::to_string(i) + " must have " + std::to_string(cols) +
                    " entries (m+1)");
    }
    for (Eigen::Index c = 0; c < cols; ++c) x(i, c) = row[static_cast<std::size_t>(c)];
  }
  return x;
}

}  // namespace

Graph graph_from_json(const Json& j) {
  if (j.is_string()) return presets::by_name(j.get<std::string>());
  const auto n = count(require(j, "n", "graph"), "graph.n");
  const auto& edges = require(j, "edges", "graph");
  if (!edges.is_array()) throw IoError("graph.edges: expected an array of [i, j] pairs");
  std::vector<Edge> out;
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2) throw IoError("graph.edges: each edge must be [i, j]");
    out.push_back({count(e[0], "graph.edges"), count(e[1], "graph.edges")});
  }
  return Graph(n, std::move(out));
}

Json graph_to_json(const Graph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back({e.from, e.to});
  return {{"n", g.num_nodes()}, {"edges", edges}};
}

Graph load_graph(const std::string& path_or_preset) {
  if (!std::filesystem::exists(path_or_preset)) return presets::by_name(path_or_preset);
  return graph_from_json(parse_json_text(read_file(path_or_preset), path_or_preset));
}

SignalSpec signal_from_json(const Json& j) {
  const auto kind = require(j, "kind", "signal").get<std::string>();
  SignalSpec s;
  if (kind == "sinusoid") {
    reject_unknown(j, {"kind", "a", "omega", "phi"}, "sinusoid");
    s.kind = Sinusoid{number(require(j, "a", "sinusoid"), "sinusoid.a"),
                      number(require(j, "omega", "sinusoid"), "sinusoid.omega"),
                      j.contains("phi") ? number(j["phi"], "sinusoid.phi") : 0.0};
  } else if (kind == "polynomial") {
    reject_unknown(j, {"kind", "coeffs"}, "polynomial");
    s.kind = Polynomial{numbers(require(j, "coeffs", "polynomial"), "polynomial.coeffs")};
  } else if (kind == "constant") {
    reject_unknown(j, {"kind", "c"}, "constant");
    s.kind = Constant{number(require(j, "c", "constant"), "constant.c")};
  } else if (kind == "sum") {
    reject_unknown(j, {"kind", "parts"}, "sum");
    const auto& parts = require(j, "parts", "sum");
    if (!parts.is_array()) throw IoError("sum.parts: expected an array");
    SignalSum total;
    for (const auto& p : parts) total.parts.push_back(signal_from_json(p));
    s.kind = std::move(total);
  } else {
    throw IoError("signal: unknown kind '" + kind + "'");
  }
  try {
    s.validate();
  } catch (const SignalError& e) {
    throw IoError(std::string("signal: ") + e.what());
  }
  return s;
}

Json signal_to_json(const SignalSpec& s) {
  return std::visit(Overloaded{
                        [](const Sinusoid& w) -> Json {
                          return {{"kind", "sinusoid"}, {"a", w.amplitude}, {"omega", w.omega}, {"phi", w.phase}};
                        },
                        [](const Polynomial& p) -> Json { return {{"kind", "polynomial"}, {"coeffs", p.coeffs}}; },
                        [](const Constant& c) -> Json { return {{"kind", "constant"}, {"c", c.value}}; },
                        [](const SignalSum& sum_spec) -> Json {
                          Json parts = Json::array();
                          for (const auto& p : sum_spec.parts) parts.push_back(signal_to_json(p));
                          return {{"kind", "sum"}, {"parts", parts}};
                        },
                    },
                    s.kind);
}

Scenario scenario_from_json(const Json& input) {
  if (!input.is_object()) throw IoError("scenario: expected a JSON object");
  reject_unknown(input,
                 {"preset", "name", "graph", "signals", "protocol", "integrator", "initial_state", "settling"},
                 "scenario");
  Json j = Json::object();
  if (input.contains("preset")) {
    const auto preset = input["preset"].get<std::string>();
    if (preset != "scenario8" && preset != "scenario8_cubic") {
      throw IoError("scenario: unknown preset '" + preset + "'");
    }
    j = scenario8_defaults(preset);
  }
  for (const auto& [key, value] : input.items()) {
    if (key != "preset") j[key] = value;
  }

  Scenario s;
  s.name = j.value("name", std::string("scenario"));
  s.graph = graph_from_json(require(j, "graph", "scenario"));

  const auto& proto = require(j, "protocol", "scenario");
  const auto kind = require(proto, "kind", "protocol").get<std::string>();
  int order = 0;
  if (proto.contains("m")) order = static_cast<int>(count(proto["m"], "protocol.m"));
  if (kind == "edcho") {
    reject_unknown(proto, {"kind", "m", "gains", "lambdas", "k0", "L"}, "protocol");
    order = static_cast<int>(count(require(proto, "m", "protocol"), "protocol.m"));
  } else if (kind == "linear" || kind == "fosm") {
    reject_unknown(proto, {"kind", "m", "k"}, "protocol");
  } else {
    throw IoError("protocol: unknown kind '" + kind + "'");
  }

  s.signals = bank_from_json(require(j, "signals", "scenario"), order);

  IntegratorConfig integ;
  if (j.contains("integrator")) {
    const auto& ij = j["integrator"];
    reject_unknown(ij, {"dt", "t0", "t_end", "record_stride"}, "integrator");
    if (ij.contains("dt")) integ.dt = number(ij["dt"], "integrator.dt");
    if (ij.contains("t0")) integ.t0 = number(ij["t0"], "integrator.t0");
    if (ij.contains("t_end")) integ.t_end = number(ij["t_end"], "integrator.t_end");
    if (ij.contains("record_stride")) integ.record_stride = count(ij["record_stride"], "integrator.record_stride");
  }
  s.integrator = integ;

  if (proto.contains("L")) {
    s.bound = number(proto["L"], "protocol.L");
  } else if (s.signals.size() > 0) {
    s.bound = disturbance_bound(s.signals, integ.t0, std::max(integ.t_end, integ.t0), 10001);
  }

  if (kind == "edcho") {
    ProtocolConfig cfg;
    cfg.order = order;
    cfg.bound = s.bound;
    if (proto.contains("gains")) {
      cfg.gains = numbers(proto["gains"], "protocol.gains");
    } else if (proto.contains("lambdas")) {
      GainDesign design{numbers(proto["lambdas"], "protocol.lambdas"),
                        number(require(proto, "k0", "protocol"), "protocol.k0")};
      try {
        cfg.gains = design_gains(design, order);
      } catch (const ProtocolError& e) {
        throw ScenarioError(std::string("invalid protocol: ") + e.what());
      }
    } else {
      throw IoError("protocol: edcho needs 'gains' or 'lambdas' + 'k0'");
    }
    s.protocol = EdchoProtocol{cfg};
  } else if (kind == "linear") {
    s.protocol = LinearProtocol{number(require(proto, "k", "protocol"), "protocol.k")};
  } else {
    s.protocol = FosmProtocol{number(require(proto, "k", "protocol"), "protocol.k")};
  }

  s.initial_state = initial_from_json(j.contains("initial_state") ? j["initial_state"] : Json("zeros"),
                                      s.graph.num_nodes(), order);

  if (j.contains("settling")) {
    const auto& st = j["settling"];
    reject_unknown(st, {"threshold", "hold"}, "settling");
    if (st.contains("threshold")) s.settling_threshold = number(st["threshold"], "settling.threshold");
    if (st.contains("hold")) s.settling_hold = number(st["hold"], "settling.hold");
  }

  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  const Json j = parse_json_text(read_file(path), path);
  try {
    return scenario_from_json(j);
  } catch (const Json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw IoError(origin + ": JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move output into place at '" + path + "': " + ec.message());
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> trace_header(std::size_t agents, std::size_t columns) {
  std::vector<std::string> h{"t"};
  for (const char* prefix : {"x", "y"}) {
    for (std::size_t i = 0; i < agents; ++i) {
      for (std::size_t mu = 0; mu < columns; ++mu) {
        h.push_back(std::string(prefix) + "_" + std::to_string(i) + "_" + std::to_string(mu));
      }
    }
  }
  for (std::size_t mu = 0; mu < columns; ++mu) h.push_back("err_norm_" + std::to_string(mu));
  return h;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  if (trace.size() == 0) throw IoError("cannot write an empty trace");
  const auto agents = static_cast<std::size_t>(trace.states.front().rows());
  const auto columns = static_cast<std::size_t>(trace.states.front().cols());
  const auto header = trace_header(agents, columns);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << format_double(trace.times[k]);
    for (const auto* m : {&trace.states[k], &trace.outputs[k]}) {
      for (Eigen::Index i = 0; i < m->rows(); ++i) {
        for (Eigen::Index mu = 0; mu < m->cols(); ++mu) out << ',' << format_double((*m)(i, mu));
      }
    }
    for (Eigen::Index mu = 0; mu < trace.error_norms[k].size(); ++mu) {
      out << ',' << format_double(trace.error_norms[k](mu));
    }
    out << '\n';
  }
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("CSV: missing header");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw IoError("CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.header.size()) {
      throw IoError("CSV line " + std::to_string(line_no) + ": expected " +
                    std::to_string(table.header.size()) + " fields");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string accuracy_table_csv(const std::vector<AccuracyRow>& rows) {
  std::ostringstream out;
  out << "dt";
  const Eigen::Index cols = rows.empty() ? 0 : rows.front().terminal_error.size();
  for (Eigen::Index mu = 0; mu < cols; ++mu) out << ",terminal_err_" << mu;
  out << '\n';
  for (const auto& r : rows) {
    out << format_double(r.dt);
    for (Eigen::Index mu = 0; mu < r.terminal_error.size(); ++mu) out << ',' << format_double(r.terminal_error(mu));
    out << '\n';
  }
  return out.str();
}

}  // namespace edcho::io
