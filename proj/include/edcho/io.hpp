#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "edcho/graph.hpp"
#include "edcho/scenario.hpp"
#include "edcho/signals.hpp"

namespace edcho::io {

/// Malformed input files: JSON syntax errors (with byte position) and schema
/// violations (with the offending key).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

Graph graph_from_json(const Json& j);
Json graph_to_json(const Graph& g);

/// Accepts a preset name ("scenario8", "complete:3", ...) or a path to a
/// {"n": .., "edges": [[i, j], ...]} file.
Graph load_graph(const std::string& path_or_preset);

SignalSpec signal_from_json(const Json& j);
Json signal_to_json(const SignalSpec& s);

/// Builds and validates a scenario. A "preset" key supplies defaults for
/// every other key; explicit keys override it.
Scenario scenario_from_json(const Json& j);
Scenario load_scenario(const std::string& path);

Json parse_json_text(const std::string& text, const std::string& origin);
std::string read_file(const std::string& path);

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

// ---------------------------------------------------------------------------
// CSV

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double v);

/// t, x_{i}_{mu}..., y_{i}_{mu}..., err_norm_0..err_norm_m, agent-major.
std::vector<std::string> trace_header(std::size_t agents, std::size_t columns);
void write_trace_csv(std::ostream& out, const Trace& trace);
std::string trace_csv(const Trace& trace);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable parse_csv(std::istream& in);

std::string accuracy_table_csv(const std::vector<AccuracyRow>& rows);

}  // namespace edcho::io
