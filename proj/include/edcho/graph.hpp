#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace edcho {

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unordered node pair. The first node is the +1 row of the incidence column.
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Simple undirected graph on nodes 0..n-1.
///
/// The edge list order is part of the value: it fixes the column order of the
/// incidence matrix. Construction rejects self-loops, out-of-range nodes and
/// duplicate edges in either orientation.
class Graph {
 public:
  Graph(std::size_t num_nodes, std::vector<Edge> edges);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Neighbor lists sorted ascending.
  std::vector<std::vector<std::size_t>> neighbors() const;

  bool has_edge(std::size_t a, std::size_t b) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t num_nodes_;
  std::vector<Edge> edges_;
};

struct GraphMatrices {
  Eigen::MatrixXi adjacency;
  Eigen::MatrixXi incidence;
  Eigen::MatrixXi laplacian;
};

Eigen::MatrixXi adjacency(const Graph& g);
Eigen::MatrixXi incidence(const Graph& g);
Eigen::MatrixXi laplacian(const Graph& g);
GraphMatrices matrices(const Graph& g);

bool is_connected(const Graph& g);

/// Second smallest Laplacian eigenvalue. Throws GraphError on disconnected input.
double algebraic_connectivity(const Graph& g);

/// BFS spanning tree from node 0, neighbors visited in ascending order.
/// Tree edges keep the orientation they have in `g` and are listed in
/// discovery order.
Graph spanning_tree(const Graph& g);

/// Dimension of the null space of the incidence matrix: l - n + 1.
std::size_t flow_space_dim(const Graph& g);

/// Splits a connected graph with a nontrivial flow space into two connected
/// spanning subgraphs, each with flow dimension one less, whose edge union is
/// the input.
std::pair<Graph, Graph> decompose(const Graph& g);

struct EdgeDecomposition {
  double mean = 0.0;           // coefficient on the ones vector
  Eigen::VectorXd edge_part;   // minimum-norm x~ with x = mean*1 + D*x~
};

EdgeDecomposition edge_decompose_vector(const Graph& g, const Eigen::VectorXd& x);

namespace presets {

Graph path(std::size_t n);
Graph cycle(std::size_t n);
Graph complete(std::size_t n);

/// 8-node ring 0-1-...-7-0 with chords (0,4) and (2,6). Stand-in topology for
/// the eight-agent reproduction runs.
Graph scenario8();

/// Resolves "path", "cycle", "complete" (optionally suffixed ":n") and
/// "scenario8". Throws GraphError for unknown names.
Graph by_name(const std::string& name);

}  // namespace presets

}  // namespace edcho
