#include "edcho/graph.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace edcho {

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)) {
  if (num_nodes_ == 0) {
    throw GraphError("graph must have at least one node");
  }
  std::vector<std::vector<bool>> seen(num_nodes_, std::vector<bool>(num_nodes_, false));
  for (const auto& e : edges_) {
    if (e.from >= num_nodes_ || e.to >= num_nodes_) {
      throw GraphError("edge (" + std::to_string(e.from) + "," + std::to_string(e.to) +
                       ") references a node outside 0.." + std::to_string(num_nodes_ - 1));
    }
    if (e.from == e.to) {
      throw GraphError("self-loop at node " + std::to_string(e.from));
    }
    if (seen[e.from][e.to]) {
      throw GraphError("duplicate edge (" + std::to_string(e.from) + "," + std::to_string(e.to) + ")");
    }
    seen[e.from][e.to] = seen[e.to][e.from] = true;
  }
}

std::vector<std::vector<std::size_t>> Graph::neighbors() const {
  std::vector<std::vector<std::size_t>> nbrs(num_nodes_);
  for (const auto& e : edges_) {
    nbrs[e.from].push_back(e.to);
    nbrs[e.to].push_back(e.from);
  }
  for (auto& list : nbrs) std::sort(list.begin(), list.end());
  return nbrs;
}

bool Graph::has_edge(std::size_t a, std::size_t b) const {
  return std::any_of(edges_.begin(), edges_.end(), [&](const Edge& e) {
    return (e.from == a && e.to == b) || (e.from == b && e.to == a);
  });
}

Eigen::MatrixXi adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
  for (const auto& e : g.edges()) {
    a(e.from, e.to) = 1;
    a(e.to, e.from) = 1;
  }
  return a;
}

Eigen::MatrixXi incidence(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const auto l = static_cast<Eigen::Index>(g.num_edges());
  Eigen::MatrixXi d = Eigen::MatrixXi::Zero(n, l);
  for (Eigen::Index c = 0; c < l; ++c) {
    const auto& e = g.edges()[c];
    d(e.from, c) = 1;
    d(e.to, c) = -1;
  }
  return d;
}

Eigen::MatrixXi laplacian(const Graph& g) {
  const Eigen::MatrixXi d = incidence(g);
  return d * d.transpose();
}

GraphMatrices matrices(const Graph& g) {
  GraphMatrices out;
  out.adjacency = adjacency(g);
  out.incidence = incidence(g);
  out.laplacian = out.incidence * out.incidence.transpose();
  return out;
}

namespace {

// BFS from node 0 with ascending neighbor order. parent[v] is the tree edge
// index (into g.edges()) used to discover v, or npos for the root and
// unreached nodes.
struct BfsResult {
  std::vector<bool> reached;
  std::vector<std::size_t> parent_node;
  std::vector<std::size_t> parent_edge;
  std::vector<std::size_t> order;  // tree edge indices in discovery order
};

constexpr std::size_t npos = static_cast<std::size_t>(-1);

BfsResult bfs(const Graph& g) {
  const std::size_t n = g.num_nodes();
  // (neighbor, edge index) sorted by neighbor
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    const auto& e = g.edges()[k];
    adj[e.from].emplace_back(e.to, k);
    adj[e.to].emplace_back(e.from, k);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());

  BfsResult r{std::vector<bool>(n, false), std::vector<std::size_t>(n, npos),
              std::vector<std::size_t>(n, npos), {}};
  std::deque<std::size_t> queue{0};
  r.reached[0] = true;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (const auto& [w, k] : adj[v]) {
      if (r.reached[w]) continue;
      r.reached[w] = true;
      r.parent_node[w] = v;
      r.parent_edge[w] = k;
      r.order.push_back(k);
      queue.push_back(w);
    }
  }
  return r;
}

void require_connected(const Graph& g) {
  if (!is_connected(g)) throw GraphError("graph not connected");
}

Graph without_edge(const Graph& g, std::size_t skip) {
  std::vector<Edge> kept;
  kept.reserve(g.num_edges() - 1);
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    if (k != skip) kept.push_back(g.edges()[k]);
  }
  return Graph(g.num_nodes(), std::move(kept));
}

}  // namespace

bool is_connected(const Graph& g) {
  const auto r = bfs(g);
  return std::all_of(r.reached.begin(), r.reached.end(), [](bool b) { return b; });
}

double algebraic_connectivity(const Graph& g) {
  require_connected(g);
  if (g.num_nodes() == 1) {
    throw GraphError("algebraic connectivity undefined for a single node");
  }
  const Eigen::MatrixXd q = laplacian(g).cast<double>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw GraphError("Laplacian eigensolve did not converge");
  }
  return solver.eigenvalues()(1);  // ascending order
}

Graph spanning_tree(const Graph& g) {
  const auto r = bfs(g);
  if (r.order.size() + 1 != g.num_nodes()) throw GraphError("graph not connected");
  std::vector<Edge> tree;
  tree.reserve(r.order.size());
  for (std::size_t k : r.order) tree.push_back(g.edges()[k]);
  return Graph(g.num_nodes(), std::move(tree));
}

std::size_t flow_space_dim(const Graph& g) {
  require_connected(g);
  return g.num_edges() - g.num_nodes() + 1;
}

std::pair<Graph, Graph> decompose(const Graph& g) {
  const std::size_t dim = flow_space_dim(g);
  if (dim == 0) throw GraphError("graph is a tree");

  const auto r = bfs(g);
  std::vector<bool> in_tree(g.num_edges(), false);
  for (std::size_t k : r.order) in_tree[k] = true;
  std::vector<std::size_t> off_tree;
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    if (!in_tree[k]) off_tree.push_back(k);
  }

  if (dim >= 2) {
    // Both halves keep the full spanning tree, so both stay connected.
    return {without_edge(g, off_tree[0]), without_edge(g, off_tree[1])};
  }

  // Single cycle: it is the off-tree edge e plus the tree path between its
  // endpoints. Dropping two different tree edges of that path yields two
  // distinct spanning trees that both contain e.
  const Edge e = g.edges()[off_tree[0]];
  std::vector<std::size_t> depth(g.num_nodes(), 0);
  for (std::size_t k : r.order) {
    const Edge& te = g.edges()[k];
    const std::size_t child = (r.parent_edge[te.to] == k) ? te.to : te.from;
    depth[child] = depth[r.parent_node[child]] + 1;
  }
  std::vector<std::size_t> cycle_edges;
  std::size_t a = e.from;
  std::size_t b = e.to;
  while (a != b) {
    if (depth[a] >= depth[b]) {
      cycle_edges.push_back(r.parent_edge[a]);
      a = r.parent_node[a];
    } else {
      cycle_edges.push_back(r.parent_edge[b]);
      b = r.parent_node[b];
    }
  }
  std::sort(cycle_edges.begin(), cycle_edges.end());
  return {without_edge(g, cycle_edges[0]), without_edge(g, cycle_edges[1])};
}

EdgeDecomposition edge_decompose_vector(const Graph& g, const Eigen::VectorXd& x) {
  require_connected(g);
  if (x.size() != static_cast<Eigen::Index>(g.num_nodes())) {
    throw GraphError("vector length does not match node count");
  }
  EdgeDecomposition out;
  out.mean = x.mean();
  const Eigen::VectorXd rest = x.array() - out.mean;
  if (g.num_edges() == 0) {
    out.edge_part = Eigen::VectorXd::Zero(0);
    return out;
  }
  const Eigen::MatrixXd d = incidence(g).cast<double>();
  if (flow_space_dim(g) == 0) {
    // Full column rank: normal equations are well posed.
    const Eigen::MatrixXd dtd = d.transpose() * d;
    out.edge_part = dtd.ldlt().solve(d.transpose() * rest);
  } else {
    out.edge_part = d.completeOrthogonalDecomposition().solve(rest);
  }
  return out;
}

namespace presets {

Graph path(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph(n, std::move(edges));
}

Graph cycle(std::size_t n) {
  if (n < 3) throw GraphError("cycle needs at least 3 nodes");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  edges.push_back({n - 1, 0});
  return Graph(n, std::move(edges));
}

Graph complete(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j});
  }
  return Graph(n, std::move(edges));
}

Graph scenario8() {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < 7; ++i) edges.push_back({i, i + 1});
  edges.push_back({7, 0});
  edges.push_back({0, 4});
  edges.push_back({2, 6});
  return Graph(8, std::move(edges));
}

Graph by_name(const std::string& name) {
  std::string base = name;
  std::size_t n = 8;
  if (const auto colon = name.find(':'); colon != std::string::npos) {
    base = name.substr(0, colon);
    const std::string count = name.substr(colon + 1);
    std::size_t used = 0;
    unsigned long parsed = 0;
    try {
      parsed = std::stoul(count, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != count.size() || count.empty() || parsed == 0) {
      throw GraphError("bad node count in preset name '" + name + "'");
    }
    n = parsed;
  }
  if (base == "path") return path(n);
  if (base == "cycle") return cycle(n);
  if (base == "complete") return complete(n);
  if (base == "scenario8") {
    if (base != name) throw GraphError("scenario8 has a fixed size");
    return scenario8();
  }
  throw GraphError("unknown graph preset '" + name + "'");
}

}  // namespace presets

}  // namespace edcho
