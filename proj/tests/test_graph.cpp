#include <gtest/gtest.h>

#include <random>

#include "edcho/graph.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace edcho;

namespace {

Graph path3() { return Graph(3, {{0, 1}, {1, 2}}); }

Eigen::MatrixXi mat(std::initializer_list<std::initializer_list<int>> rows) {
  Eigen::MatrixXi m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (int v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST(GraphConstruction, RejectsBadInput) {
  EXPECT_THROW(Graph(0, {}), GraphError);
  EXPECT_THROW(Graph(2, {{0, 2}}), GraphError);
  EXPECT_THROW(Graph(2, {{1, 1}}), GraphError);
  EXPECT_THROW(Graph(3, {{0, 1}, {1, 0}}), GraphError);
  EXPECT_THROW(Graph(3, {{0, 1}, {0, 1}}), GraphError);
  EXPECT_NO_THROW(Graph(2, {}));
}

TEST(GraphConstruction, NeighborsSorted) {
  const Graph g(4, {{3, 0}, {0, 1}, {2, 0}});
  const auto nb = g.neighbors();
  EXPECT_EQ(nb[0], (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_TRUE(g.has_edge(0, 3));
  EXPECT_TRUE(g.has_edge(3, 0));
  EXPECT_FALSE(g.has_edge(1, 2));
}

TEST(Adjacency, Examples) {
  EXPECT_EQ(adjacency(Graph(2, {{0, 1}})), mat({{0, 1}, {1, 0}}));
  EXPECT_EQ(adjacency(Graph(3, {})), Eigen::MatrixXi::Zero(3, 3));
  EXPECT_EQ(adjacency(path3()), mat({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}));
}

TEST(Incidence, Examples) {
  EXPECT_EQ(incidence(Graph(2, {{0, 1}})), mat({{1}, {-1}}));
  EXPECT_EQ(incidence(path3()), mat({{1, 0}, {-1, 1}, {0, -1}}));
  const Eigen::MatrixXi d = incidence(presets::scenario8());
  EXPECT_EQ(d.colwise().sum(), Eigen::RowVectorXi::Zero(d.cols()));
  for (Eigen::Index c = 0; c < d.cols(); ++c) {
    EXPECT_EQ((d.col(c).array() == 1).count(), 1);
    EXPECT_EQ((d.col(c).array() == -1).count(), 1);
  }
}

TEST(Laplacian, Examples) {
  EXPECT_EQ(laplacian(Graph(2, {{0, 1}})), mat({{1, -1}, {-1, 1}}));
  EXPECT_EQ(laplacian(path3()), mat({{1, -1, 0}, {-1, 2, -1}, {0, -1, 1}}));
  const Graph g = presets::scenario8();
  EXPECT_EQ(laplacian(g), oracle::degree_minus_adjacency(g));
  const auto all = matrices(g);
  EXPECT_EQ(all.laplacian, all.incidence * all.incidence.transpose());
  EXPECT_EQ(all.adjacency, all.adjacency.transpose());
}

TEST(Laplacian, RankIsNMinusOneWhenConnected) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const auto g = oracle::random_connected_graph(rng);
    const auto ev = oracle::jacobi_eigenvalues(laplacian(g).cast<double>());
    std::size_t zeros = 0;
    for (double v : ev) zeros += std::abs(v) < 1e-9 ? 1 : 0;
    EXPECT_EQ(zeros, 1u);
  }
}

TEST(Connectivity, Examples) {
  EXPECT_TRUE(is_connected(path3()));
  EXPECT_FALSE(is_connected(Graph(2, {})));
  EXPECT_TRUE(is_connected(presets::scenario8()));
  EXPECT_EQ(oracle::components(8, presets::scenario8().edges()), 1u);
  EXPECT_TRUE(is_connected(Graph(1, {})));
}

TEST(Connectivity, AgreesWithUnionFind) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.25);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 9);
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (coin(rng)) edges.push_back({a, b});
    const Graph g(n, edges);
    EXPECT_EQ(is_connected(g), oracle::connected(g));
  }
}

TEST(AlgebraicConnectivity, Examples) {
  EXPECT_NEAR(algebraic_connectivity(Graph(2, {{0, 1}})), 2.0, 1e-12);
  EXPECT_NEAR(algebraic_connectivity(presets::complete(3)), 3.0, 1e-12);
  EXPECT_NEAR(algebraic_connectivity(path3()), 1.0, 1e-12);
}

TEST(AlgebraicConnectivity, DisconnectedThrows) {
  try {
    algebraic_connectivity(Graph(3, {{0, 1}}));
    FAIL() << "expected GraphError";
  } catch (const GraphError& e) {
    EXPECT_NE(std::string(e.what()).find("graph not connected"), std::string::npos);
  }
}

TEST(AlgebraicConnectivity, MatchesJacobiOracle) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 200; ++k) {
    const auto g = oracle::random_connected_graph(rng);
    const auto ev = oracle::jacobi_eigenvalues(laplacian(g).cast<double>());
    EXPECT_NEAR(algebraic_connectivity(g), ev[1], 1e-9);
  }
}

TEST(SpanningTree, Examples) {
  EXPECT_EQ(spanning_tree(path3()).edges(), path3().edges());
  EXPECT_EQ(spanning_tree(presets::complete(3)).edges(), (std::vector<Edge>{{0, 1}, {0, 2}}));
  const Graph t = spanning_tree(presets::scenario8());
  EXPECT_EQ(t.num_edges(), 7u);
  EXPECT_TRUE(oracle::acyclic(8, t.edges()));
  EXPECT_TRUE(oracle::connected(t));
  EXPECT_THROW(spanning_tree(Graph(3, {{0, 1}})), GraphError);
}

TEST(SpanningTree, IsSubsetAndDeterministic) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const auto g = oracle::random_connected_graph(rng);
    const auto t = spanning_tree(g);
    EXPECT_EQ(t.num_edges(), g.num_nodes() - 1);
    EXPECT_TRUE(oracle::acyclic(g.num_nodes(), t.edges()));
    for (const auto& e : t.edges()) {
      EXPECT_NE(std::find(g.edges().begin(), g.edges().end(), e), g.edges().end());
    }
    EXPECT_EQ(spanning_tree(g), t);
  }
}

TEST(FlowSpace, Examples) {
  EXPECT_EQ(flow_space_dim(path3()), 0u);
  EXPECT_EQ(flow_space_dim(presets::complete(3)), 1u);
  EXPECT_EQ(flow_space_dim(presets::scenario8()), 3u);
  EXPECT_THROW(flow_space_dim(Graph(3, {{0, 1}})), GraphError);
}

TEST(Decompose, Triangle) {
  const auto [a, b] = decompose(presets::complete(3));
  EXPECT_EQ(a.edges(), (std::vector<Edge>{{0, 2}, {1, 2}}));
  EXPECT_EQ(b.edges(), (std::vector<Edge>{{0, 1}, {1, 2}}));
}

TEST(Decompose, CycleFourGivesTwoPaths) {
  const Graph c4 = presets::cycle(4);
  const auto [a, b] = decompose(c4);
  for (const auto* part : {&a, &b}) {
    EXPECT_EQ(part->num_edges(), 3u);
    EXPECT_TRUE(oracle::connected(*part));
    EXPECT_TRUE(oracle::acyclic(4, part->edges()));
  }
  auto u = oracle::edge_set(a.edges());
  const auto eb = oracle::edge_set(b.edges());
  u.insert(eb.begin(), eb.end());
  EXPECT_EQ(u, oracle::edge_set(c4.edges()));
  EXPECT_NE(oracle::edge_set(a.edges()), eb);
}

TEST(Decompose, TreeThrows) {
  try {
    decompose(path3());
    FAIL() << "expected GraphError";
  } catch (const GraphError& e) {
    EXPECT_NE(std::string(e.what()).find("graph is a tree"), std::string::npos);
  }
}

TEST(EdgeDecompose, OnesVector) {
  const auto r = edge_decompose_vector(presets::scenario8(), Eigen::VectorXd::Ones(8));
  EXPECT_NEAR(r.mean, 1.0, 1e-15);
  EXPECT_LE(r.edge_part.norm(), 1e-12);
}

TEST(EdgeDecompose, TreeSolutionIsUnique) {
  const Graph g = presets::path(4);
  Eigen::VectorXd x(4);
  x << 1.0, -2.0, 0.5, 0.5;
  const auto r = edge_decompose_vector(g, x);
  EXPECT_NEAR(r.mean, 0.0, 1e-15);
  // On a path, x = D x~ is solved by prefix sums.
  Eigen::VectorXd expect(3);
  expect << 1.0, -1.0, -0.5;
  EXPECT_LE((r.edge_part - expect).norm(), 1e-12);
}

TEST(EdgeDecompose, MatchesPseudoInverseOracle) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 200; ++k) {
    const auto g = oracle::random_connected_graph(rng);
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = gauss(rng);
    const auto r = edge_decompose_vector(g, x);
    const Eigen::MatrixXd d = incidence(g).cast<double>();
    const Eigen::VectorXd resid = x.array() - x.mean();
    // Minimum-norm x~ = D' Q^+ r with Q^+ from the eigen-decomposition of Q.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d * d.transpose());
    Eigen::VectorXd inv = es.eigenvalues();
    for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = inv(i) > 1e-9 ? 1.0 / inv(i) : 0.0;
    const Eigen::VectorXd expect = d.transpose() * (es.eigenvectors() * inv.asDiagonal() *
                                                    es.eigenvectors().transpose() * resid);
    EXPECT_NEAR(r.mean, x.mean(), 1e-12);
    EXPECT_LE((x - r.mean * Eigen::VectorXd::Ones(n) - d * r.edge_part).norm(), 1e-9 * x.norm());
    EXPECT_LE((r.edge_part - expect).norm(), 1e-8 * std::max(1.0, expect.norm()));
  }
}

TEST(Presets, ByName) {
  EXPECT_EQ(presets::by_name("scenario8"), presets::scenario8());
  EXPECT_EQ(presets::by_name("complete:3"), presets::complete(3));
  EXPECT_EQ(presets::by_name("path").num_nodes(), 8u);
  EXPECT_EQ(presets::by_name("cycle:5").num_edges(), 5u);
  EXPECT_THROW(presets::by_name("star"), GraphError);
  EXPECT_EQ(presets::scenario8().num_edges(), 10u);
}

TEST(GraphProperties, IncidenceColumnSums) {
  const auto s = props::incidence_column_sums(101, 1000);
  EXPECT_EQ(s.violations, 0u);
}

TEST(GraphProperties, LaplacianProduct) {
  const auto s = props::laplacian_product(102, 1000);
  EXPECT_EQ(s.violations, 0u);
}

TEST(GraphProperties, RayleighBound) {
  const auto s = props::rayleigh_bound(103, 1000);
  EXPECT_EQ(s.violations, 0u);
}

TEST(GraphProperties, FlowDimension) {
  const auto s = props::flow_dimension(104, 1000);
  EXPECT_EQ(s.violations, 0u);
}

TEST(GraphProperties, Decomposition) {
  const auto s = props::decomposition(105, 1000);
  EXPECT_EQ(s.violations, 0u);
}
