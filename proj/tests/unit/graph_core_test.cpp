#include <gtest/gtest.h>

#include <sstream>

#include "gapdilate/cuts.hpp"
#include "gapdilate/incidence.hpp"
#include "gapdilate/laplacian.hpp"
#include "gapdilate/metrics.hpp"
#include "support.hpp"

using namespace gapdilate;
using namespace gapdilate::testing;

TEST(Graph, CanonicalizesEndpointsAndDropsZeroWeights) {
  Graph g(3, {{2, 0, 1.5}, {1, 2, 0.0}});
  ASSERT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(g.edge(0).u, 0u);
  EXPECT_EQ(g.edge(0).v, 2u);
  EXPECT_DOUBLE_EQ(g.weighted_degree(0), 1.5);
  EXPECT_FALSE(g.unit_weights());
}

TEST(Graph, RejectsInvalidEdges) {
  EXPECT_THROW(Graph(2, {{0, 0, 1.0}}), InputError);
  EXPECT_THROW(Graph(2, {{0, 2, 1.0}}), InputError);
  EXPECT_THROW(Graph(2, {{0, 1, -1.0}}), InputError);
  EXPECT_THROW(Graph(3, {{0, 1, 1.0}, {1, 0, 2.0}}), InputError);
}

TEST(Graph, EdgeListRoundTrip) {
  const Graph g = random_graph(12, 0.4, 7, true);
  std::stringstream ss;
  write_edge_list(ss, g);
  const Graph back = read_edge_list(ss);
  EXPECT_EQ(back, g);
}

TEST(Graph, EdgeListWeightColumnOptional) {
  std::istringstream in("3 2\n0 1\n1 2 2.5\n");
  const Graph g = read_edge_list(in);
  EXPECT_DOUBLE_EQ(g.edge(0).w, 1.0);
  EXPECT_DOUBLE_EQ(g.edge(1).w, 2.5);
}

TEST(Graph, EdgeListErrors) {
  std::istringstream missing("3 2\n0 1\n");
  EXPECT_THROW(read_edge_list(missing), InputError);
  std::istringstream bad("3 1\n0 x\n");
  EXPECT_THROW(read_edge_list(bad), InputError);
  std::istringstream range("3 1\n0 3\n");
  EXPECT_THROW(read_edge_list(range), InputError);
}

TEST(BuildLaplacian, SingleEdge) {
  Eigen::Matrix2d expected;
  expected << 1, -1, -1, 1;
  EXPECT_TRUE(build_laplacian(single_edge()).dense().isApprox(Eigen::MatrixXd(expected)));
}

TEST(BuildLaplacian, Triangle) {
  Eigen::Matrix3d expected;
  expected << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  EXPECT_TRUE(build_laplacian(triangle()).dense().isApprox(Eigen::MatrixXd(expected)));
}

TEST(BuildLaplacian, PathSpectrum) {
  // dense symmetric eigensolver oracle on D - A
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_d_minus_a(path3()));
  const Eigen::Vector3d oracle = es.eigenvalues();
  EXPECT_NEAR(oracle[0], 0.0, 1e-12);
  EXPECT_NEAR(oracle[1], 1.0, 1e-12);
  EXPECT_NEAR(oracle[2], 3.0, 1e-12);
  const GroundTruth gt = dense_eig(build_laplacian(path3()));
  EXPECT_TRUE(gt.eigenvalues.isApprox(oracle, 1e-12));
}

TEST(BuildLaplacian, EmptyGraphIsZeroOperator) {
  const LaplacianOperator lap = build_laplacian(Graph(4, {}));
  EXPECT_TRUE(lap.apply(Vector(Vector::Ones(4))).isZero());
  EXPECT_EQ(lap.dim(), 4u);
}

TEST(LaplacianMatvec, OnesVectorIsInKernel) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Graph g = random_graph(20, 0.3, seed, true);
    EXPECT_LE(laplacian_matvec(build_laplacian(g), Vector::Ones(20)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LaplacianMatvec, SingleEdgeEigenvector) {
  Vector v(2);
  v << 1, -1;
  const Vector y = laplacian_matvec(build_laplacian(single_edge()), v);
  EXPECT_DOUBLE_EQ(y[0], 2.0);
  EXPECT_DOUBLE_EQ(y[1], -2.0);
}

TEST(LaplacianMatvec, TriangleMatchesDense) {
  const Vector v = random_vector(3, 11);
  Eigen::Matrix3d l;
  l << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  EXPECT_TRUE(laplacian_matvec(build_laplacian(triangle()), v).isApprox(l * v, 1e-14));
}

TEST(LaplacianMatvec, DimensionMismatchRejected) {
  EXPECT_THROW(laplacian_matvec(build_laplacian(triangle()), Vector::Ones(4)), InputError);
}

TEST(LaplacianMatvec, AgreesWithDenseAndEdgeSumOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 5 + seed * 2;
    const Graph g = random_graph(n, 0.35, seed, seed % 2 == 1);
    const LaplacianOperator lap(g);
    const Matrix dense = dense_d_minus_a(g);
    const Vector v = random_vector(static_cast<Eigen::Index>(n), seed + 100);
    const Vector expected = dense * v;
    const double scale = std::max(1.0, expected.norm());
    EXPECT_LE((lap.apply(v) - expected).norm() / scale, 1e-10);
    EXPECT_LE((lap.apply_edge_sum(v) - expected).norm() / scale, 1e-10);
    // block path, every column
    Matrix block(static_cast<Eigen::Index>(n), 7);
    for (int c = 0; c < 7; ++c) block.col(c) = random_vector(static_cast<Eigen::Index>(n), seed * 31 + c);
    EXPECT_LE((lap.apply(block) - dense * block).norm() / std::max(1.0, (dense * block).norm()), 1e-10);
  }
}

TEST(LaplacianMatvec, QuadraticFormIsCutSum) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = random_graph(15, 0.4, seed, true);
    const Vector v = random_vector(15, seed);
    const double quad = v.dot(build_laplacian(g).apply(v));
    double edge_sum = 0.0;
    for (const Edge& e : g.edges()) edge_sum += e.w * (v[e.u] - v[e.v]) * (v[e.u] - v[e.v]);
    EXPECT_GE(quad, -1e-12);
    EXPECT_LE(std::abs(quad - edge_sum), 1e-10 * std::max(1.0, edge_sum));
  }
}

TEST(LaplacianMatvec, NormalizedModeMatchesDefinition) {
  const Graph g = random_connected_graph(10, 0.3, 4, true);
  const LaplacianOperator lap(g, LaplacianMode::normalized);
  const Matrix l = dense_d_minus_a(g);
  const Vector s = l.diagonal().cwiseSqrt().cwiseInverse();
  const Matrix expected = s.asDiagonal() * l * s.asDiagonal();
  EXPECT_TRUE(lap.dense().isApprox(expected, 1e-12));
  const Vector v = random_vector(10, 1);
  EXPECT_TRUE(lap.apply(v).isApprox(expected * v, 1e-12));
  EXPECT_TRUE(lap.apply_edge_sum(v).isApprox(expected * v, 1e-12));
}

TEST(CutValue, Examples) {
  const std::vector<double> ones{1, 1, 1};
  EXPECT_DOUBLE_EQ(cut_value(triangle(), ones), 0.0);
  EXPECT_DOUBLE_EQ(cut_value(path3(), std::vector<double>{1, 1, -1}), 4.0);
  // K3 with node 0 alone: edges 0-1 and 0-2 cross
  EXPECT_DOUBLE_EQ(cut_value(triangle(), std::vector<double>{1, -1, -1}), 8.0);
}

TEST(CutValue, RejectsNonIndicator) {
  EXPECT_THROW(cut_value(triangle(), std::vector<double>{1, 0.5, -1}), InputError);
  EXPECT_THROW(cut_value(triangle(), std::vector<double>{1, -1}), InputError);
}

TEST(CutValue, EqualsQuadraticForm) {
  const Graph g = random_graph(10, 0.5, 3, true);
  std::vector<double> s{1, -1, 1, 1, -1, -1, 1, -1, 1, 1};
  const Vector v = Eigen::Map<Vector>(s.data(), 10);
  EXPECT_NEAR(cut_value(g, s), v.dot(build_laplacian(g).apply(v)), 1e-10);
}

TEST(Conductance, TwoTrianglesWithBridge) {
  // hand count: one crossing edge; vol = 2 + 2 + 3 = 7
  const std::vector<NodeId> s{0, 1, 2};
  EXPECT_DOUBLE_EQ(conductance(two_triangles_bridge(), s), 1.0 / 7.0);
}

TEST(Conductance, TriangleSingleton) {
  EXPECT_DOUBLE_EQ(conductance(triangle(), std::vector<NodeId>{0}), 1.0);
}

TEST(Conductance, CutIsSymmetric) {
  const Graph g = random_graph(9, 0.5, 12, true);
  const std::vector<NodeId> s{0, 3, 4}, sc{1, 2, 5, 6, 7, 8};
  EXPECT_DOUBLE_EQ(cut_stats(g, s).cut, cut_stats(g, sc).cut);
}

TEST(Conductance, RejectsEmptyAndFullSubsets) {
  EXPECT_THROW(conductance(triangle(), std::vector<NodeId>{}), InputError);
  EXPECT_THROW(conductance(triangle(), std::vector<NodeId>{0, 1, 2}), InputError);
}

TEST(BruteForceRho, TwoTrianglesWithBridge) {
  const RhoResult r = brute_force_rho(two_triangles_bridge());
  EXPECT_DOUBLE_EQ(r.rho, 1.0 / 7.0);
  EXPECT_EQ(r.best, (std::vector<NodeId>{0, 1, 2}));
}

TEST(BruteForceRho, TriangleIsOne) {
  // every proper subset of K3 is a singleton or its complement: cut 2, vol 2 vs 4
  EXPECT_DOUBLE_EQ(brute_force_rho(triangle()).rho, 1.0);
}

TEST(BruteForceRho, DisconnectedIsZero) {
  EXPECT_DOUBLE_EQ(brute_force_rho(two_triangles()).rho, 0.0);
}

TEST(BruteForceRho, MatchesNaiveEnumeration) {
  // independent enumeration over all subsets, both orientations
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = random_connected_graph(8, 0.3, seed, true);
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask + 1 < (1u << 8); ++mask) {
      std::vector<NodeId> s, sc;
      for (NodeId i = 0; i < 8; ++i) ((mask >> i) & 1u ? s : sc).push_back(i);
      best = std::min(best, std::max(conductance(g, s), conductance(g, sc)));
    }
    EXPECT_NEAR(brute_force_rho(g).rho, best, 1e-14);
  }
}

TEST(BruteForceRho, RefusesLargeGraphs) {
  EXPECT_THROW(brute_force_rho(path(21)), InputError);
}

TEST(EdgeIncidence, SingleEdge) {
  const EdgeIncidenceGraph inc = edge_incidence_graph(single_edge());
  EXPECT_EQ(inc.deg_inc(0), 1u);
  EXPECT_EQ(inc.incident(0), (std::vector<EdgeId>{0}));
}

TEST(EdgeIncidence, PathAndStar) {
  const EdgeIncidenceGraph p = edge_incidence_graph(path3());
  EXPECT_EQ(p.deg_inc(0), 2u);
  EXPECT_EQ(p.deg_inc(1), 2u);
  const EdgeIncidenceGraph s = edge_incidence_graph(star3());
  for (std::size_t e = 0; e < 3; ++e) {
    EXPECT_EQ(s.deg_inc(e), 3u);
    EXPECT_EQ(s.incident(e), (std::vector<EdgeId>{0, 1, 2}));
  }
}

TEST(EdgeIncidence, RejectsEdgelessGraph) {
  EXPECT_THROW(edge_incidence_graph(Graph(3, {})), InputError);
}

TEST(EdgeIncidence, SymmetricReflexiveAndBounded) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Graph g = random_graph(12, 0.35, seed);
    if (g.num_edges() == 0) continue;
    const EdgeIncidenceGraph inc(g);
    const DegreeBounds b = degree_bounds(g);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      const auto list = inc.incident(e);
      EXPECT_EQ(list.size(), inc.deg_inc(e));
      EXPECT_LE(inc.deg_inc(e), b.deg_star_inc);
      EXPECT_TRUE(std::binary_search(list.begin(), list.end(), EdgeId(e)));
      for (std::size_t f = 0; f < g.num_edges(); ++f) {
        const Edge &a = g.edge(e), &c = g.edge(f);
        const bool share = a.u == c.u || a.u == c.v || a.v == c.u || a.v == c.v;
        EXPECT_EQ(std::binary_search(list.begin(), list.end(), EdgeId(f)), share);
      }
    }
  }
}

TEST(DegreeBounds, Examples) {
  const DegreeBounds k3 = degree_bounds(triangle());
  EXPECT_EQ(k3.deg_star, 2u);
  EXPECT_EQ(k3.deg_star_inc, 3u);
  EXPECT_DOUBLE_EQ(k3.lambda_upper, 4.0);
  EXPECT_NEAR(dense_eig(build_laplacian(triangle())).eigenvalues.maxCoeff(), 3.0, 1e-12);

  const DegreeBounds e = degree_bounds(single_edge());
  EXPECT_EQ(e.deg_star, 1u);
  EXPECT_EQ(e.deg_star_inc, 1u);
  EXPECT_DOUBLE_EQ(e.lambda_upper, 2.0);

  EXPECT_DOUBLE_EQ(degree_bounds(path3()).lambda_upper, 4.0);
}

TEST(DegreeBounds, UpperBoundsSpectralRadius) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Graph g = random_graph(20, 0.3, seed, seed % 3 == 0);
    const double top = dense_eig(build_laplacian(g)).eigenvalues.maxCoeff();
    EXPECT_GE(degree_bounds(g).lambda_upper + 1e-12, top);
  }
}

TEST(Cheeger, NormalizedSpectrumBracketsRho) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = random_connected_graph(10, 0.25, seed, seed % 2 == 0);
    const double l2 = dense_eig(LaplacianOperator(g, LaplacianMode::normalized)).eigenvalues[1];
    const double rho = brute_force_rho(g).rho;
    EXPECT_LE(l2 / 2.0, rho + 1e-12);
    EXPECT_LE(rho, std::sqrt(2.0 * l2) + 1e-12);
  }
}
