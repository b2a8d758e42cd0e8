#include <gtest/gtest.h>

#include "gapdilate/generators.hpp"
#include "gapdilate/metrics.hpp"
#include "support.hpp"

using namespace gapdilate;
using namespace gapdilate::testing;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) m.col(c) = random_vector(rows, derive_seed(seed, c));
  return m;
}

}  // namespace

TEST(DenseEig, SingleEdge) {
  const GroundTruth gt = dense_eig(build_laplacian(single_edge()));
  EXPECT_NEAR(gt.eigenvalues[0], 0.0, 1e-14);
  EXPECT_NEAR(gt.eigenvalues[1], 2.0, 1e-14);
  EXPECT_NEAR(std::abs(gt.eigenvectors(0, 0)), M_SQRT1_2, 1e-14);
  EXPECT_NEAR(gt.eigenvectors(0, 0), gt.eigenvectors(1, 0), 1e-14);
  EXPECT_NEAR(gt.eigenvectors(0, 1), -gt.eigenvectors(1, 1), 1e-14);
}

TEST(DenseEig, TriangleAndPath) {
  const GroundTruth k3 = dense_eig(build_laplacian(triangle()));
  EXPECT_NEAR(k3.eigenvalues[0], 0.0, 1e-12);
  EXPECT_NEAR(k3.eigenvalues[1], 3.0, 1e-12);
  EXPECT_NEAR(k3.eigenvalues[2], 3.0, 1e-12);
  const GroundTruth p = dense_eig(build_laplacian(path3()));
  EXPECT_NEAR(p.eigenvalues[0], 0.0, 1e-12);
  EXPECT_NEAR(p.eigenvalues[1], 1.0, 1e-12);
  EXPECT_NEAR(p.eigenvalues[2], 3.0, 1e-12);
}

TEST(DenseEig, ResidualsAndOrthonormality) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix l = build_laplacian(random_graph(25, 0.3, seed, true)).dense();
    const GroundTruth gt = dense_eig(l);
    const double norm = l.norm();
    for (Eigen::Index i = 1; i < gt.dim(); ++i) EXPECT_LE(gt.eigenvalues[i - 1], gt.eigenvalues[i]);
    for (Eigen::Index i = 0; i < gt.dim(); ++i)
      EXPECT_LE((l * gt.eigenvectors.col(i) - gt.eigenvalues[i] * gt.eigenvectors.col(i)).norm(), 1e-8 * norm);
    EXPECT_LE((gt.eigenvectors.transpose() * gt.eigenvectors - Matrix::Identity(25, 25)).norm(), 1e-8);
  }
}

TEST(DenseEig, RejectsAsymmetric) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(dense_eig(a), InputError);
}

TEST(SubspaceError, ExactAndOrthogonal) {
  const GroundTruth gt = dense_eig(build_laplacian(random_connected_graph(12, 0.3, 1)));
  EXPECT_NEAR(subspace_error(gt.eigenvectors.leftCols(3), gt), 0.0, 1e-12);
  EXPECT_NEAR(subspace_error(gt.eigenvectors.middleCols(3, 3), gt), 1.0, 1e-12);
}

TEST(SubspaceError, InvariantUnderColumnMixing) {
  const GroundTruth gt = dense_eig(build_laplacian(random_connected_graph(15, 0.3, 2)));
  const Matrix v = random_matrix(15, 4, 3);
  const double base = subspace_error(v, gt);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Matrix mix = random_matrix(4, 4, 100 + s);
    EXPECT_NEAR(subspace_error(v * mix, gt), base, 1e-10);
  }
  EXPECT_NEAR(subspace_error(gt.eigenvectors.leftCols(4) * random_matrix(4, 4, 9), gt), 0.0, 1e-10);
}

TEST(SubspaceError, MonotoneTowardRandomSubspace) {
  const GroundTruth gt = dense_eig(build_laplacian(random_connected_graph(20, 0.25, 4)));
  const Matrix exact = gt.eigenvectors.leftCols(3);
  Matrix other = random_matrix(20, 3, 5);
  // remove the bottom-3 component so the far end is orthogonal
  other -= exact * (exact.transpose() * other);
  double prev = -1.0;
  for (int i = 0; i <= 10; ++i) {
    const double t = i / 10.0;
    const double err = subspace_error((1.0 - t) * exact + t * other, gt);
    EXPECT_GE(err, prev - 1e-12);
    prev = err;
  }
  EXPECT_NEAR(prev, 1.0, 1e-10);
}

TEST(SubspaceError, SingularGramRegularizedWithWarning) {
  const GroundTruth gt = dense_eig(build_laplacian(path3()));
  Matrix v(3, 2);
  v.col(0) = gt.eigenvectors.col(0);
  v.col(1) = gt.eigenvectors.col(0);
  ScopedWarningCapture capture;
  const double err = subspace_error(v, gt);
  EXPECT_TRUE(capture.contains("singular"));
  EXPECT_GE(err, 0.0);
  EXPECT_LE(err, 1.0);
}

TEST(SubspaceError, RejectsZeroColumn) {
  const GroundTruth gt = dense_eig(build_laplacian(path3()));
  EXPECT_THROW(subspace_error(Matrix::Zero(3, 1), gt), InputError);
}

TEST(Streak, ExactIsFull) {
  const GroundTruth gt = dense_eig(build_laplacian(random_connected_graph(15, 0.3, 6)));
  for (double eps : {1e-6, 0.01, 0.5}) EXPECT_EQ(eigenvector_streak(gt.eigenvectors.leftCols(5), gt, eps), 5);
  EXPECT_EQ(eigenvector_streak(-gt.eigenvectors.leftCols(5), gt, 0.01, StreakMode::strict), 5);
}

TEST(Streak, BreaksAtFirstMisaligned) {
  const GroundTruth gt = dense_eig(build_laplacian(path(6)));
  Matrix v = gt.eigenvectors.leftCols(3);
  v.col(1) = gt.eigenvectors.col(4);
  EXPECT_EQ(eigenvector_streak(v, gt), 1);
  v.col(0) = gt.eigenvectors.col(5);
  EXPECT_EQ(eigenvector_streak(v, gt), 0);
}

TEST(Streak, TriangleEigenspaceAware) {
  const GroundTruth gt = dense_eig(build_laplacian(triangle()));
  Matrix v(3, 3);
  v.col(0) = Vector::Ones(3).normalized();
  // any orthonormal pair inside the lambda = 3 eigenspace
  Vector a(3), b(3);
  a << 1, -1, 0;
  b << 1, 1, -2;
  v.col(1) = (0.6 * a.normalized() + 0.8 * b.normalized());
  v.col(2) = (-0.8 * a.normalized() + 0.6 * b.normalized());
  EXPECT_EQ(eigenvector_streak(v, gt), 3);
  EXPECT_LT(eigenvector_streak(v, gt, 0.01, StreakMode::strict), 3);
}

TEST(Eigengaps, PathTriangleAndScaling) {
  const auto p = eigengaps(dense_eig(build_laplacian(path3())));
  ASSERT_EQ(p.size(), 2u);
  EXPECT_NEAR(p[0].gap, 1.0, 1e-12);
  EXPECT_NEAR(p[1].gap, 2.0, 1e-12);
  EXPECT_NEAR(p[0].ratio, 3.0, 1e-12);
  EXPECT_NEAR(p[1].ratio, 1.5, 1e-12);

  const auto k3 = eigengaps(dense_eig(build_laplacian(triangle())));
  EXPECT_NEAR(k3[0].gap, 3.0, 1e-12);
  EXPECT_EQ(k3[1].gap, 0.0);
  EXPECT_TRUE(std::isinf(k3[1].ratio));

  const Matrix l = build_laplacian(random_connected_graph(10, 0.3, 1, true)).dense();
  const auto a = eigengaps(dense_eig(l)), b = eigengaps(dense_eig(7.5 * l));
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::isfinite(a[i].ratio)) { EXPECT_NEAR(a[i].ratio, b[i].ratio, 1e-8 * a[i].ratio); }
}

TEST(Kmeans, SeparatedClouds) {
  Matrix pts(40, 2);
  std::vector<int> truth(40);
  for (int i = 0; i < 40; ++i) {
    const bool right = i % 2 == 1;
    pts.row(i) = random_vector(2, i).transpose() * 0.1;
    pts(i, 0) += right ? 10.0 : -10.0;
    truth[i] = right;
  }
  EXPECT_DOUBLE_EQ(cluster_accuracy(kmeans_cluster(pts, 2, 3), truth), 1.0);
}

TEST(Kmeans, IdenticalPoints) {
  const Matrix pts = Matrix::Ones(10, 2);
  std::vector<int> truth{0, 0, 0, 0, 0, 0, 0, 1, 1, 1};
  EXPECT_DOUBLE_EQ(cluster_accuracy(kmeans_cluster(pts, 2, 1), truth), 0.7);
}

TEST(Kmeans, CliqueSpectralEmbedding) {
  const LabeledGraph lg = gen_clique_clusters({.n = 60, .k = 3, .seed = 8});
  const GroundTruth gt = dense_eig(build_laplacian(lg.graph));
  const auto labels = kmeans_cluster(gt.eigenvectors.leftCols(3), 3, 1);
  EXPECT_GE(cluster_accuracy(labels, lg.labels), 0.99);
}

TEST(Kmeans, RejectsBadInput) {
  EXPECT_THROW(kmeans_cluster(Matrix::Ones(5, 2), 1, 0), InputError);
  EXPECT_THROW(kmeans_cluster(Matrix::Ones(2, 2), 3, 0), InputError);
}

TEST(ClusterAccuracy, PermutationInvariant) {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  EXPECT_DOUBLE_EQ(cluster_accuracy({2, 2, 0, 0, 1, 1}, truth), 1.0);
  EXPECT_DOUBLE_EQ(cluster_accuracy({2, 2, 0, 1, 1, 1}, truth), 5.0 / 6.0);
  EXPECT_THROW(cluster_accuracy({0, 1}, truth), InputError);
}

TEST(ClusterAccuracy, GreedyBeyondEightLabels) {
  std::vector<int> truth, labels;
  for (int c = 0; c < 10; ++c)
    for (int r = 0; r < 3; ++r) {
      truth.push_back(c);
      labels.push_back((c + 4) % 10);
    }
  EXPECT_DOUBLE_EQ(cluster_accuracy(labels, truth), 1.0);
}
