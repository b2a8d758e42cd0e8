#pragma once

// Dense ground truth and convergence metrics.
//
// Every metric is measured against the bottom of the spectrum of the original
// Laplacian, never against the transformed operator.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gapdilate/diagnostics.hpp"
#include "gapdilate/laplacian.hpp"
#include "gapdilate/random.hpp"

namespace gapdilate {

inline constexpr Eigen::Index kDenseOracleMaxDim = 5000;

struct GroundTruth {
  Vector eigenvalues;  // ascending
  Matrix eigenvectors; // columns, orthonormal
  Eigen::Index k = 0;  // evaluation width

  Eigen::Index dim() const { return eigenvalues.size(); }

  /// Tolerance used to decide that two eigenvalues belong to one eigenspace.
  double degeneracy_tolerance() const {
    const double scale = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    return 1e-8 * std::max(1.0, scale);
  }

  /// Half-open index range [first, last) of eigenvalues within tolerance of lambda_i.
  std::pair<Eigen::Index, Eigen::Index> eigenspace(Eigen::Index i) const {
    const double tol = degeneracy_tolerance();
    const double li = eigenvalues[i];
    Eigen::Index first = i, last = i + 1;
    while (first > 0 && std::abs(eigenvalues[first - 1] - li) <= tol) --first;
    while (last < eigenvalues.size() && std::abs(eigenvalues[last] - li) <= tol) ++last;
    return {first, last};
  }
};

inline void require_symmetric(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) throw InputError(std::string(who) + ": matrix is not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw InputError(std::string(who) + ": matrix is not symmetric (max |A - A^T| = " + format_double(asym) + ")");
}

/// Full symmetric eigendecomposition with ascending eigenvalues.
inline GroundTruth dense_eig(const Matrix& a, Eigen::Index k = 0) {
  require_symmetric(a, "dense_eig");
  if (a.rows() > kDenseOracleMaxDim)
    throw InputError("dense_eig: dimension " + std::to_string(a.rows()) + " exceeds the dense oracle limit");
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw ComputeError("dense_eig: eigensolver did not converge");
  GroundTruth gt{solver.eigenvalues(), solver.eigenvectors(), k};
  return gt;
}

inline GroundTruth dense_eig(const LaplacianOperator& lap, Eigen::Index k = 0) { return dense_eig(lap.dense(), k); }

/// delta = 1 - tr(U* P) / k with P the orthogonal projector onto span(V).
inline double subspace_error(const Matrix& v, const GroundTruth& gt) {
  const Eigen::Index k = v.cols();
  if (k == 0 || v.rows() != gt.dim()) throw InputError("subspace_error: V must be n x k with k >= 1");
  if (k > gt.dim()) throw InputError("subspace_error: k exceeds n");
  for (Eigen::Index c = 0; c < k; ++c)
    if (v.col(c).squaredNorm() == 0.0) throw InputError("subspace_error: V has a zero column");
  Matrix gram = v.transpose() * v;
  Eigen::SelfAdjointEigenSolver<Matrix> ge(gram);
  const double gmax = ge.eigenvalues().maxCoeff();
  if (ge.eigenvalues().minCoeff() <= 1e-12 * gmax) {
    warn("subspace_error: singular Gram matrix, regularizing with 1e-12 I");
    gram += 1e-12 * Matrix::Identity(k, k);
  }
  const Matrix cross = gt.eigenvectors.leftCols(k).transpose() * v;  // k x k
  const Matrix solved = gram.ldlt().solve(cross.transpose());          // G^{-1} V^T U
  const double trace = (cross * solved).trace();
  return std::clamp(1.0 - trace / static_cast<double>(k), 0.0, 1.0);
}

enum class StreakMode { eigenspace, strict };

/// Length of the leading run of columns aligned (>= 1 - epsilon) with the
/// ground-truth eigenspace of the matching eigenvalue.
inline Eigen::Index eigenvector_streak(const Matrix& v, const GroundTruth& gt, double epsilon = 0.01,
                                       StreakMode mode = StreakMode::eigenspace) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("eigenvector_streak: epsilon must lie in (0, 1)");
  if (v.rows() != gt.dim()) throw InputError("eigenvector_streak: row count must equal n");
  const Eigen::Index k = std::min(v.cols(), gt.dim());
  for (Eigen::Index i = 0; i < k; ++i) {
    const double norm = v.col(i).norm();
    if (norm == 0.0) return i;
    double alignment = 0.0;
    if (mode == StreakMode::strict) {
      alignment = std::abs(gt.eigenvectors.col(i).dot(v.col(i))) / norm;
    } else {
      const auto [first, last] = gt.eigenspace(i);
      alignment = (gt.eigenvectors.middleCols(first, last - first).transpose() * v.col(i)).norm() / norm;
    }
    if (alignment < 1.0 - epsilon) return i;
  }
  return k;
}

struct Eigengap {
  double gap = 0.0;
  double ratio = 0.0;  // lambda_n / gap, +inf when gap == 0
};

/// g_i = lambda_{i+1} - lambda_i and lambda_n / g_i. Gaps below round-off are reported as 0.
inline std::vector<Eigengap> eigengaps(const GroundTruth& gt) {
  std::vector<Eigengap> out;
  const Eigen::Index n = gt.dim();
  if (n < 2) return out;
  const double top = gt.eigenvalues[n - 1];
  const double zero_tol = 1e-12 * std::max(1.0, std::abs(top));
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    double g = gt.eigenvalues[i + 1] - gt.eigenvalues[i];
    if (std::abs(g) <= zero_tol) g = 0.0;
    out.push_back({g, g == 0.0 ? std::numeric_limits<double>::infinity() : top / g});
  }
  return out;
}

// ---------------------------------------------------------------------------
// k-means on spectral embeddings
// ---------------------------------------------------------------------------

inline constexpr int kKmeansMaxIterations = 100;

/// Lloyd iterations from farthest-point seeding; the first centroid is a
/// seeded uniform pick.
inline std::vector<int> kmeans_cluster(const Matrix& embedding, int k, std::uint64_t seed) {
  const Eigen::Index n = embedding.rows();
  if (k < 2) throw InputError("kmeans_cluster: k must be at least 2");
  if (n < k) throw InputError("kmeans_cluster: fewer points than clusters");
  std::mt19937_64 rng(seed);
  Matrix centroids(k, embedding.cols());
  centroids.row(0) = embedding.row(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n))));
  Vector min_dist = (embedding.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    Eigen::Index far = 0;
    min_dist.maxCoeff(&far);
    centroids.row(c) = embedding.row(far);
    min_dist = min_dist.cwiseMin((embedding.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < kKmeansMaxIterations; ++iter) {
    bool changed = false;
    Vector dist(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      dist[i] = (centroids.rowwise() - embedding.row(i)).rowwise().squaredNorm().minCoeff(&best);
      if (labels[i] != static_cast<int>(best)) {
        labels[i] = static_cast<int>(best);
        changed = true;
      }
    }
    Matrix sums = Matrix::Zero(k, embedding.cols());
    std::vector<Eigen::Index> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[i]) += embedding.row(i);
      ++counts[labels[i]];
    }
    bool reseeded = false;
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) = sums.row(c) / static_cast<double>(counts[c]);
      } else {
        Eigen::Index far = 0;
        dist.maxCoeff(&far);
        centroids.row(c) = embedding.row(far);
        dist[far] = 0.0;
        reseeded = true;
      }
    }
    if (!changed && !reseeded) break;
  }
  return labels;
}

/// Best fraction of points whose label matches the truth under a relabeling.
/// Exhaustive over permutations for up to 8 labels, greedy beyond.
inline double cluster_accuracy(const std::vector<int>& labels, const std::vector<int>& truth) {
  if (labels.size() != truth.size()) throw InputError("cluster_accuracy: label vectors differ in length");
  if (labels.empty()) return 1.0;
  int kl = 0, kt = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || truth[i] < 0) throw InputError("cluster_accuracy: negative label");
    kl = std::max(kl, labels[i] + 1);
    kt = std::max(kt, truth[i] + 1);
  }
  const int k = std::max(kl, kt);
  std::vector<std::vector<long>> confusion(k, std::vector<long>(k, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) ++confusion[labels[i]][truth[i]];
  long best = 0;
  if (k <= 8) {
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      long hit = 0;
      for (int a = 0; a < k; ++a) hit += confusion[a][perm[a]];
      best = std::max(best, hit);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<char> used_a(k, 0), used_b(k, 0);
    for (int step = 0; step < k; ++step) {
      long top = -1;
      int ba = 0, bb = 0;
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          if (!used_a[a] && !used_b[b] && confusion[a][b] > top) {
            top = confusion[a][b];
            ba = a;
            bb = b;
          }
      used_a[ba] = used_b[bb] = 1;
      best += top;
    }
  }
  return static_cast<double>(best) / static_cast<double>(labels.size());
}

}  // namespace gapdilate
