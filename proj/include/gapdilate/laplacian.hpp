#pragma once

// Implicit graph Laplacian: L = sum_e w_e x_e x_e^T = D - A, applied through
// the CSR adjacency in O(|E|) per column. Never materialized except by
// dense(), which exists for test oracles and the desk-scale exact transforms.

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gapdilate/diagnostics.hpp"
#include "gapdilate/graph.hpp"

namespace gapdilate {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class LaplacianMode { unnormalized, normalized };

namespace detail {

// Y = D X - A X for a row-major block X (n x K), one pass over the CSR arrays.
template <int K, bool Unit>
void laplacian_block_kernel(const Graph& g, std::span<const double> degree, const double* x, double* y,
                            int dyn_k) {
  const int k = K > 0 ? K : dyn_k;
  const auto offsets = g.csr_offsets();
  const auto cols = g.csr_columns();
  const auto wts = g.csr_weights();
  const std::size_t n = g.num_nodes();
  double acc[K > 0 ? K : 1];
  std::vector<double> acc_dyn(K > 0 ? 0 : static_cast<std::size_t>(k));
  double* a = K > 0 ? acc : acc_dyn.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x + i * k;
    const double di = degree[i];
    for (int c = 0; c < k; ++c) a[c] = di * xi[c];
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) {
      const double* xj = x + static_cast<std::size_t>(cols[p]) * k;
      if constexpr (Unit) {
        for (int c = 0; c < k; ++c) a[c] -= xj[c];
      } else {
        const double w = wts[p];
        for (int c = 0; c < k; ++c) a[c] -= w * xj[c];
      }
    }
    double* yi = y + i * k;
    for (int c = 0; c < k; ++c) yi[c] = a[c];
  }
}

template <bool Unit>
void laplacian_block_dispatch(const Graph& g, std::span<const double> degree, const double* x, double* y, int k) {
  switch (k) {
    case 1: return laplacian_block_kernel<1, Unit>(g, degree, x, y, k);
    case 2: return laplacian_block_kernel<2, Unit>(g, degree, x, y, k);
    case 3: return laplacian_block_kernel<3, Unit>(g, degree, x, y, k);
    case 4: return laplacian_block_kernel<4, Unit>(g, degree, x, y, k);
    case 5: return laplacian_block_kernel<5, Unit>(g, degree, x, y, k);
    case 6: return laplacian_block_kernel<6, Unit>(g, degree, x, y, k);
    case 8: return laplacian_block_kernel<8, Unit>(g, degree, x, y, k);
    default: return laplacian_block_kernel<0, Unit>(g, degree, x, y, k);
  }
}

}  // namespace detail

class LaplacianOperator {
 public:
  LaplacianOperator(std::shared_ptr<const Graph> graph, LaplacianMode mode = LaplacianMode::unnormalized)
      : graph_(std::move(graph)), mode_(mode) {
    if (!graph_) throw InputError("laplacian: null graph");
    auto wd = graph_->weighted_degrees();
    degree_.assign(wd.begin(), wd.end());
    if (mode_ == LaplacianMode::normalized) {
      inv_sqrt_degree_.resize(degree_.size());
      for (std::size_t i = 0; i < degree_.size(); ++i)
        inv_sqrt_degree_[i] = degree_[i] > 0.0 ? 1.0 / std::sqrt(degree_[i]) : 0.0;
    }
  }

  LaplacianOperator(const Graph& graph, LaplacianMode mode = LaplacianMode::unnormalized)
      : LaplacianOperator(std::make_shared<const Graph>(graph), mode) {}

  std::size_t dim() const { return graph_->num_nodes(); }
  LaplacianMode mode() const { return mode_; }
  const Graph& graph() const { return *graph_; }
  const std::shared_ptr<const Graph>& graph_ptr() const { return graph_; }
  std::span<const double> degrees() const { return degree_; }

  /// Y = L X on row-major blocks; the hot path used by the polynomial transforms.
  void apply_rows(const RowMatrix& x, RowMatrix& y) const {
    check_rows(x.rows());
    y.resize(x.rows(), x.cols());
    if (x.cols() == 0 || x.rows() == 0) return;
    const int k = static_cast<int>(x.cols());
    if (mode_ == LaplacianMode::unnormalized) {
      kernel(x.data(), y.data(), k);
      return;
    }
    RowMatrix scaled = x;
    for (Eigen::Index i = 0; i < scaled.rows(); ++i) scaled.row(i) *= inv_sqrt_degree_[i];
    kernel(scaled.data(), y.data(), k);
    for (Eigen::Index i = 0; i < y.rows(); ++i) y.row(i) *= inv_sqrt_degree_[i];
  }

  Matrix apply(const Matrix& x) const {
    check_rows(x.rows());
    RowMatrix xr = x, yr;
    apply_rows(xr, yr);
    return yr;
  }

  Vector apply(const Vector& v) const {
    check_rows(v.rows());
    Vector y(v.size());
    if (v.size() == 0) return y;
    if (mode_ == LaplacianMode::unnormalized) {
      kernel(v.data(), y.data(), 1);
      return y;
    }
    Vector scaled(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) scaled[i] = v[i] * inv_sqrt_degree_[i];
    kernel(scaled.data(), y.data(), 1);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] *= inv_sqrt_degree_[i];
    return y;
  }

  /// Literal edge sum  sum_e w_e x_e (x_e^T v); the reference route for tests.
  Vector apply_edge_sum(const Vector& v) const {
    check_rows(v.rows());
    Vector s = v;
    if (mode_ == LaplacianMode::normalized)
      for (Eigen::Index i = 0; i < s.size(); ++i) s[i] *= inv_sqrt_degree_[i];
    Vector y = Vector::Zero(v.size());
    for (const Edge& e : graph_->edges()) {
      const IncidenceRow x = incidence_row(e);
      const double proj = e.w * (s[x.i_pos] - s[x.i_neg]);
      y[x.i_pos] += proj;
      y[x.i_neg] -= proj;
    }
    if (mode_ == LaplacianMode::normalized)
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] *= inv_sqrt_degree_[i];
    return y;
  }

  /// Dense n x n matrix. Test oracle and desk-scale exact transforms only.
  Matrix dense() const {
    const std::size_t n = dim();
    Matrix l = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const Edge& e : graph_->edges()) {
      l(e.u, e.u) += e.w;
      l(e.v, e.v) += e.w;
      l(e.u, e.v) -= e.w;
      l(e.v, e.u) -= e.w;
    }
    if (mode_ == LaplacianMode::normalized) {
      Eigen::Map<const Vector> s(inv_sqrt_degree_.data(), static_cast<Eigen::Index>(n));
      l = s.asDiagonal() * l * s.asDiagonal();
    }
    return l;
  }

 private:
  void check_rows(Eigen::Index rows) const {
    if (static_cast<std::size_t>(rows) != dim())
      throw InputError("laplacian matvec: vector length " + std::to_string(rows) + " does not match n = " +
                       std::to_string(dim()));
  }

  void kernel(const double* x, double* y, int k) const {
    if (graph_->unit_weights())
      detail::laplacian_block_dispatch<true>(*graph_, degree_, x, y, k);
    else
      detail::laplacian_block_dispatch<false>(*graph_, degree_, x, y, k);
  }

  std::shared_ptr<const Graph> graph_;
  LaplacianMode mode_;
  std::vector<double> degree_;
  std::vector<double> inv_sqrt_degree_;
};

inline LaplacianOperator build_laplacian(const Graph& g, LaplacianMode mode = LaplacianMode::unnormalized) {
  return LaplacianOperator(g, mode);
}

inline Vector laplacian_matvec(const LaplacianOperator& lap, const Vector& v) { return lap.apply(v); }

}  // namespace gapdilate
