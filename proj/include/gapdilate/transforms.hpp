#pragma once

// Eigenvector-preserving spectral maps f applied to the Laplacian, and the
// reversed operator  lambda_star I - f(L)  whose top eigenvectors are the
// bottom eigenvectors of L whenever f is increasing on the spectrum.
//
// Polynomial kinds are applied with repeated Laplacian matvecs (O(degree |E|)).
// Exact kinds go through a dense eigendecomposition and are desk-scale only.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gapdilate/diagnostics.hpp"
#include "gapdilate/incidence.hpp"
#include "gapdilate/laplacian.hpp"
#include "gapdilate/metrics.hpp"

namespace gapdilate {

enum class TransformKind { identity, exact_log, log_taylor, exact_negexp, negexp_taylor, negexp_limit };

struct SpectralTransform {
  TransformKind kind = TransformKind::identity;
  int degree = 0;         // series degree; unused by identity and exact kinds
  double epsilon = 1e-6;  // shift for the logarithm kinds

  static SpectralTransform identity() { return {TransformKind::identity, 0, 1e-6}; }
  static SpectralTransform exact_log(double eps = 1e-6) { return {TransformKind::exact_log, 0, eps}; }
  static SpectralTransform log_taylor(int degree, double eps = 1e-6) { return {TransformKind::log_taylor, degree, eps}; }
  static SpectralTransform exact_negexp() { return {TransformKind::exact_negexp, 0, 1e-6}; }
  static SpectralTransform negexp_taylor(int degree) { return {TransformKind::negexp_taylor, degree, 1e-6}; }
  static SpectralTransform negexp_limit(int degree) { return {TransformKind::negexp_limit, degree, 1e-6}; }

  bool is_exact() const { return kind == TransformKind::exact_log || kind == TransformKind::exact_negexp; }
  bool is_polynomial() const { return !is_exact(); }
  bool is_log() const { return kind == TransformKind::exact_log || kind == TransformKind::log_taylor; }

  void validate() const {
    if (is_log() && !(epsilon > 0.0)) throw InputError("transform: epsilon must be positive for logarithm kinds");
    switch (kind) {
      case TransformKind::log_taylor:
        if (degree < 1) throw InputError("transform: log-taylor degree must be at least 1");
        break;
      case TransformKind::negexp_taylor:
        if (degree < 0) throw InputError("transform: negexp-taylor degree must be nonnegative");
        break;
      case TransformKind::negexp_limit:
        if (degree < 1 || degree % 2 == 0)
          throw InputError("transform: negexp-limit degree must be a positive odd integer (got " +
                           std::to_string(degree) + ")");
        break;
      default:
        break;
    }
  }

  std::string name() const {
    switch (kind) {
      case TransformKind::identity: return "identity";
      case TransformKind::exact_log: return "log";
      case TransformKind::log_taylor: return "log-taylor";
      case TransformKind::exact_negexp: return "negexp";
      case TransformKind::negexp_taylor: return "negexp-taylor";
      case TransformKind::negexp_limit: return "negexp-limit";
    }
    return "unknown";
  }
};

inline TransformKind parse_transform_kind(std::string_view name) {
  if (name == "identity") return TransformKind::identity;
  if (name == "log") return TransformKind::exact_log;
  if (name == "log-taylor") return TransformKind::log_taylor;
  if (name == "negexp") return TransformKind::exact_negexp;
  if (name == "negexp-taylor") return TransformKind::negexp_taylor;
  if (name == "negexp-limit") return TransformKind::negexp_limit;
  throw InputError("unknown transform '" + std::string(name) + "'");
}

/// f(lambda) for the chosen transform.
inline double scalar_map(const SpectralTransform& t, double lambda) {
  if (t.is_log() && !(lambda + t.epsilon > 0.0))
    throw InputError("scalar_map: lambda + epsilon must be positive for logarithm kinds");
  switch (t.kind) {
    case TransformKind::identity:
      return lambda;
    case TransformKind::exact_log:
      return std::log(lambda + t.epsilon);
    case TransformKind::log_taylor: {
      const double b = lambda + t.epsilon - 1.0;
      double acc = 0.0;
      for (int i = t.degree; i >= 1; --i) acc = ((i % 2 == 1) ? 1.0 : -1.0) / i + b * acc;
      return b * acc;
    }
    case TransformKind::exact_negexp:
      return -std::exp(-lambda);
    case TransformKind::negexp_taylor: {
      // -sum_{i<=l} (-lambda)^i / i!  by Horner on the factorial-nested form
      double acc = 1.0;
      for (int i = t.degree; i >= 1; --i) acc = 1.0 + acc * (-lambda) / i;
      return -acc;
    }
    case TransformKind::negexp_limit:
      return -std::pow(1.0 - lambda / t.degree, t.degree);
  }
  return lambda;
}

/// Power-basis coefficients c_0..c_l with f(lambda) = sum_i c_i lambda^i.
inline std::vector<double> polynomial_coefficients(const SpectralTransform& t) {
  t.validate();
  const int l = t.degree;
  switch (t.kind) {
    case TransformKind::identity:
      return {0.0, 1.0};
    case TransformKind::negexp_taylor: {
      std::vector<double> c(l + 1);
      double inv_fact = 1.0;
      for (int i = 0; i <= l; ++i) {
        if (i > 0) inv_fact /= i;
        c[i] = (i % 2 == 0 ? -1.0 : 1.0) * inv_fact;
      }
      return c;
    }
    case TransformKind::negexp_limit: {
      std::vector<double> c(l + 1);
      double binom_scaled = 1.0;  // C(l, i) / l^i
      for (int i = 0; i <= l; ++i) {
        if (i > 0) binom_scaled *= static_cast<double>(l - i + 1) / (static_cast<double>(i) * l);
        c[i] = (i % 2 == 0 ? -1.0 : 1.0) * binom_scaled;
      }
      return c;
    }
    case TransformKind::log_taylor: {
      // sum_{j=1..l} (-1)^{j+1}/j (lambda + a)^j,  a = eps - 1
      const double a = t.epsilon - 1.0;
      std::vector<double> c(l + 1, 0.0);
      for (int j = 1; j <= l; ++j) {
        const double dj = (j % 2 == 1 ? 1.0 : -1.0) / j;
        double binom = 1.0;  // C(j, i)
        for (int i = 0; i <= j; ++i) {
          if (i > 0) binom = binom * (j - i + 1) / i;
          c[i] += dj * binom * std::pow(a, j - i);
        }
      }
      return c;
    }
    default:
      throw InputError("polynomial_coefficients: " + t.name() + " is not a polynomial transform");
  }
}

/// V diag(f(lambda_i)) V^T from a dense symmetric eigendecomposition.
inline Matrix exact_transform_dense(const SpectralTransform& t, const Matrix& l_dense) {
  t.validate();
  const GroundTruth eig = dense_eig(l_dense);
  Vector mapped(eig.dim());
  for (Eigen::Index i = 0; i < eig.dim(); ++i) {
    // round-off can push the zero eigenvalue slightly negative
    const double lambda = t.is_log() ? std::max(eig.eigenvalues[i], 0.0) : eig.eigenvalues[i];
    mapped[i] = scalar_map(t, lambda);
  }
  return eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.transpose();
}

/// Reversal shift: 1% above the mapped spectral bound, or 0 for the
/// negative-exponential kinds whose image is already nonpositive.
inline double choose_lambda_star(const SpectralTransform& t, double lambda_upper) {
  switch (t.kind) {
    case TransformKind::identity:
      return 1.01 * lambda_upper;
    case TransformKind::exact_log:
    case TransformKind::log_taylor: {
      const double top = std::log(lambda_upper + t.epsilon);
      return top + 0.01 * std::abs(top);
    }
    default:
      return 0.0;
  }
}

/// Warns when a series transform is not a faithful approximation on
/// [0, lambda_upper]. Returns true when no warning was issued.
inline bool check_series_range(const SpectralTransform& t, double lambda_upper) {
  if (t.kind == TransformKind::log_taylor && lambda_upper >= 2.0 - t.epsilon) {
    warn("log-taylor series diverges: spectral bound " + format_double(lambda_upper) +
         " >= 2 - epsilon, the series only converges for spectral radius below 2");
    return false;
  }
  if (t.kind == TransformKind::negexp_limit && lambda_upper > 2.0 * t.degree) {
    warn("negexp-limit degree " + std::to_string(t.degree) + " is too small for spectral bound " +
         format_double(lambda_upper) + ": |1 - lambda/l|^l exceeds 1 beyond 2l = " + std::to_string(2 * t.degree));
    return false;
  }
  return true;
}

/// lambda_star I - f(L), the operator handed to the top-k solvers.
class TransformedOperator {
 public:
  TransformedOperator(LaplacianOperator base, SpectralTransform t, double lambda_star, double lambda_upper,
                      std::optional<Matrix> dense_transform = std::nullopt)
      : base_(std::move(base)),
        transform_(t),
        lambda_star_(lambda_star),
        lambda_upper_(lambda_upper),
        dense_(std::move(dense_transform)) {
    transform_.validate();
    if (dense_ && (dense_->rows() != static_cast<Eigen::Index>(base_.dim()) || dense_->cols() != dense_->rows()))
      throw InputError("transformed operator: dense transform has the wrong shape");
    if (transform_.kind == TransformKind::negexp_taylor || transform_.kind == TransformKind::log_taylor)
      coeffs_ = polynomial_coefficients(transform_);
    bound_ = compute_spectral_bound();
  }

  /// Builds the operator with degree-bound lambda_upper and the default
  /// lambda_star; exact kinds attach the dense oracle (n <= 5000).
  static TransformedOperator make(const LaplacianOperator& base, const SpectralTransform& t) {
    t.validate();
    const double lambda_upper = base.mode() == LaplacianMode::normalized ? 2.0 : degree_bounds(base.graph()).lambda_upper;
    check_series_range(t, lambda_upper);
    std::optional<Matrix> dense;
    if (t.is_exact()) {
      if (static_cast<Eigen::Index>(base.dim()) > kDenseOracleMaxDim)
        throw InputError("exact transform " + t.name() + " requires the dense oracle (n <= " +
                         std::to_string(kDenseOracleMaxDim) + "), n = " + std::to_string(base.dim()));
      dense = exact_transform_dense(t, base.dense());
    }
    return TransformedOperator(base, t, choose_lambda_star(t, lambda_upper), lambda_upper, std::move(dense));
  }

  std::size_t dim() const { return base_.dim(); }
  const LaplacianOperator& base() const { return base_; }
  const SpectralTransform& transform() const { return transform_; }
  double lambda_star() const { return lambda_star_; }
  double lambda_upper() const { return lambda_upper_; }
  bool has_dense_oracle() const { return dense_.has_value(); }

  /// max |lambda_star - f(lambda)| over a grid on [0, lambda_upper]; used to
  /// make step sizes comparable across transforms.
  double spectral_bound() const { return bound_; }

  /// Y = (lambda_star I - f(L)) X on row-major blocks.
  void apply_rows(const RowMatrix& x, RowMatrix& y) const {
    if (static_cast<std::size_t>(x.rows()) != dim())
      throw InputError("transformed matvec: vector length " + std::to_string(x.rows()) + " does not match n = " +
                       std::to_string(dim()));
    if (transform_.is_exact()) {
      if (!dense_) throw InputError("transformed matvec: exact transform " + transform_.name() + " has no dense oracle");
      y = lambda_star_ * x - RowMatrix(*dense_ * x);
      return;
    }
    RowMatrix lw;
    switch (transform_.kind) {
      case TransformKind::identity:
        base_.apply_rows(x, lw);
        y = lambda_star_ * x - lw;
        return;
      case TransformKind::negexp_limit: {
        // w <- (I - L/l)^l x ; f(L) x = -w
        RowMatrix w = x;
        const double step = 1.0 / transform_.degree;
        for (int i = 0; i < transform_.degree; ++i) {
          base_.apply_rows(w, lw);
          w -= step * lw;
        }
        y = lambda_star_ * x + w;
        return;
      }
      case TransformKind::negexp_taylor: {
        RowMatrix w = coeffs_.back() * x;
        for (int i = static_cast<int>(coeffs_.size()) - 2; i >= 0; --i) {
          base_.apply_rows(w, lw);
          w = coeffs_[i] * x + lw;
        }
        y = lambda_star_ * x - w;
        return;
      }
      case TransformKind::log_taylor: {
        // Horner in B = L + (eps - 1) I on d_i = (-1)^{i+1}/i, i = 1..l
        const double shift = transform_.epsilon - 1.0;
        const int l = transform_.degree;
        auto coef = [](int i) { return (i % 2 == 1 ? 1.0 : -1.0) / i; };
        RowMatrix w = coef(l) * x;
        for (int i = l - 1; i >= 1; --i) {
          base_.apply_rows(w, lw);
          w = coef(i) * x + lw + shift * w;
        }
        base_.apply_rows(w, lw);
        w = lw + shift * w;
        y = lambda_star_ * x - w;
        return;
      }
      default:
        break;
    }
  }

  Matrix apply(const Matrix& x) const {
    RowMatrix xr = x, yr;
    apply_rows(xr, yr);
    return yr;
  }

  Vector apply(const Vector& v) const {
    RowMatrix xr = v, yr;
    apply_rows(xr, yr);
    return Vector(yr.col(0));
  }

 private:
  double compute_spectral_bound() const {
    constexpr int kGrid = 4096;
    double best = 0.0;
    for (int i = 0; i <= kGrid; ++i) {
      const double lambda = lambda_upper_ * i / kGrid;
      best = std::max(best, std::abs(lambda_star_ - scalar_map(transform_, lambda)));
    }
    return best > 0.0 ? best : 1.0;
  }

  LaplacianOperator base_;
  SpectralTransform transform_;
  double lambda_star_;
  double lambda_upper_;
  std::optional<Matrix> dense_;
  std::vector<double> coeffs_;
  double bound_ = 1.0;
};

inline Vector apply_transform_matvec(const TransformedOperator& op, const Vector& v) { return op.apply(v); }

}  // namespace gapdilate
