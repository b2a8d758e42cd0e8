#pragma once

// Iterative top-k eigensolvers driven by a symmetric matvec oracle.
//
//   Oja:   V <- orth(V + eta M V)                      (thin QR, modified Gram-Schmidt)
//   mu-EG: g_i = M v_i - sum_{j<i} (v_j^T M v_i) v_j
//          r_i = g_i - (v_i^T g_i) v_i
//          v_i <- normalize(v_i + eta r_i)             (parents from the previous iterate)
//
// run_solver feeds either the exact reversed operator or an unbiased
// stochastic estimate of it and records convergence metrics against the dense
// ground truth of the original Laplacian.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gapdilate/diagnostics.hpp"
#include "gapdilate/incidence.hpp"
#include "gapdilate/metrics.hpp"
#include "gapdilate/random.hpp"
#include "gapdilate/transforms.hpp"
#include "gapdilate/walks.hpp"

namespace gapdilate {

template <class O>
concept MatvecOracle = requires(O& oracle, const Matrix& x) {
  { oracle.apply(x) } -> std::convertible_to<Matrix>;
  { oracle.dim() } -> std::convertible_to<std::size_t>;
};

struct EigenState {
  Matrix v;                // n x k, unit-norm columns
  std::int64_t step = 0;
  std::uint64_t seed = 0;  // keys re-randomization of collapsed columns
};

namespace detail {

inline Vector random_unit_column(Eigen::Index n, std::uint64_t key) {
  SplitMix64 rng(key);
  Vector c(n);
  for (Eigen::Index i = 0; i < n; ++i) c[i] = standard_normal(rng);
  return c.normalized();
}

// Modified Gram-Schmidt, applied twice. A column that collapses onto the span
// of its predecessors is replaced by a fresh random direction.
inline void orthonormalize(Matrix& v, std::uint64_t seed, std::int64_t step) {
  const Eigen::Index n = v.rows();
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    const double original = v.col(c).norm();
    for (int attempt = 0;; ++attempt) {
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index j = 0; j < c; ++j) v.col(c) -= v.col(j).dot(v.col(c)) * v.col(j);
      const double norm = v.col(c).norm();
      if (std::isfinite(norm) && norm > 1e-12 * std::max(original, 1e-300) && norm > 0.0) {
        v.col(c) /= norm;
        break;
      }
      if (attempt >= 8) throw ComputeError("orthonormalize: cannot complete an orthonormal basis");
      warn("solver: rank collapse in column " + std::to_string(c) + " at step " + std::to_string(step) +
           ", re-randomizing");
      v.col(c) = random_unit_column(n, derive_seed(seed, static_cast<std::uint64_t>(step) * 1024 + c, attempt));
    }
  }
}

}  // namespace detail

/// Seeded Gaussian n x k block, column-orthonormalized.
inline EigenState init_state(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw InputError("init_state: k must be at least 1");
  if (k > n) throw InputError("init_state: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  std::mt19937_64 rng(seed);
  EigenState s{Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)), 0, seed};
  for (Eigen::Index c = 0; c < s.v.cols(); ++c)
    for (Eigen::Index i = 0; i < s.v.rows(); ++i) s.v(i, c) = standard_normal(rng);
  detail::orthonormalize(s.v, seed, -1);
  return s;
}

template <MatvecOracle Oracle>
EigenState oja_step(EigenState state, Oracle& oracle, double eta) {
  if (static_cast<std::size_t>(state.v.rows()) != oracle.dim()) throw InputError("oja_step: dimension mismatch");
  const Matrix mv = oracle.apply(state.v);
  state.v += eta * mv;
  ++state.step;
  detail::orthonormalize(state.v, state.seed, state.step);
  return state;
}

template <MatvecOracle Oracle>
EigenState mu_eg_step(EigenState state, Oracle& oracle, double eta) {
  if (static_cast<std::size_t>(state.v.rows()) != oracle.dim()) throw InputError("mu_eg_step: dimension mismatch");
  const Matrix mv = oracle.apply(state.v);
  const Matrix& v = state.v;
  const Eigen::Index k = v.cols();
  // rewards[j, i] = v_j^T M v_i
  const Matrix rewards = v.transpose() * mv;
  Matrix next(v.rows(), k);
  ++state.step;
  for (Eigen::Index i = 0; i < k; ++i) {
    Vector g = mv.col(i);
    for (Eigen::Index j = 0; j < i; ++j) g -= rewards(j, i) * v.col(j);
    const Vector r = g - v.col(i).dot(g) * v.col(i);
    Vector updated = v.col(i) + eta * r;
    const double norm = updated.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      warn("mu_eg_step: column " + std::to_string(i) + " collapsed at step " + std::to_string(state.step) +
           ", re-randomizing");
      updated = detail::random_unit_column(v.rows(), derive_seed(state.seed, static_cast<std::uint64_t>(state.step), i));
    } else {
      updated /= norm;
    }
    next.col(i) = updated;
  }
  state.v = std::move(next);
  return state;
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Exact reversed operator.
class DeterministicOracle {
 public:
  explicit DeterministicOracle(const TransformedOperator& op) : op_(&op) {}
  std::size_t dim() const { return op_->dim(); }
  Matrix apply(const Matrix& x) { return op_->apply(x); }

 private:
  const TransformedOperator* op_;
};

/// Identity transform: lambda_star v - (|E|/|B|) sum_{e in B} w_e x_e x_e^T v
/// with B drawn uniformly with replacement. A batch covering every edge
/// falls back to the exact operator.
class EdgeBatchOracle {
 public:
  EdgeBatchOracle(const TransformedOperator& op, std::size_t batch_size, std::uint64_t seed)
      : op_(&op), batch_(batch_size), seed_(seed) {
    if (op.transform().kind != TransformKind::identity)
      throw InputError("edge batch oracle: only the identity transform is sampled by edges");
    if (batch_size == 0) throw InputError("edge batch oracle: batch size must be positive");
  }

  std::size_t dim() const { return op_->dim(); }

  Matrix apply(const Matrix& x) {
    const Graph& g = op_->base().graph();
    const std::size_t m = g.num_edges();
    const std::uint64_t call = calls_++;
    if (m == 0 || batch_ >= m) return op_->apply(x);
    SplitMix64 rng(derive_seed(seed_, call));
    Matrix lx = Matrix::Zero(x.rows(), x.cols());
    for (std::size_t b = 0; b < batch_; ++b) {
      const Edge& e = g.edge(uniform_index(rng, m));
      const Eigen::RowVectorXd proj = e.w * (x.row(e.u) - x.row(e.v));
      lx.row(e.u) += proj;
      lx.row(e.v) -= proj;
    }
    lx *= static_cast<double>(m) / static_cast<double>(batch_);
    return op_->lambda_star() * x - lx;
  }

 private:
  const TransformedOperator* op_;
  std::size_t batch_;
  std::uint64_t seed_;
  std::uint64_t calls_ = 0;
};

/// Polynomial transforms: lambda_star v - (random-walk estimate of f(L) v).
class WalkPolynomialOracle {
 public:
  WalkPolynomialOracle(const TransformedOperator& op, SamplerConfig sampler)
      : op_(&op), inc_(op.base().graph_ptr()), gamma_(polynomial_coefficients(op.transform())), cfg_(sampler) {
    if (!op.transform().is_polynomial()) throw InputError("walk oracle: transform must be polynomial");
    if (op.base().mode() != LaplacianMode::unnormalized)
      throw InputError("walk oracle: random-walk estimates apply to the unnormalized Laplacian");
    cfg_.validate();
  }

  std::size_t dim() const { return op_->dim(); }

  Matrix apply(const Matrix& x) {
    const std::uint64_t call = calls_++;
    Matrix y(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      SamplerConfig cfg = cfg_;
      cfg.seed = derive_seed(cfg_.seed, call, static_cast<std::uint64_t>(c));
      const Vector v = x.col(c);
      y.col(c) = op_->lambda_star() * v - estimate_polynomial_matvec(inc_, gamma_, v, cfg);
    }
    return y;
  }

 private:
  const TransformedOperator* op_;
  EdgeIncidenceGraph inc_;
  std::vector<double> gamma_;
  SamplerConfig cfg_;
  std::uint64_t calls_ = 0;
};

using AnyOracle = std::variant<DeterministicOracle, EdgeBatchOracle, WalkPolynomialOracle>;

/// batch_size 0 gives the exact operator; otherwise edges are sampled for the
/// identity transform and walks for the other polynomial transforms
/// (walks_per_estimate defaults to batch_size when the sampler is omitted).
inline AnyOracle make_stochastic_oracle(const TransformedOperator& op, std::size_t batch_size, std::uint64_t seed,
                                        std::optional<SamplerConfig> sampler = std::nullopt) {
  if (batch_size == 0) return DeterministicOracle(op);
  if (op.transform().is_exact())
    throw InputError("stochastic oracle: exact transform " + op.transform().name() + " cannot be sampled");
  if (op.transform().kind == TransformKind::identity) return EdgeBatchOracle(op, batch_size, seed);
  SamplerConfig cfg = sampler.value_or(SamplerConfig{});
  if (!sampler) cfg.walks_per_estimate = batch_size;
  cfg.seed = derive_seed(seed, 0x5a5a);
  return WalkPolynomialOracle(op, cfg);
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

enum class SolverKind { oja, mu_eg };
enum class StepSchedule { constant, inv_sqrt };
enum class StopRule { none, streak, error, both };

inline SolverKind parse_solver_kind(std::string_view s) {
  if (s == "oja") return SolverKind::oja;
  if (s == "mu-eg") return SolverKind::mu_eg;
  throw InputError("unknown solver '" + std::string(s) + "' (expected oja or mu-eg)");
}

inline std::string to_string(SolverKind s) { return s == SolverKind::oja ? "oja" : "mu-eg"; }

struct SolverConfig {
  SolverKind solver = SolverKind::oja;
  std::size_t k = 1;
  double eta = 1.0;
  StepSchedule schedule = StepSchedule::constant;
  std::int64_t steps = 1000;
  std::size_t batch_size = 0;  // 0 = exact operator
  std::uint64_t seed = 0;
  std::int64_t eval_every = 1;
  // eta is divided by the operator's spectral bound
  bool normalize_step = true;
  double streak_epsilon = 0.01;
  StreakMode streak_mode = StreakMode::eigenspace;
  StopRule stop = StopRule::none;
  double target_error = 1e-3;
  bool record_time = false;
  bool keep_snapshots = false;
  std::optional<SamplerConfig> sampler;

  void validate(std::size_t n) const {
    if (k == 0) throw InputError("solver config: k must be at least 1");
    if (k > n) throw InputError("solver config: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
    if (!(eta > 0.0) || !std::isfinite(eta)) throw InputError("solver config: eta must be positive");
    if (steps < 0) throw InputError("solver config: steps must be nonnegative");
    if (eval_every < 1) throw InputError("solver config: eval_every must be at least 1");
    if (!(streak_epsilon > 0.0 && streak_epsilon < 1.0))
      throw InputError("solver config: streak epsilon must lie in (0, 1)");
  }
};

struct TrajectoryRow {
  std::int64_t step = 0;
  double subspace_error = std::numeric_limits<double>::quiet_NaN();
  std::int64_t streak = -1;
  std::int64_t elapsed_ns = 0;
};

struct SolverRun {
  std::vector<TrajectoryRow> trajectory;
  std::vector<Matrix> snapshots;  // parallel to trajectory when keep_snapshots is set
  EigenState final_state;
  std::optional<std::int64_t> steps_to_streak;  // first evaluated step with streak == k
  std::optional<std::int64_t> steps_to_error;   // first evaluated step with error <= target
};

template <MatvecOracle Oracle>
SolverRun run_solver(Oracle& oracle, double spectral_bound, const SolverConfig& config, const GroundTruth* truth) {
  config.validate(oracle.dim());
  if (truth && static_cast<std::size_t>(truth->dim()) != oracle.dim())
    throw InputError("run_solver: ground truth dimension does not match the operator");
  SolverRun run;
  run.final_state = init_state(oracle.dim(), config.k, config.seed);
  const double scale = config.normalize_step && spectral_bound > 0.0 ? 1.0 / spectral_bound : 1.0;
  const auto k = static_cast<std::int64_t>(config.k);
  const auto t0 = std::chrono::steady_clock::now();

  auto evaluate = [&](const EigenState& s) {
    TrajectoryRow row;
    row.step = s.step;
    if (truth) {
      row.subspace_error = subspace_error(s.v, *truth);
      row.streak = eigenvector_streak(s.v, *truth, config.streak_epsilon, config.streak_mode);
      if (!run.steps_to_streak && row.streak == k) run.steps_to_streak = s.step;
      if (!run.steps_to_error && row.subspace_error <= config.target_error) run.steps_to_error = s.step;
    }
    if (config.record_time)
      row.elapsed_ns =
          std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
    run.trajectory.push_back(row);
    if (config.keep_snapshots) run.snapshots.push_back(s.v);
  };
  auto reached = [&]() {
    switch (config.stop) {
      case StopRule::none: return false;
      case StopRule::streak: return run.steps_to_streak.has_value();
      case StopRule::error: return run.steps_to_error.has_value();
      case StopRule::both: return run.steps_to_streak.has_value() && run.steps_to_error.has_value();
    }
    return false;
  };

  evaluate(run.final_state);
  for (std::int64_t t = 1; t <= config.steps && !reached(); ++t) {
    double eta = config.eta * scale;
    if (config.schedule == StepSchedule::inv_sqrt) eta /= std::sqrt(static_cast<double>(t));
    run.final_state = config.solver == SolverKind::oja ? oja_step(std::move(run.final_state), oracle, eta)
                                                       : mu_eg_step(std::move(run.final_state), oracle, eta);
    if (t % config.eval_every == 0 || t == config.steps) evaluate(run.final_state);
  }
  return run;
}

/// Runs the configured solver on lambda_star I - f(L).
inline SolverRun run_solver(const TransformedOperator& op, const SolverConfig& config, const GroundTruth* truth) {
  AnyOracle oracle = make_stochastic_oracle(op, config.batch_size, derive_seed(config.seed, 0x0c1e), config.sampler);
  return std::visit([&](auto& o) { return run_solver(o, op.spectral_bound(), config, truth); }, oracle);
}

/// Full pipeline from a graph: Laplacian, transform, reversal, solver.
inline SolverRun run_solver(const Graph& g, const SpectralTransform& transform, const SolverConfig& config,
                            const GroundTruth* truth) {
  const TransformedOperator op = TransformedOperator::make(LaplacianOperator(g), transform);
  return run_solver(op, config, truth);
}

inline void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  out << "step,subspace_error,streak,elapsed_ns\n";
  for (const auto& r : rows) {
    out << r.step << ',';
    if (!std::isnan(r.subspace_error)) out << format_double(r.subspace_error);
    out << ',';
    if (r.streak >= 0) out << r.streak;
    out << ',' << r.elapsed_ns << '\n';
  }
}

}  // namespace gapdilate
