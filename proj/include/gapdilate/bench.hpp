#pragma once

// Experiment harness: graph sources, suite files, CSV summaries.
//
// Graph sources are written as `family:key=value,...`:
//
//   clique:n=60,k=3,max_shortcircuit=25,min_shortcircuit=0,seed=1
//   mdp:s=1,h=10
//   linkpred:n=300,k=3,max_shortcircuit=25,seed=1,p=0.2,lp_seed=7
//   file:path/to/graph.txt
//
// A suite file holds one experiment per block of `key = value` lines; blocks
// are separated by blank lines and `#` starts a comment.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gapdilate/generators.hpp"
#include "gapdilate/metrics.hpp"
#include "gapdilate/solvers.hpp"
#include "gapdilate/transforms.hpp"

namespace gapdilate {

struct FileSource {
  std::string path;
};

using GraphSource = std::variant<CliqueSpec, MdpSpec, LinkPredSpec, FileSource>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  std::istringstream in(text);
  in >> value;
  if (in.fail() || !in.eof()) throw InputError("invalid value '" + text + "' for " + key);
  if constexpr (std::is_unsigned_v<T>)
    if (text.find('-') != std::string::npos) throw InputError("invalid value '" + text + "' for " + key);
  return value;
}

inline std::map<std::string, std::string> parse_pairs(std::string_view body, const std::string& what) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const auto comma = body.find(',', pos);
    const std::string item = trim(body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InputError(what + ": expected key=value, got '" + item + "'");
      out[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

// Pops a key and parses it; unknown leftovers are reported by the caller.
template <class T>
void take(std::map<std::string, std::string>& kv, const std::string& key, T& dst) {
  const auto it = kv.find(key);
  if (it == kv.end()) return;
  if constexpr (std::is_same_v<T, std::string>)
    dst = it->second;
  else
    dst = parse_number<T>(key, it->second);
  kv.erase(it);
}

inline void reject_leftovers(const std::map<std::string, std::string>& kv, const std::string& what) {
  if (!kv.empty()) throw InputError(what + ": unknown key '" + kv.begin()->first + "'");
}

}  // namespace detail

inline GraphSource parse_graph_source(std::string_view text) {
  const std::string s = detail::trim(text);
  const auto colon = s.find(':');
  const std::string family = s.substr(0, colon);
  const std::string body = colon == std::string::npos ? std::string() : s.substr(colon + 1);
  if (family == "file") {
    if (body.empty()) throw InputError("graph source: file path is empty");
    if (!std::filesystem::exists(body)) throw InputError("graph source: file '" + body + "' does not exist");
    return FileSource{body};
  }
  auto kv = detail::parse_pairs(body, "graph source '" + s + "'");
  if (family == "clique" || family == "linkpred") {
    CliqueSpec c;
    detail::take(kv, "n", c.n);
    detail::take(kv, "k", c.k);
    detail::take(kv, "max_shortcircuit", c.max_shortcircuit);
    detail::take(kv, "min_shortcircuit", c.min_shortcircuit);
    detail::take(kv, "seed", c.seed);
    if (family == "clique") {
      detail::reject_leftovers(kv, "clique source");
      validate(c);
      return c;
    }
    LinkPredSpec l{c, 0.2, 0};
    detail::take(kv, "p", l.p_remove);
    detail::take(kv, "lp_seed", l.seed);
    detail::reject_leftovers(kv, "linkpred source");
    validate(c);
    if (!(l.p_remove >= 0.0 && l.p_remove < 1.0)) throw InputError("linkpred source: p must lie in [0, 1)");
    return l;
  }
  if (family == "mdp") {
    MdpSpec m;
    detail::take(kv, "s", m.s);
    detail::take(kv, "h", m.h);
    detail::reject_leftovers(kv, "mdp source");
    if (m.s == 0 || m.h == 0) throw InputError("mdp source: s and h must be positive");
    return m;
  }
  throw InputError("graph source: unknown family '" + family + "' (expected clique, mdp, linkpred or file)");
}

inline std::string describe(const GraphSource& src) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FileSource>)
          return "file(" + s.path + ")";
        else
          return s.describe();
      },
      src);
}

struct LoadedGraph {
  std::shared_ptr<const Graph> graph;
  std::vector<int> labels;  // empty when the family has no ground-truth clusters
};

inline LoadedGraph load_graph(const GraphSource& src) {
  return std::visit(
      [](const auto& s) -> LoadedGraph {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CliqueSpec>) {
          LabeledGraph lg = gen_clique_clusters(s);
          return {std::make_shared<const Graph>(std::move(lg.graph)), std::move(lg.labels)};
        } else if constexpr (std::is_same_v<T, MdpSpec>) {
          return {std::make_shared<const Graph>(gen_three_room_mdp(s)), {}};
        } else if constexpr (std::is_same_v<T, LinkPredSpec>) {
          LinkPredResult r = degrade_and_complete(s);
          return {std::make_shared<const Graph>(std::move(r.graph)), std::move(r.labels)};
        } else {
          return {std::make_shared<const Graph>(read_edge_list(s.path)), {}};
        }
      },
      src);
}

struct ExperimentSpec {
  std::string name;
  std::string graph_text;  // source string as written, used to share ground truth
  GraphSource graph = CliqueSpec{};
  LaplacianMode laplacian = LaplacianMode::unnormalized;
  SpectralTransform transform = SpectralTransform::identity();
  SolverConfig solver;
};

inline StopRule parse_stop_rule(std::string_view s) {
  if (s == "none") return StopRule::none;
  if (s == "streak") return StopRule::streak;
  if (s == "error") return StopRule::error;
  if (s == "both") return StopRule::both;
  throw InputError("unknown stop rule '" + std::string(s) + "'");
}

inline StepSchedule parse_schedule(std::string_view s) {
  if (s == "constant") return StepSchedule::constant;
  if (s == "inv-sqrt") return StepSchedule::inv_sqrt;
  throw InputError("unknown schedule '" + std::string(s) + "'");
}

inline SamplerMode parse_sampler_mode(std::string_view s) {
  if (s == "importance") return SamplerMode::importance;
  if (s == "rejection") return SamplerMode::rejection;
  throw InputError("unknown sampler mode '" + std::string(s) + "'");
}

inline LaplacianMode parse_laplacian_mode(std::string_view s) {
  if (s == "unnormalized") return LaplacianMode::unnormalized;
  if (s == "normalized") return LaplacianMode::normalized;
  throw InputError("unknown laplacian '" + std::string(s) + "'");
}

/// Builds an experiment from key/value settings (suite block or CLI flags).
inline ExperimentSpec experiment_from_settings(std::map<std::string, std::string> kv, const std::string& what) {
  ExperimentSpec spec;
  detail::take(kv, "name", spec.name);
  if (!kv.count("graph")) throw InputError(what + ": missing 'graph'");
  detail::take(kv, "graph", spec.graph_text);
  spec.graph = parse_graph_source(spec.graph_text);

  std::string text;
  if (kv.count("laplacian")) {
    detail::take(kv, "laplacian", text);
    spec.laplacian = parse_laplacian_mode(text);
  }
  std::string transform = "identity";
  detail::take(kv, "transform", transform);
  spec.transform.kind = parse_transform_kind(transform);
  spec.transform.degree = 0;
  detail::take(kv, "degree", spec.transform.degree);
  detail::take(kv, "epsilon", spec.transform.epsilon);
  spec.transform.validate();

  SolverConfig& c = spec.solver;
  if (kv.count("solver")) {
    detail::take(kv, "solver", text);
    c.solver = parse_solver_kind(text);
  }
  detail::take(kv, "k", c.k);
  detail::take(kv, "eta", c.eta);
  if (kv.count("schedule")) {
    detail::take(kv, "schedule", text);
    c.schedule = parse_schedule(text);
  }
  detail::take(kv, "steps", c.steps);
  detail::take(kv, "batch_size", c.batch_size);
  detail::take(kv, "seed", c.seed);
  detail::take(kv, "eval_every", c.eval_every);
  int normalize = c.normalize_step ? 1 : 0;
  detail::take(kv, "normalize_step", normalize);
  c.normalize_step = normalize != 0;
  detail::take(kv, "streak_epsilon", c.streak_epsilon);
  if (kv.count("streak_mode")) {
    detail::take(kv, "streak_mode", text);
    if (text == "eigenspace")
      c.streak_mode = StreakMode::eigenspace;
    else if (text == "strict")
      c.streak_mode = StreakMode::strict;
    else
      throw InputError(what + ": unknown streak_mode '" + text + "'");
  }
  if (kv.count("stop")) {
    detail::take(kv, "stop", text);
    c.stop = parse_stop_rule(text);
  }
  detail::take(kv, "target_error", c.target_error);
  int record_time = 0;
  detail::take(kv, "record_time", record_time);
  c.record_time = record_time != 0;
  if (kv.count("walks") || kv.count("walkers") || kv.count("sampler_mode")) {
    SamplerConfig s;
    if (c.batch_size > 0) s.walks_per_estimate = c.batch_size;
    detail::take(kv, "walks", s.walks_per_estimate);
    detail::take(kv, "walkers", s.n_walkers);
    if (kv.count("sampler_mode")) {
      detail::take(kv, "sampler_mode", text);
      s.mode = parse_sampler_mode(text);
    }
    s.validate();
    c.sampler = s;
  }
  detail::reject_leftovers(kv, what);
  if (spec.name.empty()) spec.name = transform + (spec.transform.degree ? "-" + std::to_string(spec.transform.degree) : "");
  return spec;
}

/// Splits a suite into experiments. An empty suite is valid.
inline std::vector<ExperimentSpec> parse_suite(std::istream& in, const std::string& origin = "suite") {
  std::vector<ExperimentSpec> out;
  std::map<std::string, std::string> block;
  std::size_t line_no = 0, block_start = 0;
  auto flush = [&] {
    if (block.empty()) return;
    out.push_back(experiment_from_settings(std::move(block), origin + ": block at line " + std::to_string(block_start)));
    block.clear();
  };
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) {
      flush();
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InputError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    if (block.empty()) block_start = line_no;
    const std::string key = detail::trim(t.substr(0, eq));
    if (block.count(key)) throw InputError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    block[key] = detail::trim(t.substr(eq + 1));
  }
  flush();
  return out;
}

inline std::vector<ExperimentSpec> parse_suite_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open suite file '" + path + "'");
  return parse_suite(in, path);
}

/// Graphs and dense ground truth shared across the runs of a suite.
class GraphCache {
 public:
  const LoadedGraph& graph(const ExperimentSpec& spec) {
    auto it = graphs_.find(spec.graph_text);
    if (it == graphs_.end()) it = graphs_.emplace(spec.graph_text, load_graph(spec.graph)).first;
    return it->second;
  }

  /// nullptr when the graph exceeds the dense oracle limit.
  const GroundTruth* truth(const ExperimentSpec& spec) {
    const std::string key = spec.graph_text + (spec.laplacian == LaplacianMode::normalized ? "#normalized" : "");
    auto it = truths_.find(key);
    if (it == truths_.end()) {
      const LoadedGraph& g = graph(spec);
      std::optional<GroundTruth> gt;
      if (static_cast<Eigen::Index>(g.graph->num_nodes()) <= kDenseOracleMaxDim)
        gt = dense_eig(LaplacianOperator(g.graph, spec.laplacian));
      it = truths_.emplace(key, std::move(gt)).first;
    }
    return it->second ? &*it->second : nullptr;
  }

 private:
  std::map<std::string, LoadedGraph> graphs_;
  std::map<std::string, std::optional<GroundTruth>> truths_;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::size_t n = 0, m = 0;
  std::optional<SolverRun> run;
  std::string error;  // set when the run failed
};

inline ExperimentResult run_experiment(const ExperimentSpec& spec, GraphCache& cache) {
  ExperimentResult out{spec, 0, 0, std::nullopt, {}};
  try {
    const LoadedGraph& g = cache.graph(spec);
    out.n = g.graph->num_nodes();
    out.m = g.graph->num_edges();
    const GroundTruth* truth = cache.truth(spec);
    const TransformedOperator op = TransformedOperator::make(LaplacianOperator(g.graph, spec.laplacian), spec.transform);
    out.run = run_solver(op, spec.solver, truth);
  } catch (const std::exception& e) {
    out.error = spec.name + " on " + describe(spec.graph) + ": " + e.what();
  }
  return out;
}

namespace detail {
inline std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string optional_steps(const std::optional<std::int64_t>& s) { return s ? std::to_string(*s) : std::string(); }

// baseline / run; empty when undefined or infinite.
inline std::string speedup(const std::optional<std::int64_t>& baseline, const std::optional<std::int64_t>& run) {
  if (!baseline) return {};
  if (!run) return "0";
  if (*run == 0) return *baseline == 0 ? "1" : std::string();
  return format_double(static_cast<double>(*baseline) / static_cast<double>(*run));
}
}  // namespace detail

inline constexpr const char* kSummaryHeader =
    "name,graph,n,m,transform,degree,solver,k,eta,steps_run,steps_to_streak,steps_to_error,final_error,final_streak,"
    "speedup_streak,speedup_error,status";

/// One summary row per result. The baseline of a run is the first identity
/// run in the suite with the same graph, Laplacian, solver and k.
inline void write_summary_csv(std::ostream& out, const std::vector<ExperimentResult>& results) {
  out << kSummaryHeader << '\n';
  for (const auto& r : results) {
    const ExperimentSpec& s = r.spec;
    const ExperimentResult* base = nullptr;
    for (const auto& b : results)
      if (b.spec.transform.kind == TransformKind::identity && b.run && b.spec.graph_text == s.graph_text &&
          b.spec.laplacian == s.laplacian && b.spec.solver.solver == s.solver.solver && b.spec.solver.k == s.solver.k) {
        base = &b;
        break;
      }
    out << detail::csv_field(s.name) << ',' << detail::csv_field(s.graph_text) << ',' << r.n << ',' << r.m << ','
        << s.transform.name() << ',' << s.transform.degree << ',' << to_string(s.solver.solver) << ',' << s.solver.k << ','
        << format_double(s.solver.eta) << ',';
    if (r.run) {
      const auto& last = r.run->trajectory.back();
      out << last.step << ',' << detail::optional_steps(r.run->steps_to_streak) << ','
          << detail::optional_steps(r.run->steps_to_error) << ','
          << (std::isnan(last.subspace_error) ? std::string() : format_double(last.subspace_error)) << ','
          << (last.streak >= 0 ? std::to_string(last.streak) : std::string()) << ',';
      if (base) {
        out << detail::speedup(base->run->steps_to_streak, r.run->steps_to_streak) << ','
            << detail::speedup(base->run->steps_to_error, r.run->steps_to_error);
      } else {
        out << ',';
      }
      out << ",ok\n";
    } else {
      out << ",,,,,,," << detail::csv_field("error: " + r.error) << '\n';
    }
  }
}

/// Runs every experiment (failures are recorded and the suite continues).
inline std::vector<ExperimentResult> run_suite(const std::vector<ExperimentSpec>& suite, GraphCache& cache,
                                               const std::function<void(const ExperimentResult&)>& on_done = {}) {
  std::vector<ExperimentResult> out;
  out.reserve(suite.size());
  for (const auto& spec : suite) {
    out.push_back(run_experiment(spec, cache));
    if (on_done) on_done(out.back());
  }
  return out;
}

inline void write_eigenvectors(std::ostream& out, const Matrix& v) {
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) out << (c ? " " : "") << format_double(v(i, c));
    out << '\n';
  }
}

inline void write_labels(std::ostream& out, const std::vector<int>& labels) {
  for (int l : labels) out << l << '\n';
}

inline void write_spectrum_csv(std::ostream& out, const GroundTruth& gt) {
  out << "index,eigenvalue,gap,ratio\n";
  const auto gaps = eigengaps(gt);
  for (Eigen::Index i = 0; i < gt.dim(); ++i) {
    out << i << ',' << format_double(gt.eigenvalues[i]) << ',';
    if (static_cast<std::size_t>(i) < gaps.size()) {
      out << format_double(gaps[i].gap) << ',';
      if (std::isfinite(gaps[i].ratio)) out << format_double(gaps[i].ratio);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

}  // namespace gapdilate
