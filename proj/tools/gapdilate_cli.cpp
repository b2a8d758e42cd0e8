// gapdilate: command-line front end for the benchmark harness.
//
// Exit codes: 0 success, 1 experiment failure, 2 bad input.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "gapdilate/bench.hpp"

namespace {

using namespace gapdilate;

constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  return out;
}

// Writes to `path`, or stdout when path is empty or "-".
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
  } else {
    auto out = open_out(path);
    fn(out);
  }
}

struct SolveFlags {
  std::string graph;
  std::string laplacian = "unnormalized";
  std::string transform = "identity";
  int degree = 0;
  double epsilon = 1e-6;
  std::string solver = "oja";
  std::size_t k = 1;
  double eta = 1.0;
  std::string schedule = "constant";
  std::int64_t steps = 1000;
  std::size_t batch_size = 0;
  std::uint64_t seed = 0;
  std::int64_t eval_every = 1;
  std::string stop = "none";
  double target_error = 1e-3;
  double streak_epsilon = 0.01;
  bool raw_step = false;
  bool time = false;
  std::string out, vectors;

  ExperimentSpec spec() const {
    std::map<std::string, std::string> kv{
        {"graph", graph},
        {"laplacian", laplacian},
        {"transform", transform},
        {"degree", std::to_string(degree)},
        {"epsilon", format_double(epsilon)},
        {"solver", solver},
        {"k", std::to_string(k)},
        {"eta", format_double(eta)},
        {"schedule", schedule},
        {"steps", std::to_string(steps)},
        {"batch_size", std::to_string(batch_size)},
        {"seed", std::to_string(seed)},
        {"eval_every", std::to_string(eval_every)},
        {"stop", stop},
        {"target_error", format_double(target_error)},
        {"streak_epsilon", format_double(streak_epsilon)},
        {"normalize_step", raw_step ? "0" : "1"},
        {"record_time", time ? "1" : "0"},
    };
    return experiment_from_settings(std::move(kv), "solve");
  }
};

int cmd_generate(const std::string& source, const std::string& out, const std::string& labels_path) {
  const LoadedGraph g = load_graph(parse_graph_source(source));
  emit(out, [&](std::ostream& o) { write_edge_list(o, *g.graph); });
  if (!labels_path.empty()) {
    if (g.labels.empty()) throw InputError("graph source '" + source + "' has no cluster labels");
    emit(labels_path, [&](std::ostream& o) { write_labels(o, g.labels); });
  }
  return 0;
}

int cmd_spectrum(const std::string& source, const std::string& laplacian, const std::string& out) {
  const LoadedGraph g = load_graph(parse_graph_source(source));
  const GroundTruth gt = dense_eig(LaplacianOperator(g.graph, parse_laplacian_mode(laplacian)));
  emit(out, [&](std::ostream& o) { write_spectrum_csv(o, gt); });
  return 0;
}

int cmd_solve(const SolveFlags& flags) {
  const ExperimentSpec spec = flags.spec();
  GraphCache cache;
  const ExperimentResult r = run_experiment(spec, cache);
  if (!r.run) {
    std::cerr << "gapdilate: " << r.error << '\n';
    return kExitFailure;
  }
  emit(flags.out, [&](std::ostream& o) { write_trajectory_csv(o, r.run->trajectory); });
  if (!flags.vectors.empty()) emit(flags.vectors, [&](std::ostream& o) { write_eigenvectors(o, r.run->final_state.v); });
  return 0;
}

int cmd_estimate(const std::string& source, int ell, std::size_t walks, unsigned walkers, const std::string& mode,
                 std::uint64_t seed, const std::string& out) {
  const LoadedGraph g = load_graph(parse_graph_source(source));
  SamplerConfig cfg;
  cfg.ell = ell;
  cfg.walks_per_estimate = walks;
  cfg.n_walkers = walkers;
  cfg.mode = parse_sampler_mode(mode);
  cfg.seed = seed;
  cfg.validate();

  SplitMix64 rng(derive_seed(seed, 0x7e57));
  Vector v(static_cast<Eigen::Index>(g.graph->num_nodes()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = standard_normal(rng);
  v.normalize();

  const EdgeIncidenceGraph inc(*g.graph);
  const Vector est = estimate_power_matvec(inc, ell, v, cfg);
  const LaplacianOperator lap(g.graph);
  Vector exact = v;
  for (int i = 0; i < ell; ++i) exact = lap.apply(exact);
  const double denom = exact.norm();
  emit(out, [&](std::ostream& o) {
    o << "ell,walks,mode,abs_error,rel_error,exact_norm\n";
    o << ell << ',' << walks << ',' << mode << ',' << format_double((est - exact).norm()) << ','
      << (denom > 0.0 ? format_double((est - exact).norm() / denom) : std::string()) << ',' << format_double(denom)
      << '\n';
  });
  return 0;
}

int cmd_benchmark(const std::string& suite_path, const std::string& out, bool quiet) {
  const auto suite = parse_suite_file(suite_path);
  GraphCache cache;
  bool failed = false;
  const auto results = run_suite(suite, cache, [&](const ExperimentResult& r) {
    if (!r.run) {
      failed = true;
      std::cerr << "gapdilate: " << r.error << '\n';
    } else if (!quiet) {
      std::cerr << "done " << r.spec.name << " (" << r.run->trajectory.back().step << " steps)\n";
    }
  });
  emit(out, [&](std::ostream& o) { write_summary_csv(o, results); });
  return failed ? kExitFailure : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral clustering benchmarks with eigengap dilation"};
  app.require_subcommand(1);

  std::string graph, out, labels, laplacian = "unnormalized";
  auto* gen = app.add_subcommand("generate", "Write a generated graph as an edge list");
  gen->add_option("--graph", graph, "Graph source, e.g. clique:n=60,k=3,seed=1")->required();
  gen->add_option("-o,--out", out, "Edge list path (default stdout)");
  gen->add_option("--labels", labels, "Cluster label file");

  auto* spec = app.add_subcommand("spectrum", "Dense Laplacian spectrum with eigengaps");
  spec->add_option("--graph", graph, "Graph source")->required();
  spec->add_option("--laplacian", laplacian, "unnormalized or normalized");
  spec->add_option("-o,--out", out, "CSV path (default stdout)");

  SolveFlags sf;
  auto* solve = app.add_subcommand("solve", "Run one solver and write its trajectory");
  solve->add_option("--graph", sf.graph, "Graph source")->required();
  solve->add_option("--laplacian", sf.laplacian, "unnormalized or normalized");
  solve->add_option("--transform", sf.transform,
                    "identity, log, log-taylor, negexp, negexp-taylor or negexp-limit");
  solve->add_option("--degree", sf.degree, "Series degree for the truncated transforms");
  solve->add_option("--epsilon", sf.epsilon, "Shift for the logarithm transforms");
  solve->add_option("--solver", sf.solver, "oja or mu-eg");
  solve->add_option("--k", sf.k, "Number of eigenvectors");
  solve->add_option("--eta", sf.eta, "Step size");
  solve->add_option("--schedule", sf.schedule, "constant or inv-sqrt");
  solve->add_option("--steps", sf.steps, "Maximum number of steps");
  solve->add_option("--batch-size", sf.batch_size, "Edges or walks per estimate (0 = exact operator)");
  solve->add_option("--seed", sf.seed, "Random seed");
  solve->add_option("--eval-every", sf.eval_every, "Evaluation period in steps");
  solve->add_option("--stop", sf.stop, "none, streak, error or both");
  solve->add_option("--target-error", sf.target_error, "Subspace error target");
  solve->add_option("--streak-epsilon", sf.streak_epsilon, "Alignment tolerance for the streak");
  solve->add_flag("--raw-step", sf.raw_step, "Do not divide eta by the spectral bound");
  solve->add_flag("--time", sf.time, "Record wall-clock time per evaluation");
  solve->add_option("-o,--out", sf.out, "Trajectory CSV path (default stdout)");
  solve->add_option("--vectors", sf.vectors, "Final eigenvector estimates (n rows, k columns)");

  int ell = 1;
  std::size_t walks = 10000;
  unsigned walkers = 1;
  std::string mode = "importance";
  std::uint64_t seed = 0;
  auto* est = app.add_subcommand("estimate", "Random-walk estimate of L^ell v against the exact product");
  est->add_option("--graph", graph, "Graph source")->required();
  est->add_option("--ell", ell, "Power");
  est->add_option("--walks", walks, "Number of walks");
  est->add_option("--walkers", walkers, "Worker threads");
  est->add_option("--mode", mode, "importance or rejection");
  est->add_option("--seed", seed, "Random seed");
  est->add_option("-o,--out", out, "CSV path (default stdout)");

  std::string suite;
  bool quiet = false;
  auto* bench = app.add_subcommand("benchmark", "Run a suite file and write a summary CSV");
  bench->add_option("suite", suite, "Suite file")->required();
  bench->add_option("-o,--out", out, "Summary CSV path (default stdout)");
  bench->add_flag("-q,--quiet", quiet, "No progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*gen) return cmd_generate(graph, out, labels);
    if (*spec) return cmd_spectrum(graph, laplacian, out);
    if (*solve) return cmd_solve(sf);
    if (*est) return cmd_estimate(graph, ell, walks, walkers, mode, seed, out);
    if (*bench) return cmd_benchmark(suite, out, quiet);
  } catch (const InputError& e) {
    std::cerr << "gapdilate: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "gapdilate: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
