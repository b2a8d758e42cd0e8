// Bottom-3 eigenvectors of a 3-cluster clique graph, with and without the
// negexp-limit transform.

#include <iostream>

#include "gapdilate/generators.hpp"
#include "gapdilate/metrics.hpp"
#include "gapdilate/solvers.hpp"

int main() {
  using namespace gapdilate;
  const LabeledGraph lg = gen_clique_clusters({.n = 60, .k = 3, .seed = 1});
  const GroundTruth truth = dense_eig(build_laplacian(lg.graph));

  SolverConfig cfg;
  cfg.k = 3;
  cfg.steps = 50000;
  cfg.stop = StopRule::streak;

  for (const auto& t : {SpectralTransform::identity(), SpectralTransform::negexp_limit(51)}) {
    const SolverRun run = run_solver(lg.graph, t, cfg, &truth);
    const auto labels = kmeans_cluster(run.final_state.v, 3, 1);
    std::cout << t.name() << ": ";
    if (run.steps_to_streak)
      std::cout << "streak 3 after " << *run.steps_to_streak << " steps";
    else
      std::cout << "no streak within " << cfg.steps << " steps";
    std::cout << ", clustering accuracy " << cluster_accuracy(labels, lg.labels) << '\n';
  }
}
