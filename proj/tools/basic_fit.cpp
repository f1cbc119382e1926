// Generate a noisy four-block signed network, fit it, and score the result.

#include <cstdio>

#include "ssbm/evaluation.hpp"
#include "ssbm/synth.hpp"

int main() {
  ssbm::SgConfig sg;
  sg.p_in = 0.8;
  sg.p_minus = 0.2;
  sg.p_plus = 0.2;
  sg.seed = 7;
  const auto planted = ssbm::generate_sg(sg);

  ssbm::FitConfig cfg;
  cfg.seed = 42;
  const auto result = ssbm::fit(planted.graph, cfg);
  const auto rep = ssbm::k_recovery(result, planted.truth);

  std::printf("n=%zu edges=%zu\n", planted.graph.n(), planted.graph.edge_count());
  std::printf("k_true=%zu k_found=%zu nmi=%.4f cost=%.3f\n", rep.k_true, rep.k_found, rep.nmi,
              result.best_cost);
  for (const auto& [k, c] : result.per_k_best) std::printf("  K=%zu best cost %.3f\n", k, c);
  return 0;
}
