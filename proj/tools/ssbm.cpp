// ssbm generate|fit|eval|bench
//
// Exit codes: 0 ok, 1 validation error, 2 I/O error, 3 degenerate or
// non-convergent fit (the result file is still written).

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ssbm/harness.hpp"

namespace {

using namespace ssbm;
using namespace ssbm::harness;

// --seed, else SSBM_SEED, else nothing.
std::optional<std::uint64_t> resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("SSBM_SEED")) {
    try {
      return harness::detail::to_uint("SSBM_SEED", env);
    } catch (const Error&) {
      throw Error(ErrorCode::kInvalidConfig, std::string("SSBM_SEED is not an integer: ") + env);
    }
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signed stochastic block model: generate, fit, evaluate, benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k_min;
  std::optional<std::size_t> k_max;
  std::optional<double> epsilon;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> workers;
  std::string graph_path;
  std::string result_path;
  std::string truth_path;
  bool directed = false;
  bool sample = false;

  auto* gen = app.add_subcommand("generate", "Generate a synthetic signed network");
  gen->add_option("--config", config_path, "Generator INI config")->required();
  gen->add_option("--out", out_path, "Output directory")->required();
  gen->add_option("--seed", seed, "Override the config seed");

  auto* fitc = app.add_subcommand("fit", "Fit the block model to an edge list");
  fitc->add_option("graph", graph_path, "Edge-list file")->required();
  fitc->add_option("--out", out_path, "Result JSON path")->required();
  fitc->add_option("--config", config_path, "INI file with a [fit] section");
  fitc->add_option("--seed", seed, "Learner seed");
  fitc->add_option("--k-min", k_min, "Smallest block count");
  fitc->add_option("--k-max", k_max, "Largest block count (default floor(sqrt(n)))");
  fitc->add_option("--epsilon", epsilon, "Convergence threshold on cost decrease");
  fitc->add_option("--restarts", restarts, "Random restarts");
  fitc->add_option("--workers", workers, "Threads for restarts");
  fitc->add_flag("--directed", directed, "Keep edge direction");
  fitc->add_flag("--sample-assignment", sample, "Draw the partition from the posterior");

  auto* evalc = app.add_subcommand("eval", "Score a fit result against a truth partition");
  evalc->add_option("result", result_path, "Fit result JSON")->required();
  evalc->add_option("truth", truth_path, "`node block` file")->required();
  evalc->add_option("--out", out_path, "Metrics JSON path (stdout when omitted)");

  auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
  bench->add_option("--config", config_path, "Suite INI config")->required();
  bench->add_option("--out", out_path, "Output directory")->required();
  bench->add_option("--k-min", k_min, "Smallest block count");
  bench->add_option("--k-max", k_max, "Largest block count");
  bench->add_option("--epsilon", epsilon, "Convergence threshold");
  bench->add_option("--restarts", restarts, "Random restarts");
  bench->add_option("--workers", workers, "Grid points run concurrently");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const json m = cmd_generate(config_path, out_path, {resolve_seed(seed)});
      std::cout << "wrote " << out_path << " (n=" << m["n"] << ", edges=" << m["edges"]
                << ", k_true=" << m["k_true"] << ")\n";
      return kExitOk;
    }
    if (*fitc) {
      FitConfig cfg;
      if (!config_path.empty()) {
        const ptree pt = load_ini(config_path);
        if (auto it = pt.find("fit"); it != pt.not_found()) apply_fit_section(cfg, it->second);
      }
      if (auto s = resolve_seed(seed)) cfg.seed = *s;
      if (k_min) cfg.k_min = *k_min;
      if (k_max) cfg.k_max = *k_max;
      if (epsilon) cfg.epsilon = *epsilon;
      if (restarts) cfg.restarts = *restarts;
      if (workers) cfg.workers = *workers;
      if (sample) cfg.sample_assignment = true;
      const FitOutcome outcome = cmd_fit(graph_path, cfg, out_path, directed);
      const json& r = outcome.record["result"];
      std::cout << "k_found=" << r["k_found"] << " cost=" << r["best_cost"] << '\n';
      if (outcome.exit_code != kExitOk) {
        std::cerr << "warning: fit was " << (r["degenerate"].get<bool>() ? "degenerate" : "not converged")
                  << "; result written with flags\n";
      }
      return outcome.exit_code;
    }
    if (*evalc) {
      const json m = cmd_eval(result_path, truth_path);
      if (out_path.empty()) {
        std::cout << m.dump(2) << '\n';
      } else {
        write_file(out_path, m.dump(2) + "\n");
      }
      return kExitOk;
    }
    if (*bench) {
      BenchOptions opts{workers, restarts, k_min, k_max, epsilon};
      const json s = cmd_bench(config_path, out_path, opts);
      for (const auto& [name, sweep] : s["sweeps"].items()) {
        std::cout << name << ":";
        for (const auto& p : sweep["points"]) {
          std::cout << ' ' << p["param_value"] << "->" << p["median_nmi"];
        }
        std::cout << '\n';
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
