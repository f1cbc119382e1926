#pragma once

// Signed stochastic block model with block-to-node tri-category
// connection probabilities, fitted by component-wise EM under a
// minimum-message-length cost.
//
// A node i in block k draws the category of a_ij (positive, negative, null)
// from lambda[k][j]. Blocks whose responsibility mass drops to c/2 or below
// are annihilated during learning; c is kept at 2 * k_ne. After each inner
// convergence the weakest block is removed so one run walks the block count
// down from k_max to k_min, and the lowest cost seen wins.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "ssbm/error.hpp"
#include "ssbm/rng.hpp"
#include "ssbm/signed_graph.hpp"

namespace ssbm {

inline constexpr std::size_t kCategories = 3;

// log(kappa_d) with kappa_d = 1 / (2 pi e).
inline const double kLogKappa = -std::log(2.0 * std::numbers::pi * std::numbers::e);

struct ModelParams {
  std::size_t n = 0;
  std::size_t k_max = 0;
  std::size_t k_ne = 0;
  std::vector<double> phi;
  // k_max x n x 3, row-major.
  std::vector<double> lambda;
  double c = 0.0;

  ModelParams() = default;
  ModelParams(std::size_t nodes, std::size_t blocks)
      : n(nodes), k_max(blocks), k_ne(blocks),
        phi(blocks, 1.0 / static_cast<double>(blocks)),
        lambda(blocks * nodes * kCategories, 1.0 / 3.0),
        c(2.0 * static_cast<double>(blocks)) {}

  bool live(std::size_t k) const { return phi[k] > 0.0; }

  double& lam(std::size_t k, std::size_t j, std::size_t h) {
    return lambda[(k * n + j) * kCategories + h];
  }
  double lam(std::size_t k, std::size_t j, std::size_t h) const {
    return lambda[(k * n + j) * kCategories + h];
  }

  std::span<double> block_row(std::size_t k) {
    return {lambda.data() + k * n * kCategories, n * kCategories};
  }
  std::span<const double> block_row(std::size_t k) const {
    return {lambda.data() + k * n * kCategories, n * kCategories};
  }

  std::size_t count_live() const {
    return static_cast<std::size_t>(
        std::count_if(phi.begin(), phi.end(), [](double p) { return p > 0.0; }));
  }
};

// n x k_max posterior block memberships, row-major.
struct Responsibilities {
  std::size_t n = 0;
  std::size_t k_max = 0;
  std::vector<double> zeta;

  Responsibilities() = default;
  Responsibilities(std::size_t nodes, std::size_t blocks)
      : n(nodes), k_max(blocks), zeta(nodes * blocks, 0.0) {}

  double& operator()(std::size_t i, std::size_t k) { return zeta[i * k_max + k]; }
  double operator()(std::size_t i, std::size_t k) const { return zeta[i * k_max + k]; }

  std::span<double> row(std::size_t i) { return {zeta.data() + i * k_max, k_max}; }
  std::span<const double> row(std::size_t i) const { return {zeta.data() + i * k_max, k_max}; }

  double column_mass(std::size_t k) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (*this)(i, k);
    return s;
  }
};

enum class InitMethod {
  // Every lambda triple drawn from a flat Dirichlet.
  kFlatDirichlet,
  // Each block starts near the global column frequencies, nudged toward
  // the adjacency row of a distinct randomly chosen node.
  kSeedNodes,
};

struct FitConfig {
  std::size_t k_min = 1;
  // Defaults to default_k_max(n).
  std::optional<std::size_t> k_max;
  double epsilon = 1e-4;
  std::size_t restarts = 5;
  std::uint64_t seed = 1;
  double lambda_floor = 1e-10;
  std::size_t max_sweeps = 500;
  // Draw the hard partition from the posterior rows instead of argmax.
  bool sample_assignment = false;
  // Restarts run on up to this many threads.
  std::size_t workers = 1;
  InitMethod init = InitMethod::kSeedNodes;
  // Weight on the column frequencies in kSeedNodes.
  double seed_blend = 0.98;

  void validate() const {
    if (k_min < 1) throw Error(ErrorCode::kInvalidConfig, "k_min must be >= 1");
    if (k_max && *k_max < k_min) throw Error(ErrorCode::kInvalidConfig, "k_max must be >= k_min");
    if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidConfig, "epsilon must be > 0");
    if (restarts < 1) throw Error(ErrorCode::kInvalidConfig, "restarts must be >= 1");
    if (!(lambda_floor > 0.0 && lambda_floor < 1.0 / 3.0)) {
      throw Error(ErrorCode::kInvalidConfig, "lambda_floor must lie in (0, 1/3)");
    }
    if (max_sweeps < 1) throw Error(ErrorCode::kInvalidConfig, "max_sweeps must be >= 1");
    if (!(seed_blend >= 0.0 && seed_blend < 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "seed_blend must lie in [0, 1)");
    }
  }
};

struct CostTracePoint {
  std::size_t restart = 0;
  std::size_t sweep = 0;
  std::size_t k_ne = 0;
  double cost = 0.0;
  // Last sweep of an inner loop (converged or capped).
  bool regime_end = false;
};

struct FitResult {
  ModelParams best_params;
  Responsibilities best_zeta;
  Partition best_partition;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<CostTracePoint> cost_trace;
  std::map<std::size_t, double> per_k_best;
  std::uint64_t seed_used = 0;
  std::size_t best_restart = 0;
  std::size_t total_sweeps = 0;
  double wall_time_ms = 0.0;
  bool converged = true;
  bool degenerate = false;
};

inline std::size_t default_k_max(std::size_t n) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return std::max<std::size_t>(r, 1);
}

// log u_ik = sum over j != i of log lambda[k][j][cat(a_ij)].
inline double log_evidence_per_node(const SignedGraph& g, const ModelParams& params,
                                    std::size_t i, std::size_t k) {
  double total = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    if (j == i) continue;
    total += std::log(params.lam(k, j, category_index(g.at(i, j))));
  }
  return total;
}

namespace detail {

// Normalizes exp(log_w) over entries with live[k] in place; dead entries
// become 0. Returns log of the normalizer.
inline double normalize_log_weights(std::span<double> log_w, std::span<const double> phi) {
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    if (phi[k] > 0.0) peak = std::max(peak, log_w[k]);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    if (phi[k] > 0.0) {
      log_w[k] = std::exp(log_w[k] - peak);
      total += log_w[k];
    } else {
      log_w[k] = 0.0;
    }
  }
  for (double& w : log_w) w /= total;
  return peak + std::log(total);
}

inline void floor_triple(std::span<double> t, double floor) {
  double s = 0.0;
  for (double& x : t) {
    x = std::max(x, floor);
    s += x;
  }
  for (double& x : t) x /= s;
}

}  // namespace detail

// Posterior block membership of node i over live blocks.
inline std::vector<double> e_step_row(const SignedGraph& g, const ModelParams& params,
                                      std::size_t i) {
  std::vector<double> w(params.k_max, 0.0);
  for (std::size_t k = 0; k < params.k_max; ++k) {
    if (params.live(k)) w[k] = std::log(params.phi[k]) + log_evidence_per_node(g, params, i, k);
  }
  detail::normalize_log_weights(w, params.phi);
  return w;
}

inline Responsibilities e_step(const SignedGraph& g, const ModelParams& params) {
  Responsibilities z(g.n(), params.k_max);
  for (std::size_t i = 0; i < g.n(); ++i) {
    auto row = e_step_row(g, params, i);
    std::copy(row.begin(), row.end(), z.row(i).begin());
  }
  return z;
}

struct PhiUpdate {
  std::vector<double> phi;
  std::vector<std::size_t> annihilated;
};

// phi_k proportional to max(0, sum_i zeta_ik - c/2). Blocks that clamp to 0
// are annihilated; their zeta columns are zeroed and rows renormalized over
// the survivors. Columns with no mass at all count as already dead.
inline PhiUpdate m_step_phi(Responsibilities& zeta, double c) {
  PhiUpdate out;
  out.phi.assign(zeta.k_max, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < zeta.k_max; ++k) {
    const double mass = zeta.column_mass(k);
    out.phi[k] = std::max(0.0, mass - c / 2.0);
    total += out.phi[k];
    if (out.phi[k] == 0.0 && mass > 0.0) out.annihilated.push_back(k);
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kDegenerateModel, "every block fell below the annihilation threshold");
  }
  for (double& p : out.phi) p /= total;
  if (!out.annihilated.empty()) {
    for (std::size_t i = 0; i < zeta.n; ++i) {
      auto row = zeta.row(i);
      double s = 0.0;
      for (std::size_t k = 0; k < zeta.k_max; ++k) {
        if (out.phi[k] == 0.0) row[k] = 0.0;
        s += row[k];
      }
      if (s > 0.0) {
        for (double& x : row) x /= s;
      } else {
        const double share = 1.0 / static_cast<double>(zeta.k_max - out.annihilated.size());
        for (std::size_t k = 0; k < zeta.k_max; ++k) row[k] = out.phi[k] > 0.0 ? share : 0.0;
      }
    }
  }
  return out;
}

// Responsibility-weighted category fractions of column j over rows i != j,
// floored at `floor` and renormalized. Returns n x 3 row-major.
inline std::vector<double> m_step_lambda(const SignedGraph& g, const Responsibilities& zeta,
                                         std::size_t k, double floor) {
  const std::size_t n = g.n();
  const double mass = zeta.column_mass(k);
  if (!(mass > 0.0)) {
    throw Error(ErrorCode::kZeroMass, "block " + std::to_string(k) + " has no responsibility mass");
  }
  std::vector<double> out(n * kCategories, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double pos = 0.0;
    double neg = 0.0;
    for (const auto& nb : g.column(j)) {
      const double w = zeta(nb.node, k);
      if (nb.sign > 0) pos += w;
      else neg += w;
    }
    const double denom = mass - zeta(j, k);
    std::span<double> t(out.data() + j * kCategories, kCategories);
    if (denom > 0.0) {
      t[0] = pos / denom;
      t[1] = neg / denom;
      t[2] = std::max(0.0, denom - pos - neg) / denom;
    } else {
      t[0] = t[1] = t[2] = 1.0 / 3.0;
    }
    detail::floor_triple(t, floor);
  }
  return out;
}

struct CostTerms {
  double neg_log_likelihood = 0.0;
  double penalty = 0.0;
  double total() const { return neg_log_likelihood + penalty; }
};

// K_ne (c+1)/2 log n + c/2 sum log phi_k + K_ne (c+1)/2 (1 + log kappa_d).
inline double cost_penalty(std::size_t n, std::span<const double> phi, double c) {
  double k_ne = 0.0;
  double sum_log_phi = 0.0;
  for (double p : phi) {
    if (p > 0.0) {
      k_ne += 1.0;
      sum_log_phi += std::log(p);
    }
  }
  const double per = k_ne * (c + 1.0) / 2.0;
  return per * std::log(static_cast<double>(n)) + (c / 2.0) * sum_log_phi +
         per * (1.0 + kLogKappa);
}

inline CostTerms cost_terms(const SignedGraph& g, const ModelParams& params) {
  CostTerms out;
  std::vector<double> w(params.k_max);
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t k = 0; k < params.k_max; ++k) {
      w[k] = params.live(k) ? std::log(params.phi[k]) + log_evidence_per_node(g, params, i, k)
                            : 0.0;
    }
    out.neg_log_likelihood -= detail::normalize_log_weights(w, params.phi);
  }
  out.penalty = cost_penalty(g.n(), params.phi, params.c);
  return out;
}

// Message length of the graph under `params`.
inline double cost(const SignedGraph& g, const ModelParams& params) {
  return cost_terms(g, params).total();
}

// Uniform phi over k_max blocks, every lambda triple drawn from a flat
// Dirichlet in (k, j) order, then floored.
inline ModelParams random_init(std::size_t n, std::size_t k_max, SplitMix64& rng, double floor) {
  ModelParams p(n, k_max);
  for (std::size_t k = 0; k < k_max; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      std::span<double> t(p.lambda.data() + (k * n + j) * kCategories, kCategories);
      rng.flat_dirichlet(t);
      detail::floor_triple(t, floor);
    }
  }
  return p;
}

// Block k gets blend * (column frequencies of the graph) plus
// (1 - blend) * one-hot of a_sj for a seed node s. Seeds are a partial
// Fisher-Yates draw over the nodes, so k_max must not exceed n.
inline ModelParams seed_node_init(const SignedGraph& g, std::size_t k_max, SplitMix64& rng,
                                  double floor, double blend) {
  const std::size_t n = g.n();
  if (k_max > n) throw Error(ErrorCode::kInvalidConfig, "k_max exceeds the node count");
  ModelParams p(n, k_max);
  std::vector<double> freq(n * kCategories, 0.0);
  const double others = static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    double pos = 0.0;
    double neg = 0.0;
    for (const auto& nb : g.column(j)) (nb.sign > 0 ? pos : neg) += 1.0;
    freq[j * kCategories] = pos / others;
    freq[j * kCategories + 1] = neg / others;
    freq[j * kCategories + 2] = (others - pos - neg) / others;
  }
  std::vector<std::size_t> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = i;
  for (std::size_t k = 0; k < k_max; ++k) {
    std::swap(nodes[k], nodes[k + rng.below(n - k)]);
    const std::size_t s = nodes[k];
    for (std::size_t j = 0; j < n; ++j) {
      std::span<double> t(p.lambda.data() + (k * n + j) * kCategories, kCategories);
      for (std::size_t h = 0; h < kCategories; ++h) t[h] = blend * freq[j * kCategories + h];
      if (j != s) {
        t[category_index(g.at(s, j))] += 1.0 - blend;
      } else {
        for (std::size_t h = 0; h < kCategories; ++h) t[h] += (1.0 - blend) * freq[j * kCategories + h];
      }
      detail::floor_triple(t, floor);
    }
  }
  return p;
}

// Hard partition from posterior rows: argmax with ties to the lowest index.
inline Partition argmax_partition(const Responsibilities& zeta) {
  std::vector<std::size_t> raw(zeta.n);
  for (std::size_t i = 0; i < zeta.n; ++i) {
    auto row = zeta.row(i);
    raw[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return Partition::compacted(raw);
}

inline Partition sample_partition(const Responsibilities& zeta, SplitMix64& rng) {
  std::vector<std::size_t> raw(zeta.n);
  for (std::size_t i = 0; i < zeta.n; ++i) raw[i] = rng.categorical(zeta.row(i));
  return Partition::compacted(raw);
}

// One component-wise EM run from a given initialization. `order` is the
// block visiting order within a sweep (identity when empty).
class CemRun {
 public:
  CemRun(const SignedGraph& g, ModelParams init, const FitConfig& cfg, std::size_t restart,
         std::vector<std::size_t> order = {})
      : g_(g), cfg_(cfg), restart_(restart), p_(std::move(init)),
        zeta_(g.n(), p_.k_max), log_lambda_(p_.lambda.size()),
        log_u_(g.n() * p_.k_max, 0.0), order_(std::move(order)) {
    if (order_.empty()) {
      order_.resize(p_.k_max);
      for (std::size_t k = 0; k < p_.k_max; ++k) order_[k] = k;
    }
    p_.k_ne = p_.count_live();
    p_.c = 2.0 * static_cast<double>(p_.k_ne);
    for (std::size_t k = 0; k < p_.k_max; ++k) {
      if (p_.live(k)) refresh_block(k);
    }
  }

  // Runs the outer loop and merges into `out` (which may hold other
  // restarts). Only the fields for this restart are appended.
  void run(FitResult& out) {
    std::size_t sweep = 0;
    while (p_.k_ne >= cfg_.k_min) {
      double prev = std::numeric_limits<double>::infinity();
      std::size_t regime_sweeps = 0;
      double current = prev;
      for (;;) {
        const std::size_t k_before = p_.k_ne;
        if (!this->sweep()) {
          out.degenerate = true;
          return;
        }
        ++sweep;
        ++regime_sweeps;
        ++out.total_sweeps;
        current = full_cost();
        out.cost_trace.push_back({restart_, sweep, p_.k_ne, current, false});
        if (p_.k_ne != k_before) {
          // Block count changed mid-sweep: a new regime starts here.
          prev = current;
          regime_sweeps = 1;
          continue;
        }
        if (prev - current < cfg_.epsilon) break;
        if (regime_sweeps >= cfg_.max_sweeps) {
          out.converged = false;
          break;
        }
        prev = current;
      }
      out.cost_trace.back().regime_end = true;
      if (p_.k_ne < cfg_.k_min) break;
      record(out, current);
      if (p_.k_ne <= cfg_.k_min) break;
      annihilate_weakest();
    }
  }

  const ModelParams& params() const { return p_; }

 private:
  // One pass over live blocks. Returns false on total annihilation.
  bool sweep() {
    for (std::size_t k : order_) {
      if (!p_.live(k)) continue;
      full_e_step();
      const double half_c = p_.c / 2.0;
      double denom = 0.0;
      double own = 0.0;
      for (std::size_t l = 0; l < p_.k_max; ++l) {
        if (!p_.live(l)) continue;
        const double clamp = std::max(0.0, zeta_.column_mass(l) - half_c);
        denom += clamp;
        if (l == k) own = clamp;
      }
      if (!(denom > 0.0)) {
        if (p_.k_ne <= 1) return false;
        // Nothing clears the threshold; drop the weakest and carry on.
        annihilate_weakest();
        continue;
      }
      p_.phi[k] = own / denom;
      renormalize_phi();
      if (p_.live(k)) {
        auto row = m_step_lambda(g_, zeta_, k, cfg_.lambda_floor);
        std::copy(row.begin(), row.end(), p_.block_row(k).begin());
        refresh_block(k);
      } else {
        kill(k);
      }
    }
    return true;
  }

  void renormalize_phi() {
    double s = 0.0;
    for (double x : p_.phi) s += x;
    for (double& x : p_.phi) x /= s;
  }

  void kill(std::size_t k) {
    p_.phi[k] = 0.0;
    p_.k_ne = p_.count_live();
    p_.c = 2.0 * static_cast<double>(p_.k_ne);
    for (std::size_t i = 0; i < g_.n(); ++i) zeta_(i, k) = 0.0;
    renormalize_phi();
  }

  void annihilate_weakest() {
    std::size_t weakest = p_.k_max;
    for (std::size_t k = 0; k < p_.k_max; ++k) {
      if (p_.live(k) && (weakest == p_.k_max || p_.phi[k] < p_.phi[weakest])) weakest = k;
    }
    kill(weakest);
  }

  // Caches log lambda and log u for block k.
  void refresh_block(std::size_t k) {
    const std::size_t n = g_.n();
    double null_total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t h = 0; h < kCategories; ++h) {
        const std::size_t at = (k * n + j) * kCategories + h;
        log_lambda_[at] = std::log(p_.lambda[at]);
      }
      null_total += log_lambda_[(k * n + j) * kCategories + 2];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = null_total - log_lambda_[(k * n + i) * kCategories + 2];
      for (const auto& nb : g_.row(i)) {
        const double* t = &log_lambda_[(k * n + nb.node) * kCategories];
        s += t[category_index(nb.sign)] - t[2];
      }
      log_u_[i * p_.k_max + k] = s;
    }
  }

  // Returns -sum_i log sum_k phi_k u_ik and leaves zeta normalized.
  double full_e_step() {
    double nll = 0.0;
    std::vector<double> log_phi(p_.k_max);
    for (std::size_t k = 0; k < p_.k_max; ++k) {
      log_phi[k] = p_.live(k) ? std::log(p_.phi[k]) : 0.0;
    }
    for (std::size_t i = 0; i < g_.n(); ++i) {
      auto row = zeta_.row(i);
      for (std::size_t k = 0; k < p_.k_max; ++k) row[k] = log_phi[k] + log_u_[i * p_.k_max + k];
      nll -= detail::normalize_log_weights(row, p_.phi);
    }
    return nll;
  }

  double full_cost() { return full_e_step() + cost_penalty(g_.n(), p_.phi, p_.c); }

  void record(FitResult& out, double current) {
    auto [it, inserted] = out.per_k_best.try_emplace(p_.k_ne, current);
    if (!inserted) it->second = std::min(it->second, current);
    if (current < out.best_cost) {
      out.best_cost = current;
      out.best_params = p_;
      full_e_step();
      out.best_zeta = zeta_;
      out.best_restart = restart_;
    }
  }

  const SignedGraph& g_;
  const FitConfig& cfg_;
  std::size_t restart_;
  ModelParams p_;
  Responsibilities zeta_;
  std::vector<double> log_lambda_;
  std::vector<double> log_u_;
  std::vector<std::size_t> order_;
};

namespace detail {

inline void finish_result(FitResult& out, const FitConfig& cfg) {
  if (out.best_params.k_max == 0) {
    throw Error(ErrorCode::kDegenerateModel, "no converged model with k_ne >= k_min");
  }
  if (cfg.sample_assignment) {
    SplitMix64 rng(derive_seed(cfg.seed, 0xA5516ULL));
    out.best_partition = sample_partition(out.best_zeta, rng);
  } else {
    out.best_partition = argmax_partition(out.best_zeta);
  }
}

}  // namespace detail

// Single run from explicit initial parameters (used for controlled
// experiments; fit() is the normal entry point).
inline FitResult fit_from(const SignedGraph& g, const ModelParams& init, const FitConfig& cfg,
                          std::vector<std::size_t> order = {}) {
  cfg.validate();
  if (g.n() < 2) throw Error(ErrorCode::kInvalidConfig, "graph needs at least 2 nodes");
  const auto start = std::chrono::steady_clock::now();
  FitResult out;
  out.seed_used = cfg.seed;
  CemRun(g, init, cfg, 0, std::move(order)).run(out);
  detail::finish_result(out, cfg);
  out.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// Best of cfg.restarts component-wise EM runs, each sweeping the block
// count from k_max down to k_min. Restart r is seeded with
// derive_seed(cfg.seed, r); ties in cost go to the lower restart.
inline FitResult fit(const SignedGraph& g, const FitConfig& cfg) {
  cfg.validate();
  if (g.n() < 2) throw Error(ErrorCode::kInvalidConfig, "graph needs at least 2 nodes");
  const std::size_t k_max = cfg.k_max.value_or(std::max(default_k_max(g.n()), cfg.k_min));
  const auto start = std::chrono::steady_clock::now();

  std::vector<FitResult> runs(cfg.restarts);
  auto one = [&](std::size_t r) {
    SplitMix64 rng(derive_seed(cfg.seed, r));
    ModelParams init;
    switch (cfg.init) {
      case InitMethod::kFlatDirichlet: init = random_init(g.n(), k_max, rng, cfg.lambda_floor); break;
      case InitMethod::kSeedNodes:
        init = seed_node_init(g, k_max, rng, cfg.lambda_floor, cfg.seed_blend);
        break;
    }
    runs[r].seed_used = cfg.seed;
    CemRun(g, std::move(init), cfg, r).run(runs[r]);
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, cfg.restarts));
  if (workers == 1) {
    for (std::size_t r = 0; r < cfg.restarts; ++r) one(r);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < cfg.restarts; r = next++) one(r);
      });
    }
    for (auto& t : pool) t.join();
  }

  FitResult out;
  out.seed_used = cfg.seed;
  for (auto& run : runs) {
    out.cost_trace.insert(out.cost_trace.end(), run.cost_trace.begin(), run.cost_trace.end());
    for (const auto& [k, c] : run.per_k_best) {
      auto [it, inserted] = out.per_k_best.try_emplace(k, c);
      if (!inserted) it->second = std::min(it->second, c);
    }
    out.total_sweeps += run.total_sweeps;
    out.converged = out.converged && run.converged;
    out.degenerate = out.degenerate || run.degenerate;
    if (run.best_cost < out.best_cost) {
      out.best_cost = run.best_cost;
      out.best_params = std::move(run.best_params);
      out.best_zeta = std::move(run.best_zeta);
      out.best_restart = run.best_restart;
    }
  }
  detail::finish_result(out, cfg);
  out.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace ssbm
