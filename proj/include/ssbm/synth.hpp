#pragma once

// Planted-partition signed network generators.
//
// generate_sg(c, m, k, p_in, p_minus, p_plus) places floor(c*m*k/2) distinct
// undirected edges among c blocks of m nodes (node v lies in block v / m).
// When only one kind of pair can be drawn (p_in of exactly 0 or 1) the count
// is capped at that kind's number of pairs.
// Each edge slot draws, in this order from one SplitMix64 stream:
//   u = uniform(); within = u < p_in
// and then pairs of that kind until one is new:
//   within:  b = below(c); i = b*m + below(m); j = b*m + below(m)
//   between: b1 = below(c); b2 = below(c-1) (+1 if >= b1);
//            i = b1*m + below(m); j = b2*m + below(m)
// Self pairs and already-placed pairs are rejected; every pair draw counts
// against a budget of 100 per target edge. The accepted within pair is
// negative iff bernoulli(p_minus); an accepted between pair is positive iff
// bernoulli(p_plus). When only one kind of pair exists (c == 1 or m == 1)
// every slot uses that kind and `u` is still consumed. The number of
// within-block edges is therefore Binomial(target, p_in).
//
// generate_block_pair visits every unordered pair i < j in row-major order
// and draws its category once from pi[block(i)][block(j)].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ssbm/error.hpp"
#include "ssbm/rng.hpp"
#include "ssbm/signed_graph.hpp"

namespace ssbm {

struct SgConfig {
  std::size_t c = 4;
  std::size_t m = 32;
  double k = 32.0;
  double p_in = 0.8;
  double p_minus = 0.0;
  double p_plus = 0.0;
  std::uint64_t seed = 1;

  std::size_t n() const { return c * m; }
  std::size_t nominal_edges() const {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n()) * k / 2.0));
  }

  std::size_t within_capacity() const { return c * (m * (m - 1) / 2); }
  std::size_t between_capacity() const { return (c * (c - 1) / 2) * m * m; }

  // floor(n k / 2), capped by the number of pairs of the kinds that can be
  // drawn at all (p_in = 1 with k >= m - 1 gives complete blocks).
  std::size_t target_edges() const {
    const bool within = m >= 2 && (c == 1 || p_in > 0.0);
    const bool between = c >= 2 && (m == 1 || p_in < 1.0);
    std::size_t cap = 0;
    if (within) cap += within_capacity();
    if (between) cap += between_capacity();
    return std::min(nominal_edges(), cap);
  }

  void validate() const {
    auto prob = [](double p, const char* name) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::kInvalidConfig,
                    std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
      }
    };
    if (c < 1) throw Error(ErrorCode::kInvalidConfig, "c must be >= 1");
    if (m < 1) throw Error(ErrorCode::kInvalidConfig, "m must be >= 1");
    if (!(k >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "k must be >= 0");
    if (!(k < static_cast<double>(n()))) {
      throw Error(ErrorCode::kInvalidConfig, "k must be < c*m");
    }
    prob(p_in, "p_in");
    prob(p_minus, "p_minus");
    prob(p_plus, "p_plus");
  }
};

// (prob_pos, prob_neg, prob_null) for one block pair.
using CategoryTriple = std::array<double, 3>;

struct BlockPairConfig {
  std::vector<std::size_t> block_sizes;
  std::vector<std::vector<CategoryTriple>> pi;
  std::uint64_t seed = 1;

  std::size_t n() const {
    std::size_t total = 0;
    for (auto s : block_sizes) total += s;
    return total;
  }

  void validate() const {
    const std::size_t b = block_sizes.size();
    if (b == 0) throw Error(ErrorCode::kInvalidConfig, "block_sizes is empty");
    for (auto s : block_sizes) {
      if (s == 0) throw Error(ErrorCode::kInvalidConfig, "block sizes must be >= 1");
    }
    if (pi.size() != b) throw Error(ErrorCode::kInvalidConfig, "pi must be B x B");
    for (std::size_t p = 0; p < b; ++p) {
      if (pi[p].size() != b) throw Error(ErrorCode::kInvalidConfig, "pi must be B x B");
      for (std::size_t q = 0; q < b; ++q) {
        const auto& t = pi[p][q];
        const std::string where = "pi_" + std::to_string(p + 1) + "_" + std::to_string(q + 1);
        for (double x : t) {
          if (!(x >= 0.0 && x <= 1.0)) {
            throw Error(ErrorCode::kInvalidConfig, where + " has an entry outside [0, 1]");
          }
        }
        if (std::abs(t[0] + t[1] + t[2] - 1.0) > 1e-12) {
          throw Error(ErrorCode::kInvalidConfig, where + " does not sum to 1");
        }
        if (pi[q][p] != t) throw Error(ErrorCode::kInvalidConfig, where + " is not symmetric");
      }
    }
  }
};

// Two communities (blocks 1, 2) and two mutually connected sparse blocks
// (3, 4) of 32 nodes. The published table lists the (3,4) entry twice and
// never gives (2,4); the first repeated line is read as (2,4).
inline BlockPairConfig network_vi_config(std::uint64_t seed = 1, std::size_t block_size = 32) {
  BlockPairConfig cfg;
  cfg.seed = seed;
  cfg.block_sizes.assign(4, block_size);
  cfg.pi.assign(4, std::vector<CategoryTriple>(4));
  auto set = [&](std::size_t p, std::size_t q, CategoryTriple t) {
    cfg.pi[p - 1][q - 1] = t;
    cfg.pi[q - 1][p - 1] = t;
  };
  set(1, 1, {0.6, 0.1, 0.3});
  set(1, 2, {0.1, 0.2, 0.7});
  set(1, 3, {0.1, 0.2, 0.7});
  set(1, 4, {0.1, 0.2, 0.7});
  set(2, 2, {0.2, 0.1, 0.7});
  set(2, 3, {0.01, 0.4, 0.59});
  set(2, 4, {0.01, 0.4, 0.59});
  set(3, 3, {0.01, 0.01, 0.98});
  set(3, 4, {0.01, 0.4, 0.59});
  set(4, 4, {0.01, 0.01, 0.98});
  return cfg;
}

struct PlantedGraph {
  SignedGraph graph;
  Partition truth;
};

inline PlantedGraph generate_sg(const SgConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n();
  const std::size_t target = cfg.target_edges();
  const bool can_within = cfg.m >= 2;
  const bool can_between = cfg.c >= 2;

  SplitMix64 rng(cfg.seed);
  std::unordered_set<std::uint64_t> placed;
  placed.reserve(target * 2);
  std::vector<SignedEdge> edges;
  edges.reserve(target);

  const std::size_t max_attempts = 100 * target;
  std::size_t attempts = 0;
  while (edges.size() < target) {
    const double u = rng.uniform();
    const bool within = can_within && (!can_between || u < cfg.p_in);
    std::size_t i = 0;
    std::size_t j = 0;
    for (;;) {
      if (attempts++ >= max_attempts) {
        throw Error(ErrorCode::kInfeasibleConfig,
                    "placed " + std::to_string(edges.size()) + " of " + std::to_string(target) +
                        " edges within the attempt budget");
      }
      if (within) {
        const std::size_t b = rng.below(cfg.c);
        i = b * cfg.m + rng.below(cfg.m);
        j = b * cfg.m + rng.below(cfg.m);
      } else {
        const std::size_t b1 = rng.below(cfg.c);
        std::size_t b2 = rng.below(cfg.c - 1);
        if (b2 >= b1) ++b2;
        i = b1 * cfg.m + rng.below(cfg.m);
        j = b2 * cfg.m + rng.below(cfg.m);
      }
      if (i == j) continue;
      const std::uint64_t key = static_cast<std::uint64_t>(std::min(i, j)) * n + std::max(i, j);
      if (placed.insert(key).second) break;
    }
    Sign sign = 0;
    if (within) {
      sign = rng.bernoulli(cfg.p_minus) ? Sign{-1} : Sign{1};
    } else {
      sign = rng.bernoulli(cfg.p_plus) ? Sign{1} : Sign{-1};
    }
    edges.push_back({i, j, sign});
  }

  std::vector<std::size_t> blocks(n);
  for (std::size_t v = 0; v < n; ++v) blocks[v] = v / cfg.m;
  return {SignedGraph::from_edges(n, edges, false), Partition::compacted(blocks)};
}

inline PlantedGraph generate_block_pair(const BlockPairConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n();
  std::vector<std::size_t> blocks;
  blocks.reserve(n);
  for (std::size_t b = 0; b < cfg.block_sizes.size(); ++b) {
    blocks.insert(blocks.end(), cfg.block_sizes[b], b);
  }

  SplitMix64 rng(cfg.seed);
  std::vector<SignedEdge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& t = cfg.pi[blocks[i]][blocks[j]];
      const std::size_t h = rng.categorical(t);
      if (h == 0) edges.push_back({i, j, Sign{1}});
      else if (h == 1) edges.push_back({i, j, Sign{-1}});
    }
  }
  return {SignedGraph::from_edges(n, edges, false), Partition::compacted(blocks)};
}

}  // namespace ssbm
