#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "ssbm/learner.hpp"

using namespace ssbm;
using oracle::cpp_rational;

namespace {

SignedGraph graph_from(std::size_t n, std::vector<SignedEdge> edges) {
  return SignedGraph::from_edges(n, edges, false);
}

// Responsibilities from explicit rows.
Responsibilities resp(const std::vector<std::vector<double>>& rows) {
  Responsibilities z(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) z(i, k) = rows[i][k];
  }
  return z;
}

}  // namespace

TEST(DefaultKMax, FloorOfSquareRoot) {
  EXPECT_EQ(default_k_max(144), 12u);
  EXPECT_EQ(default_k_max(128), 11u);
  EXPECT_EQ(default_k_max(1), 1u);
  EXPECT_EQ(default_k_max(0), 1u);
  EXPECT_EQ(default_k_max(15), 3u);
  EXPECT_EQ(default_k_max(16), 4u);
  EXPECT_EQ(default_k_max(1u << 30), 1u << 15);
}

TEST(LogEvidence, SingleNeighbor) {
  const auto g = graph_from(2, {{0, 1, 1}});
  ModelParams p(2, 1);
  p.lam(0, 1, 0) = 0.5;
  p.lam(0, 1, 1) = 0.25;
  p.lam(0, 1, 2) = 0.25;
  EXPECT_DOUBLE_EQ(log_evidence_per_node(g, p, 0, 0), std::log(0.5));
}

TEST(LogEvidence, UniformLambda) {
  SplitMix64 rng(1);
  const auto g = oracle::random_graph(9, 0.5, rng);
  ModelParams p(9, 2);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_NEAR(log_evidence_per_node(g, p, i, 1), 8 * std::log(1.0 / 3.0), 1e-12);
  }
}

TEST(LogEvidence, MatchesLinearSpaceProduct) {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_graph(5, 0.6, rng);
    const auto p = oracle::dyadic_params(5, 3, rng);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        double prod = 1.0;
        for (std::size_t j = 0; j < 5; ++j) {
          if (j != i) prod *= p.lam(k, j, oracle::cat(g.at(i, j)));
        }
        EXPECT_NEAR(log_evidence_per_node(g, p, i, k), std::log(prod), 1e-12);
      }
    }
  }
}

TEST(EStep, SingleLiveBlockIsCertain) {
  SplitMix64 rng(3);
  const auto g = oracle::random_graph(6, 0.5, rng);
  const auto p = oracle::dyadic_params(6, 3, rng, 2);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto row = e_step_row(g, p, i);
    EXPECT_EQ(row, (std::vector<double>{0.0, 0.0, 1.0}));
  }
}

TEST(EStep, IdenticalBlocksSplitEvenly) {
  SplitMix64 rng(4);
  const auto g = oracle::random_graph(6, 0.5, rng);
  ModelParams p = oracle::dyadic_params(6, 2, rng);
  p.phi = {0.5, 0.5};
  std::copy(p.block_row(0).begin(), p.block_row(0).end(), p.block_row(1).begin());
  for (std::size_t i = 0; i < 6; ++i) {
    const auto row = e_step_row(g, p, i);
    EXPECT_DOUBLE_EQ(row[0], 0.5);
    EXPECT_DOUBLE_EQ(row[1], 0.5);
  }
}

TEST(EStep, HandSetToyMatchesExactFractions) {
  // 4 nodes: 0-1 positive, 2-3 positive, 1-2 negative.
  const auto g = graph_from(4, {{0, 1, 1}, {2, 3, 1}, {1, 2, -1}});
  ModelParams p(4, 2);
  p.phi = {0.25, 0.75};
  const double a[4][3] = {{0.5, 0.25, 0.25}, {0.5, 0.125, 0.375}, {0.125, 0.5, 0.375},
                          {0.0625, 0.0625, 0.875}};
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t h = 0; h < 3; ++h) {
      p.lam(0, j, h) = a[j][h];
      p.lam(1, j, h) = a[3 - j][h];
    }
  }
  const auto z = e_step(g, p);
  const auto want = oracle::e_step(g, p);
  for (std::size_t i = 0; i < 4; ++i) {
    double s = 0;
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(z(i, k), want[i][k].convert_to<double>(), 1e-15);
      s += z(i, k);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(EStep, RandomInstancesMatchExactFractions) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(5);
    const auto g = oracle::random_graph(n, 0.5, rng);
    const auto p = oracle::dyadic_params(n, 3, rng, rng.below(2));
    const auto z = e_step(g, p);
    const auto want = oracle::e_step(g, p);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        const double w = want[i][k].convert_to<double>();
        EXPECT_NEAR(z(i, k), w, 1e-12 * std::max(1.0, w));
      }
    }
  }
}

TEST(EStep, StableForHugeGraphsWithTinyProbabilities) {
  // Products underflow in linear space; the log-domain posterior must not.
  const std::size_t n = 3000;
  std::vector<SignedEdge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1});
  const auto g = graph_from(n, edges);
  ModelParams p(n, 2);
  for (std::size_t j = 0; j < n; ++j) {
    p.lam(0, j, 0) = 0.001;
    p.lam(0, j, 1) = 0.001;
    p.lam(0, j, 2) = 0.998;
    p.lam(1, j, 0) = 0.01;
    p.lam(1, j, 1) = 0.01;
    p.lam(1, j, 2) = 0.98;
  }
  const auto row = e_step_row(g, p, 5);
  EXPECT_TRUE(std::isfinite(row[0]) && std::isfinite(row[1]));
  EXPECT_NEAR(row[0] + row[1], 1.0, 1e-12);
  EXPECT_GT(row[0], 0.99);
}

TEST(MStepPhi, DirectSubstitution) {
  // Masses 6 and 4 over n = 10, c/2 = 1.
  std::vector<std::vector<double>> rows(10, {0.0, 0.0});
  for (int i = 0; i < 6; ++i) rows[i] = {1.0, 0.0};
  for (int i = 6; i < 10; ++i) rows[i] = {0.0, 1.0};
  auto z = resp(rows);
  const auto out = m_step_phi(z, 2.0);
  EXPECT_DOUBLE_EQ(out.phi[0], 5.0 / 8.0);
  EXPECT_DOUBLE_EQ(out.phi[1], 3.0 / 8.0);
  EXPECT_TRUE(out.annihilated.empty());
}

TEST(MStepPhi, SmallBlockIsAnnihilated) {
  std::vector<std::vector<double>> rows(6, {1.0, 0.0});
  rows[0] = {0.6, 0.4};
  auto z = resp(rows);
  ASSERT_NEAR(z.column_mass(1), 0.4, 1e-15);
  const auto out = m_step_phi(z, 2.0);
  EXPECT_EQ(out.phi[1], 0.0);
  EXPECT_EQ(out.phi[0], 1.0);
  EXPECT_EQ(out.annihilated, (std::vector<std::size_t>{1}));
  // The column is zeroed and the row renormalized.
  EXPECT_EQ(z(0, 1), 0.0);
  EXPECT_EQ(z(0, 0), 1.0);
}

TEST(MStepPhi, ZeroCIsMaximumLikelihood) {
  SplitMix64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + rng.below(20);
    Responsibilities z(n, 4);
    for (std::size_t i = 0; i < n; ++i) rng.flat_dirichlet(z.row(i));
    const auto out = m_step_phi(z, 0.0);
    for (std::size_t k = 0; k < 4; ++k) {
      double mass = 0.0;
      for (std::size_t i = 0; i < n; ++i) mass += z(i, k);
      EXPECT_NEAR(out.phi[k], mass / static_cast<double>(n), 1e-12);
    }
  }
}

TEST(MStepPhi, MatchesExactFractions) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.below(10);
    Responsibilities z(n, 3);
    std::vector<std::vector<cpp_rational>> exact(n, std::vector<cpp_rational>(3));
    for (std::size_t i = 0; i < n; ++i) {
      rng.flat_dirichlet(z.row(i));
      for (std::size_t k = 0; k < 3; ++k) exact[i][k] = oracle::exact(z(i, k));
    }
    const double c = static_cast<double>(rng.below(4));
    const auto want = oracle::m_step_phi(exact, oracle::exact(c));
    const auto out = m_step_phi(z, c);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(out.phi[k], want[k].convert_to<double>(), 1e-12);
    }
  }
}

TEST(MStepPhi, AllBelowThresholdIsDegenerate) {
  auto z = resp({{0.5, 0.5}, {0.5, 0.5}});
  try {
    m_step_phi(z, 4.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateModel);
  }
}

TEST(MStepLambda, HardAssignmentFractions) {
  // Block 0 = {1, 2}; a_1,3 = +1, a_2,3 = -1.
  const auto g = graph_from(4, {{1, 3, 1}, {2, 3, -1}});
  auto z = resp({{0, 1}, {1, 0}, {1, 0}, {0, 1}});
  const auto row = m_step_lambda(g, z, 0, 1e-10);
  const double s = 1.0 + 1e-10;
  EXPECT_NEAR(row[3 * 3 + 0], 0.5 / s, 1e-15);
  EXPECT_NEAR(row[3 * 3 + 1], 0.5 / s, 1e-15);
  EXPECT_NEAR(row[3 * 3 + 2], 1e-10 / s, 1e-20);
}

TEST(MStepLambda, EmptyColumnIsAllNull) {
  const auto g = graph_from(4, {{0, 1, 1}});
  auto z = resp({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
  const auto row = m_step_lambda(g, z, 1, 1e-10);
  const double s = 1.0 + 2e-10;
  EXPECT_NEAR(row[3 * 3 + 0], 1e-10 / s, 1e-20);
  EXPECT_NEAR(row[3 * 3 + 1], 1e-10 / s, 1e-20);
  EXPECT_NEAR(row[3 * 3 + 2], 1.0 / s, 1e-15);
}

TEST(MStepLambda, MatchesExactFractions) {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + rng.below(4);
    const auto g = oracle::random_graph(n, 0.5, rng);
    Responsibilities z(n, 2);
    std::vector<std::vector<cpp_rational>> exact(n, std::vector<cpp_rational>(2));
    for (std::size_t i = 0; i < n; ++i) {
      rng.flat_dirichlet(z.row(i));
      for (std::size_t k = 0; k < 2; ++k) exact[i][k] = oracle::exact(z(i, k));
    }
    for (std::size_t k = 0; k < 2; ++k) {
      const auto row = m_step_lambda(g, z, k, 1e-10);
      const auto want = oracle::m_step_lambda(g, exact, k, oracle::exact(1e-10));
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t h = 0; h < 3; ++h) {
          const double w = want[j][h].convert_to<double>();
          EXPECT_LE(oracle::rel_err(row[j * 3 + h], w), 1e-12);
          EXPECT_GE(row[j * 3 + h], 1e-10 * (1 - 1e-9));
          s += row[j * 3 + h];
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
    }
  }
}

TEST(MStepLambda, ZeroMassIsAnError) {
  const auto g = graph_from(3, {{0, 1, 1}});
  auto z = resp({{1, 0}, {1, 0}, {1, 0}});
  try {
    m_step_lambda(g, z, 1, 1e-10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroMass);
  }
}

TEST(Cost, SingleBlockEmpiricalLambdaIsEntropyCodeLength) {
  // Column frequencies as lambda; the likelihood term is then the code
  // length of each ordered pair under its column's empirical distribution.
  const auto g = graph_from(4, {{0, 1, 1}, {0, 2, -1}, {1, 2, 1}, {2, 3, -1}});
  ModelParams p(4, 1);
  auto z = resp({{1}, {1}, {1}, {1}});
  const auto row = m_step_lambda(g, z, 0, 1e-300);
  std::copy(row.begin(), row.end(), p.block_row(0).begin());
  double direct = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    double counts[3] = {0, 0, 0};
    for (std::size_t i = 0; i < 4; ++i) {
      if (i != j) counts[oracle::cat(g.at(i, j))] += 1;
    }
    for (std::size_t i = 0; i < 4; ++i) {
      if (i != j) direct -= std::log(counts[oracle::cat(g.at(i, j))] / 3.0);
    }
  }
  EXPECT_NEAR(cost_terms(g, p).neg_log_likelihood, direct, 1e-12);
}

TEST(Cost, DuplicatedBlockKeepsLikelihoodAndRaisesPenalty) {
  SplitMix64 rng(9);
  // Large enough n that the log n term outweighs the mixing-weight term.
  const auto g = oracle::random_graph(60, 0.4, rng);
  ModelParams one = oracle::dyadic_params(60, 2, rng, 1);
  ModelParams two = one;
  std::copy(one.block_row(1).begin(), one.block_row(1).end(), two.block_row(0).begin());
  two.phi = {0.5, 0.5};
  two.k_ne = 2;
  two.c = 4.0;
  const auto a = cost_terms(g, one);
  const auto b = cost_terms(g, two);
  EXPECT_NEAR(a.neg_log_likelihood, b.neg_log_likelihood, 1e-9);
  EXPECT_GT(b.penalty, a.penalty);
}

TEST(Cost, ConstantTermForFourBlocks) {
  // n = 1 removes the log n term; sum log phi is 4 log(1/4).
  const std::vector<double> phi(4, 0.25);
  const double kappa = 1.0 / (2.0 * std::numbers::pi * std::numbers::e);
  const double want = 4.0 * 4.0 * std::log(0.25) + 18.0 * (1.0 + std::log(kappa));
  EXPECT_NEAR(cost_penalty(1, phi, 8.0), want, 1e-12);
  // Dead entries do not count toward K_ne.
  const std::vector<double> with_dead = {0.25, 0.0, 0.25, 0.25, 0.25};
  EXPECT_NEAR(cost_penalty(1, with_dead, 8.0), want, 1e-12);
}

TEST(Cost, MatchesExtendedPrecisionOracle) {
  SplitMix64 rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(6);
    const auto g = oracle::random_graph(n, 0.5, rng);
    const auto p = oracle::dyadic_params(n, 3, rng, rng.below(2));
    const double want = oracle::cost(g, p).convert_to<double>();
    EXPECT_LE(oracle::rel_err(cost(g, p), want), 1e-12) << "trial " << trial;
  }
}

TEST(Init, FlatDirichletRowsOnSimplex) {
  SplitMix64 rng(11);
  const auto p = random_init(7, 3, rng, 1e-10);
  EXPECT_EQ(p.k_ne, 3u);
  for (double f : p.phi) EXPECT_DOUBLE_EQ(f, 1.0 / 3.0);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t j = 0; j < 7; ++j) {
      double s = 0;
      for (std::size_t h = 0; h < 3; ++h) {
        EXPECT_GE(p.lam(k, j, h), 1e-10 * 0.999);
        s += p.lam(k, j, h);
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(Init, SeedNodesUseDistinctSeeds) {
  SplitMix64 rng(12);
  const auto g = oracle::random_graph(10, 0.5, rng);
  SplitMix64 draw(13);
  const auto p = seed_node_init(g, 10, draw, 1e-10, 0.5);
  // With k_max = n every node seeds exactly one block, so no two blocks
  // share their lambda rows.
  for (std::size_t a = 0; a < 10; ++a) {
    for (std::size_t b = a + 1; b < 10; ++b) {
      EXPECT_FALSE(std::equal(p.block_row(a).begin(), p.block_row(a).end(),
                              p.block_row(b).begin()));
    }
  }
  SplitMix64 again(1);
  EXPECT_THROW(seed_node_init(g, 11, again, 1e-10, 0.5), Error);
}

TEST(Partitioning, ArgmaxTiesGoToLowestIndex) {
  auto z = resp({{0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}, {0.0, 0.5, 0.5}});
  const auto p = argmax_partition(z);
  // Raw argmax (0, 2, 1) compacts to (0, 1, 2).
  EXPECT_EQ(p.assignment(), (std::vector<std::size_t>{0, 1, 2}));
  auto z2 = resp({{0.4, 0.6}, {0.5, 0.5}});
  EXPECT_EQ(argmax_partition(z2).assignment(), (std::vector<std::size_t>{0, 1}));
}

TEST(Partitioning, SamplingFollowsCertainRows) {
  auto z = resp({{0.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}});
  SplitMix64 rng(1);
  EXPECT_EQ(sample_partition(z, rng).assignment(), (std::vector<std::size_t>{0, 1, 0}));
}

TEST(FitConfig, Validation) {
  FitConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.k_min = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.k_min = 4;
  cfg.k_max = 3;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.epsilon = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.restarts = 0;
  EXPECT_THROW(cfg.validate(), Error);
}
