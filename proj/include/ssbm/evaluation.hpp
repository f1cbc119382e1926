#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ssbm/error.hpp"
#include "ssbm/learner.hpp"
#include "ssbm/signed_graph.hpp"

namespace ssbm {

struct ConfusionMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> counts;  // rows x cols
  std::vector<std::size_t> row_sums;
  std::vector<std::size_t> col_sums;
  std::size_t total = 0;

  std::size_t operator()(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }
};

inline ConfusionMatrix confusion(const Partition& a, const Partition& b) {
  if (a.n() != b.n()) {
    throw Error(ErrorCode::kLengthMismatch, "partitions cover " + std::to_string(a.n()) + " and " +
                                                std::to_string(b.n()) + " nodes");
  }
  ConfusionMatrix m;
  m.rows = a.k();
  m.cols = b.k();
  m.counts.assign(m.rows * m.cols, 0);
  m.row_sums.assign(m.rows, 0);
  m.col_sums.assign(m.cols, 0);
  m.total = a.n();
  for (std::size_t v = 0; v < a.n(); ++v) {
    ++m.counts[a[v] * m.cols + b[v]];
    ++m.row_sums[a[v]];
    ++m.col_sums[b[v]];
  }
  return m;
}

// Normalized mutual information with natural logs and 0 log 0 = 0.
// Two single-block partitions are identical and score 1.
inline double nmi(const Partition& a, const Partition& b) {
  const auto m = confusion(a, b);
  if (m.total == 0) throw Error(ErrorCode::kEmptyInput, "partitions are empty");
  const double total = static_cast<double>(m.total);
  double mutual = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      const double x = static_cast<double>(m(i, j));
      if (x == 0.0) continue;
      mutual += x * std::log(x * total / (static_cast<double>(m.row_sums[i]) *
                                          static_cast<double>(m.col_sums[j])));
    }
  }
  double entropy = 0.0;
  for (auto s : m.row_sums) {
    const double x = static_cast<double>(s);
    entropy += x * std::log(x / total);
  }
  for (auto s : m.col_sums) {
    const double x = static_cast<double>(s);
    entropy += x * std::log(x / total);
  }
  if (entropy == 0.0) return 1.0;
  const double value = -2.0 * mutual / entropy;
  return std::clamp(value, 0.0, 1.0);
}

struct KRecovery {
  std::size_t k_true = 0;
  std::size_t k_found = 0;
  double nmi = 0.0;
};

inline KRecovery k_recovery(const Partition& found, const Partition& truth) {
  return {truth.k(), found.k(), nmi(truth, found)};
}

inline KRecovery k_recovery(const FitResult& result, const Partition& truth) {
  return k_recovery(result.best_partition, truth);
}

}  // namespace ssbm
