#pragma once

// Signed adjacency, hard partitions and the text edge-list format.
//
// Edge-list files are UTF-8 text with one `src dst sign` triple per line,
// whitespace separated, sign literally `1` or `-1`. Lines starting with `#`
// are comments. A comment of the form `# node-ids: id0 id1 ...` fixes the
// dense node order (and so carries isolated nodes); write_edge_list emits it
// so that load(write(g)) reproduces g exactly.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ssbm/error.hpp"

namespace ssbm {

// Edge category: +1 positive, -1 negative, 0 null.
using Sign = std::int8_t;

// Category index used by the model: 0 positive, 1 negative, 2 null.
constexpr std::size_t category_index(Sign s) {
  return s > 0 ? 0 : (s < 0 ? 1 : 2);
}

struct Neighbor {
  std::uint32_t node;
  Sign sign;
};

struct SignedEdge {
  std::size_t src;
  std::size_t dst;
  Sign sign;
};

class SignedGraph {
 public:
  // Graphs up to this size also keep a dense byte matrix.
  static constexpr std::size_t kDenseLimit = 4096;

  SignedGraph() = default;

  // Builds a graph from (src, dst, sign) entries. Self-loops are dropped.
  // For undirected graphs each entry is mirrored. Throws kConflictingSign if
  // a slot receives both +1 and -1.
  static SignedGraph from_edges(std::size_t n, const std::vector<SignedEdge>& edges,
                                bool directed,
                                std::vector<std::string> labels = {}) {
    if (!labels.empty() && labels.size() != n) {
      throw Error(ErrorCode::kLengthMismatch, "label count differs from node count");
    }
    SignedGraph g;
    g.n_ = n;
    g.directed_ = directed;
    g.labels_ = std::move(labels);
    g.out_.assign(n, {});
    g.in_.assign(directed ? n : 0, {});

    auto put = [&](std::size_t i, std::size_t j, Sign s) {
      g.out_[i].push_back({static_cast<std::uint32_t>(j), s});
      if (directed) g.in_[j].push_back({static_cast<std::uint32_t>(i), s});
    };
    for (const auto& e : edges) {
      if (e.src >= n || e.dst >= n) {
        throw Error(ErrorCode::kLengthMismatch, "edge endpoint out of range");
      }
      if (e.sign != 1 && e.sign != -1) {
        throw Error(ErrorCode::kMalformedLine, "edge sign must be 1 or -1");
      }
      if (e.src == e.dst) continue;
      put(e.src, e.dst, e.sign);
      if (!directed) put(e.dst, e.src, e.sign);
    }
    auto finish = [&](std::vector<std::vector<Neighbor>>& lists) {
      for (std::size_t i = 0; i < lists.size(); ++i) {
        auto& row = lists[i];
        std::sort(row.begin(), row.end(), [](const Neighbor& a, const Neighbor& b) {
          return a.node < b.node;
        });
        std::size_t w = 0;
        for (std::size_t r = 0; r < row.size(); ++r) {
          if (w > 0 && row[w - 1].node == row[r].node) {
            if (row[w - 1].sign != row[r].sign) {
              throw Error(ErrorCode::kConflictingSign,
                          "pair (" + g.label(i) + ", " + g.label(row[r].node) +
                              ") has both signs");
            }
            continue;
          }
          row[w++] = row[r];
        }
        row.resize(w);
      }
    };
    finish(g.out_);
    finish(g.in_);
    if (n <= kDenseLimit) {
      g.dense_.assign(n * n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        for (const auto& nb : g.out_[i]) g.dense_[i * n + nb.node] = nb.sign;
      }
    }
    return g;
  }

  std::size_t n() const { return n_; }
  bool directed() const { return directed_; }
  bool is_dense() const { return !dense_.empty() || n_ == 0; }

  Sign at(std::size_t i, std::size_t j) const {
    if (!dense_.empty()) return dense_[i * n_ + j];
    const auto& row = out_[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const Neighbor& a, std::size_t v) { return a.node < v; });
    return (it != row.end() && it->node == j) ? it->sign : Sign{0};
  }

  // Nonzero entries of row i (targets j with a_ij != 0), sorted by j.
  const std::vector<Neighbor>& row(std::size_t i) const { return out_[i]; }

  // Nonzero entries of column j (sources i with a_ij != 0), sorted by i.
  const std::vector<Neighbor>& column(std::size_t j) const {
    return directed_ ? in_[j] : out_[j];
  }

  // Count of nonzero ordered entries.
  std::size_t nonzeros() const {
    std::size_t total = 0;
    for (const auto& r : out_) total += r.size();
    return total;
  }

  // Unordered edges when undirected, ordered entries otherwise.
  std::size_t edge_count() const {
    return directed_ ? nonzeros() : nonzeros() / 2;
  }

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(std::size_t i) const {
    return labels_.empty() ? std::to_string(i) : labels_[i];
  }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < n_; ++i) {
      for (const auto& nb : out_[i]) {
        if (at(nb.node, i) != nb.sign) return false;
      }
    }
    return true;
  }

  // Copy with directed = false. Fails with kConflictingSign where a_ij and
  // a_ji carry opposite signs.
  SignedGraph symmetrized() const {
    std::vector<SignedEdge> edges;
    edges.reserve(nonzeros());
    for (std::size_t i = 0; i < n_; ++i) {
      for (const auto& nb : out_[i]) edges.push_back({i, nb.node, nb.sign});
    }
    return from_edges(n_, edges, false, labels_);
  }

  // Same adjacency and direction flag; labels are not compared.
  friend bool operator==(const SignedGraph& a, const SignedGraph& b) {
    if (a.n_ != b.n_ || a.directed_ != b.directed_) return false;
    for (std::size_t i = 0; i < a.n_; ++i) {
      const auto& ra = a.out_[i];
      const auto& rb = b.out_[i];
      if (ra.size() != rb.size()) return false;
      for (std::size_t t = 0; t < ra.size(); ++t) {
        if (ra[t].node != rb[t].node || ra[t].sign != rb[t].sign) return false;
      }
    }
    return true;
  }

 private:
  std::size_t n_ = 0;
  bool directed_ = false;
  std::vector<std::string> labels_;
  std::vector<std::vector<Neighbor>> out_;
  std::vector<std::vector<Neighbor>> in_;
  std::vector<Sign> dense_;
};

// Hard assignment of nodes to compacted block labels 0..k-1.
class Partition {
 public:
  Partition() = default;

  // Relabels arbitrary non-negative block ids to 0..k-1 in first-appearance
  // order.
  static Partition compacted(const std::vector<std::size_t>& raw) {
    Partition p;
    p.assignment_.resize(raw.size());
    std::unordered_map<std::size_t, std::size_t> remap;
    for (std::size_t v = 0; v < raw.size(); ++v) {
      auto [it, inserted] = remap.try_emplace(raw[v], remap.size());
      p.assignment_[v] = it->second;
    }
    p.k_ = remap.size();
    return p;
  }

  std::size_t n() const { return assignment_.size(); }
  std::size_t k() const { return k_; }
  std::size_t operator[](std::size_t v) const { return assignment_[v]; }
  const std::vector<std::size_t>& assignment() const { return assignment_; }

  std::vector<std::size_t> block_sizes() const {
    std::vector<std::size_t> sizes(k_, 0);
    for (auto b : assignment_) ++sizes[b];
    return sizes;
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::size_t> assignment_;
  std::size_t k_ = 0;
};

struct LoadReport {
  std::size_t self_loops_dropped = 0;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline constexpr std::string_view kNodeIdsDirective = "# node-ids:";

}  // namespace detail

// Parses edge-list text. `origin` names the source in error messages.
inline SignedGraph parse_edge_list(std::istream& in, bool directed,
                                   std::optional<std::size_t> n_hint = std::nullopt,
                                   LoadReport* report = nullptr,
                                   const std::string& origin = "<stream>") {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::string> labels;
  auto intern = [&](std::string_view id) {
    auto [it, inserted] = index.try_emplace(std::string(id), labels.size());
    if (inserted) labels.emplace_back(id);
    return it->second;
  };

  std::vector<SignedEdge> edges;
  LoadReport local;
  std::string line;
  std::size_t line_no = 0;
  bool any_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (view.starts_with(detail::kNodeIdsDirective)) {
      for (auto tok : detail::split_ws(view.substr(detail::kNodeIdsDirective.size()))) {
        intern(tok);
      }
      continue;
    }
    auto tokens = detail::split_ws(view);
    if (tokens.empty() || tokens.front().starts_with('#')) continue;
    if (tokens.size() != 3 || (tokens[2] != "1" && tokens[2] != "-1")) {
      throw Error(ErrorCode::kMalformedLine,
                  origin + ":" + std::to_string(line_no) + ": expected `src dst sign`");
    }
    any_data = true;
    const Sign sign = tokens[2] == "1" ? Sign{1} : Sign{-1};
    const std::size_t a = intern(tokens[0]);
    const std::size_t b = intern(tokens[1]);
    if (a == b) {
      ++local.self_loops_dropped;
      continue;
    }
    edges.push_back({a, b, sign});
  }
  if (!any_data && labels.empty()) {
    throw Error(ErrorCode::kEmptyInput, origin + ": no edges");
  }
  if (n_hint && *n_hint > labels.size()) {
    std::size_t next = 0;
    while (labels.size() < *n_hint) {
      std::string id = std::to_string(next++);
      if (!index.contains(id)) intern(id);
    }
  }
  if (report) *report = local;
  const std::size_t n = labels.size();
  return SignedGraph::from_edges(n, edges, directed, std::move(labels));
}

inline SignedGraph load_edge_list(const std::string& path, bool directed,
                                  std::optional<std::size_t> n_hint = std::nullopt,
                                  LoadReport* report = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return parse_edge_list(in, directed, n_hint, report, path);
}

inline void format_edge_list(const SignedGraph& g, std::ostream& out) {
  out << "# signed edge list: src dst sign\n";
  out << detail::kNodeIdsDirective;
  for (std::size_t i = 0; i < g.n(); ++i) out << ' ' << g.label(i);
  out << '\n';
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (const auto& nb : g.row(i)) {
      if (!g.directed() && nb.node < i) continue;
      out << g.label(i) << ' ' << g.label(nb.node) << ' ' << static_cast<int>(nb.sign)
          << '\n';
    }
  }
}

inline void write_edge_list(const SignedGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  format_edge_list(g, out);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

// `node block` lines, one per node.
inline void write_partition(const Partition& p, const SignedGraph& g,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  for (std::size_t v = 0; v < p.n(); ++v) out << g.label(v) << ' ' << p[v] << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

// Reads `node block` lines; returns node ids in file order and the raw
// block ids.
inline std::vector<std::pair<std::string, std::size_t>> read_partition_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::pair<std::string, std::size_t>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens.front().starts_with('#')) continue;
    std::size_t block = 0;
    bool ok = tokens.size() == 2;
    if (ok) {
      try {
        std::size_t used = 0;
        const std::string tok(tokens[1]);
        block = std::stoul(tok, &used);
        ok = used == tok.size();
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      throw Error(ErrorCode::kMalformedLine,
                  path + ":" + std::to_string(line_no) + ": expected `node block`");
    }
    rows.emplace_back(std::string(tokens[0]), block);
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, path + ": no assignments");
  return rows;
}

}  // namespace ssbm
