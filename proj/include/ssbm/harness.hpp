#pragma once

// Batch commands behind the `ssbm` tool: generate, fit, eval, bench.
//
// Configs are INI documents. A generator config holds one of
//
//   [sg]          c, m, k, p_in, p_minus, p_plus, seed
//   [block_pair]  preset = network_vi (block_size, seed), or
//                 block_sizes = 32,32 and pi_P_Q = pos,neg,null for P <= Q
//
// A bench suite holds optional [bench] (workers) and [fit] (k_min, k_max,
// epsilon, restarts, max_sweeps) sections plus one [sweep:NAME] section per
// curve: family (sg | block_pair), param (one name or several joined by
// commas, all set to the same value), either values = a,b,c or
// from/to/step, seeds (count) and first_seed, and the family's base keys.
// Each sweep writes NAME.csv. Row r of a point uses graph seed
// first_seed + r and fit seed derive_seed(graph seed, 1).
//
// Every output document is JSON.

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <variant>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "ssbm/error.hpp"
#include "ssbm/evaluation.hpp"
#include "ssbm/learner.hpp"
#include "ssbm/signed_graph.hpp"
#include "ssbm/synth.hpp"

namespace ssbm::harness {

using json = nlohmann::ordered_json;
using boost::property_tree::ptree;

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitIo = 2,
  kExitDegenerate = 3,
};

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return kExitIo;
    case ErrorCode::kDegenerateModel:
    case ErrorCode::kZeroMass: return kExitDegenerate;
    default: return kExitValidation;
  }
}

// ---- small utilities -------------------------------------------------------

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

// Shortest text that reads back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline ptree load_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  ptree pt;
  try {
    boost::property_tree::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::kInvalidConfig, path + ": " + e.message());
  }
  return pt;
}

namespace detail {

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidConfig, key + ": expected a number, got '" + text + "'");
}

inline std::uint64_t to_uint(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] != '-') {
      const unsigned long long v = std::stoull(text, &used);
      if (used == text.size()) return v;
    }
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidConfig,
              key + ": expected a non-negative integer, got '" + text + "'");
}

inline std::optional<std::string> get(const ptree& sec, const std::string& key) {
  auto it = sec.find(key);
  if (it == sec.not_found()) return std::nullopt;
  return trim(it->second.data());
}

template <class Fn>
void read_opt(const ptree& sec, const std::string& key, Fn&& fn) {
  if (auto v = get(sec, key)) fn(*v);
}

}  // namespace detail

// ---- generator configs -----------------------------------------------------

struct GeneratorConfig {
  std::string family;  // "sg" or "block_pair"
  std::variant<SgConfig, BlockPairConfig> config;
  std::string preset;  // block_pair only

  std::uint64_t seed() const {
    return std::visit([](const auto& c) { return c.seed; }, config);
  }
  void set_seed(std::uint64_t s) {
    std::visit([s](auto& c) { c.seed = s; }, config);
  }
};

// Applies key=value onto an SG config. Returns false for unknown keys.
inline bool apply_sg_key(SgConfig& cfg, const std::string& key, const std::string& value) {
  using detail::to_double;
  using detail::to_uint;
  if (key == "c") cfg.c = to_uint(key, value);
  else if (key == "m") cfg.m = to_uint(key, value);
  else if (key == "k") cfg.k = to_double(key, value);
  else if (key == "p_in") cfg.p_in = to_double(key, value);
  else if (key == "p_minus") cfg.p_minus = to_double(key, value);
  else if (key == "p_plus") cfg.p_plus = to_double(key, value);
  else if (key == "seed") cfg.seed = to_uint(key, value);
  else return false;
  return true;
}

inline CategoryTriple parse_triple(const std::string& key, const std::string& value) {
  auto parts = detail::split_list(value);
  if (parts.size() != 3) throw Error(ErrorCode::kInvalidConfig, key + ": expected pos,neg,null");
  return {detail::to_double(key, parts[0]), detail::to_double(key, parts[1]),
          detail::to_double(key, parts[2])};
}

inline GeneratorConfig parse_block_pair_section(const ptree& sec) {
  GeneratorConfig out;
  out.family = "block_pair";
  const std::string preset = detail::get(sec, "preset").value_or("");
  std::uint64_t seed = 1;
  detail::read_opt(sec, "seed", [&](const std::string& v) { seed = detail::to_uint("seed", v); });
  if (!preset.empty()) {
    if (preset != "network_vi") {
      throw Error(ErrorCode::kInvalidConfig, "preset: unknown value '" + preset + "'");
    }
    std::size_t size = 32;
    detail::read_opt(sec, "block_size",
                     [&](const std::string& v) { size = detail::to_uint("block_size", v); });
    if (size == 0) throw Error(ErrorCode::kInvalidConfig, "block_size must be >= 1");
    out.preset = preset;
    out.config = network_vi_config(seed, size);
    return out;
  }
  BlockPairConfig cfg;
  cfg.seed = seed;
  const auto sizes = detail::get(sec, "block_sizes");
  if (!sizes) throw Error(ErrorCode::kInvalidConfig, "block_sizes is required without a preset");
  for (const auto& s : detail::split_list(*sizes)) {
    cfg.block_sizes.push_back(detail::to_uint("block_sizes", s));
  }
  const std::size_t b = cfg.block_sizes.size();
  cfg.pi.assign(b, std::vector<CategoryTriple>(b, CategoryTriple{-1.0, -1.0, -1.0}));
  for (std::size_t p = 0; p < b; ++p) {
    for (std::size_t q = p; q < b; ++q) {
      const std::string key = "pi_" + std::to_string(p + 1) + "_" + std::to_string(q + 1);
      auto v = detail::get(sec, key);
      if (!v) throw Error(ErrorCode::kInvalidConfig, key + " is missing");
      cfg.pi[p][q] = cfg.pi[q][p] = parse_triple(key, *v);
    }
  }
  out.config = std::move(cfg);
  return out;
}

inline GeneratorConfig parse_sg_section(const ptree& sec) {
  GeneratorConfig out;
  out.family = "sg";
  SgConfig cfg;
  for (const auto& [key, node] : sec) {
    if (!apply_sg_key(cfg, key, detail::trim(node.data()))) {
      throw Error(ErrorCode::kInvalidConfig, "sg: unknown key '" + key + "'");
    }
  }
  out.config = cfg;
  return out;
}

inline GeneratorConfig parse_generator(const ptree& pt) {
  const bool has_sg = pt.find("sg") != pt.not_found();
  const bool has_bp = pt.find("block_pair") != pt.not_found();
  if (has_sg == has_bp) {
    throw Error(ErrorCode::kInvalidConfig, "config needs exactly one of [sg] or [block_pair]");
  }
  GeneratorConfig out =
      has_sg ? parse_sg_section(pt.get_child("sg")) : parse_block_pair_section(pt.get_child("block_pair"));
  std::visit([](const auto& c) { c.validate(); }, out.config);
  return out;
}

inline GeneratorConfig load_generator_config(const std::string& path) {
  return parse_generator(load_ini(path));
}

inline json to_json(const GeneratorConfig& g) {
  json j;
  j["family"] = g.family;
  if (const auto* sg = std::get_if<SgConfig>(&g.config)) {
    j["c"] = sg->c;
    j["m"] = sg->m;
    j["k"] = sg->k;
    j["p_in"] = sg->p_in;
    j["p_minus"] = sg->p_minus;
    j["p_plus"] = sg->p_plus;
    j["seed"] = sg->seed;
  } else {
    const auto& bp = std::get<BlockPairConfig>(g.config);
    if (!g.preset.empty()) j["preset"] = g.preset;
    j["block_sizes"] = bp.block_sizes;
    json pi = json::array();
    for (const auto& row : bp.pi) {
      json r = json::array();
      for (const auto& t : row) r.push_back({t[0], t[1], t[2]});
      pi.push_back(r);
    }
    j["pi"] = pi;
    j["seed"] = bp.seed;
  }
  return j;
}

inline PlantedGraph generate(const GeneratorConfig& g) {
  if (const auto* sg = std::get_if<SgConfig>(&g.config)) return generate_sg(*sg);
  return generate_block_pair(std::get<BlockPairConfig>(g.config));
}

// ---- fit options -----------------------------------------------------------

inline void apply_fit_section(FitConfig& cfg, const ptree& sec) {
  for (const auto& [key, node] : sec) {
    const std::string v = detail::trim(node.data());
    if (key == "k_min") cfg.k_min = detail::to_uint(key, v);
    else if (key == "k_max") cfg.k_max = detail::to_uint(key, v);
    else if (key == "epsilon") cfg.epsilon = detail::to_double(key, v);
    else if (key == "restarts") cfg.restarts = detail::to_uint(key, v);
    else if (key == "seed") cfg.seed = detail::to_uint(key, v);
    else if (key == "max_sweeps") cfg.max_sweeps = detail::to_uint(key, v);
    else if (key == "lambda_floor") cfg.lambda_floor = detail::to_double(key, v);
    else if (key == "seed_blend") cfg.seed_blend = detail::to_double(key, v);
    else if (key == "workers") cfg.workers = detail::to_uint(key, v);
    else if (key == "sample_assignment") cfg.sample_assignment = v == "true" || v == "1";
    else if (key == "init") {
      if (v == "seed_nodes") cfg.init = InitMethod::kSeedNodes;
      else if (v == "flat_dirichlet") cfg.init = InitMethod::kFlatDirichlet;
      else throw Error(ErrorCode::kInvalidConfig, "init: unknown value '" + v + "'");
    } else {
      throw Error(ErrorCode::kInvalidConfig, "fit: unknown key '" + key + "'");
    }
  }
}

inline json to_json(const FitConfig& cfg) {
  json j;
  j["k_min"] = cfg.k_min;
  j["k_max"] = cfg.k_max ? json(*cfg.k_max) : json(nullptr);
  j["epsilon"] = cfg.epsilon;
  j["restarts"] = cfg.restarts;
  j["seed"] = cfg.seed;
  j["lambda_floor"] = cfg.lambda_floor;
  j["max_sweeps"] = cfg.max_sweeps;
  j["init"] = cfg.init == InitMethod::kSeedNodes ? "seed_nodes" : "flat_dirichlet";
  j["seed_blend"] = cfg.seed_blend;
  j["sample_assignment"] = cfg.sample_assignment;
  return j;
}

inline json to_json(const FitResult& r, const SignedGraph& g) {
  json j;
  j["k_found"] = r.best_partition.k();
  j["n"] = g.n();
  j["best_cost"] = r.best_cost;
  j["k_ne"] = r.best_params.k_ne;
  std::vector<std::string> labels(g.n());
  for (std::size_t v = 0; v < g.n(); ++v) labels[v] = g.label(v);
  j["labels"] = labels;
  j["assignment"] = r.best_partition.assignment();
  j["phi"] = r.best_params.phi;
  json trace = json::array();
  for (const auto& t : r.cost_trace) {
    trace.push_back({{"restart", t.restart},
                     {"sweep", t.sweep},
                     {"k_ne", t.k_ne},
                     {"cost", t.cost},
                     {"regime_end", t.regime_end}});
  }
  j["cost_trace"] = trace;
  json per_k = json::object();
  for (const auto& [k, c] : r.per_k_best) per_k[std::to_string(k)] = c;
  j["per_k_best"] = per_k;
  j["seed_used"] = r.seed_used;
  j["best_restart"] = r.best_restart;
  j["total_sweeps"] = r.total_sweeps;
  j["converged"] = r.converged;
  j["degenerate"] = r.degenerate;
  j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

// ---- commands --------------------------------------------------------------

struct GenerateOptions {
  std::optional<std::uint64_t> seed;
};

// Writes graph.tsv, truth.txt and manifest.json into out_dir.
inline json cmd_generate(const std::string& config_path, const std::string& out_dir,
                         const GenerateOptions& opts = {}) {
  GeneratorConfig gen = load_generator_config(config_path);
  if (opts.seed) gen.set_seed(*opts.seed);
  const auto started = utc_timestamp();
  const PlantedGraph planted = generate(gen);
  const std::filesystem::path dir(out_dir);
  ensure_dir(dir);
  std::ostringstream text;
  format_edge_list(planted.graph, text);
  write_file(dir / "graph.tsv", text.str());
  write_partition(planted.truth, planted.graph, (dir / "truth.txt").string());

  json m;
  m["command"] = "generate";
  m["tool_version"] = kVersion;
  m["config"] = to_json(gen);
  m["config_path"] = config_path;
  m["seed"] = gen.seed();
  m["n"] = planted.graph.n();
  m["edges"] = planted.graph.edge_count();
  m["k_true"] = planted.truth.k();
  m["graph_file"] = "graph.tsv";
  m["truth_file"] = "truth.txt";
  m["graph_digest"] = sha256_hex(text.str());
  m["started"] = started;
  m["finished"] = utc_timestamp();
  write_file(dir / "manifest.json", m.dump(2) + "\n");
  return m;
}

struct FitOutcome {
  json record;
  int exit_code = kExitOk;
};

// Fits the graph at graph_path and writes the run record to out_path.
inline FitOutcome cmd_fit(const std::string& graph_path, const FitConfig& cfg,
                          const std::string& out_path, bool directed = false) {
  const auto started = utc_timestamp();
  const std::string bytes = read_file(graph_path);
  std::istringstream in(bytes);
  LoadReport report;
  const SignedGraph graph = parse_edge_list(in, directed, std::nullopt, &report, graph_path);
  const FitResult result = fit(graph, cfg);

  FitOutcome out;
  json& j = out.record;
  j["command"] = "fit";
  j["tool_version"] = kVersion;
  json config = to_json(cfg);
  config["graph"] = graph_path;
  config["directed"] = directed;
  config["k_max_effective"] = result.best_params.k_max;
  j["config"] = config;
  j["input_digest"] = sha256_hex(bytes);
  j["self_loops_dropped"] = report.self_loops_dropped;
  j["result"] = to_json(result, graph);
  j["started"] = started;
  j["finished"] = utc_timestamp();
  if (result.degenerate || !result.converged) out.exit_code = kExitDegenerate;
  write_file(out_path, j.dump(2) + "\n");
  return out;
}

// Partition from a fit record, in the record's node order.
inline std::pair<std::vector<std::string>, std::vector<std::size_t>> read_fit_assignment(
    const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
    const json& r = j.contains("result") ? j.at("result") : j;
    return {r.at("labels").get<std::vector<std::string>>(),
            r.at("assignment").get<std::vector<std::size_t>>()};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, path + ": not a fit result: " + e.what());
  }
}

// Aligns a fit record with a `node block` truth file and scores it.
inline json cmd_eval(const std::string& result_path, const std::string& truth_path) {
  auto [labels, assignment] = read_fit_assignment(result_path);
  if (labels.size() != assignment.size()) {
    throw Error(ErrorCode::kLengthMismatch, result_path + ": labels and assignment differ in length");
  }
  const auto truth_rows = read_partition_file(truth_path);
  std::unordered_map<std::string, std::size_t> truth_block;
  for (const auto& [node, block] : truth_rows) {
    if (!truth_block.emplace(node, block).second) {
      throw Error(ErrorCode::kInvalidConfig, truth_path + ": node '" + node + "' listed twice");
    }
  }
  if (truth_block.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "result has " + std::to_string(labels.size()) +
                                                " nodes, truth has " +
                                                std::to_string(truth_block.size()));
  }
  std::vector<std::size_t> truth(labels.size());
  for (std::size_t v = 0; v < labels.size(); ++v) {
    auto it = truth_block.find(labels[v]);
    if (it == truth_block.end()) {
      throw Error(ErrorCode::kLengthMismatch, "node '" + labels[v] + "' missing from " + truth_path);
    }
    truth[v] = it->second;
  }
  const auto rep = k_recovery(Partition::compacted(assignment), Partition::compacted(truth));
  json j;
  j["command"] = "eval";
  j["tool_version"] = kVersion;
  j["result"] = result_path;
  j["truth"] = truth_path;
  j["nmi"] = rep.nmi;
  j["k_true"] = rep.k_true;
  j["k_found"] = rep.k_found;
  return j;
}

// ---- bench -----------------------------------------------------------------

struct Sweep {
  std::string name;
  std::string family;
  ptree base;  // family keys other than the swept ones
  std::vector<std::string> params;
  std::vector<double> values;
  std::size_t seeds = 10;
  std::uint64_t first_seed = 1;
};

struct BenchSuite {
  std::vector<Sweep> sweeps;
  FitConfig fit;
  std::size_t workers = 1;
};

struct BenchRow {
  double param_value = 0.0;
  std::uint64_t seed = 0;
  double nmi = 0.0;
  std::size_t k_found = 0;
  std::string status;
  double wall_time_ms = 0.0;
};

inline std::vector<double> sweep_values(const ptree& sec, const std::string& where) {
  std::vector<double> out;
  if (auto v = detail::get(sec, "values")) {
    for (const auto& s : detail::split_list(*v)) out.push_back(detail::to_double(where + ".values", s));
    if (out.empty()) throw Error(ErrorCode::kInvalidConfig, where + ": values is empty");
    return out;
  }
  auto from = detail::get(sec, "from");
  auto to = detail::get(sec, "to");
  auto step = detail::get(sec, "step");
  if (!from || !to || !step) {
    throw Error(ErrorCode::kInvalidConfig, where + ": needs values or from/to/step");
  }
  const double a = detail::to_double(where + ".from", *from);
  const double b = detail::to_double(where + ".to", *to);
  const double s = detail::to_double(where + ".step", *step);
  if (!(s > 0.0) || b < a) throw Error(ErrorCode::kInvalidConfig, where + ": bad from/to/step");
  const auto count = static_cast<std::size_t>(std::floor((b - a) / s + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    // 12 significant digits so that 0.1 * 3 reads back as 0.3.
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", a + static_cast<double>(i) * s);
    out.push_back(std::strtod(buf, nullptr));
  }
  return out;
}

inline BenchSuite parse_bench_suite(const ptree& pt) {
  BenchSuite suite;
  static const std::vector<std::string> kSweepKeys = {"family", "param", "values", "from",
                                                      "to",     "step",  "seeds",  "first_seed"};
  for (const auto& [section, sec] : pt) {
    if (section == "bench") {
      detail::read_opt(sec, "workers",
                       [&](const std::string& v) { suite.workers = detail::to_uint("workers", v); });
    } else if (section == "fit") {
      apply_fit_section(suite.fit, sec);
    } else if (section.starts_with("sweep:")) {
      Sweep s;
      s.name = section.substr(6);
      if (s.name.empty()) throw Error(ErrorCode::kInvalidConfig, "sweep section needs a name");
      const std::string where = "sweep:" + s.name;
      s.family = detail::get(sec, "family").value_or("sg");
      if (s.family != "sg" && s.family != "block_pair") {
        throw Error(ErrorCode::kInvalidConfig, where + ": family must be sg or block_pair");
      }
      auto param = detail::get(sec, "param");
      if (!param) throw Error(ErrorCode::kInvalidConfig, where + ": param is required");
      s.params = detail::split_list(*param);
      s.values = sweep_values(sec, where);
      detail::read_opt(sec, "seeds",
                       [&](const std::string& v) { s.seeds = detail::to_uint(where + ".seeds", v); });
      detail::read_opt(sec, "first_seed", [&](const std::string& v) {
        s.first_seed = detail::to_uint(where + ".first_seed", v);
      });
      if (s.seeds == 0) throw Error(ErrorCode::kInvalidConfig, where + ": seeds must be >= 1");
      for (const auto& [key, node] : sec) {
        if (std::find(kSweepKeys.begin(), kSweepKeys.end(), key) == kSweepKeys.end()) {
          s.base.put_child(ptree::path_type(key, '\0'), node);
        }
      }
      suite.sweeps.push_back(std::move(s));
    } else {
      throw Error(ErrorCode::kInvalidConfig, "unknown section [" + section + "]");
    }
  }
  if (suite.sweeps.empty()) throw Error(ErrorCode::kInvalidConfig, "suite has no [sweep:NAME] section");
  suite.fit.validate();
  return suite;
}

inline BenchSuite load_bench_suite(const std::string& path) {
  return parse_bench_suite(load_ini(path));
}

// Generator config for one grid point.
inline GeneratorConfig sweep_point(const Sweep& s, double value, std::uint64_t seed) {
  ptree sec = s.base;
  // Integer-valued points are written as integers so count keys accept them.
  const std::string text = value == std::floor(value) && std::abs(value) < 1e15
                               ? std::to_string(static_cast<long long>(value))
                               : format_double(value);
  for (const auto& p : s.params) sec.put(ptree::path_type(p, '\0'), text);
  sec.put("seed", std::to_string(seed));
  GeneratorConfig g = s.family == "sg" ? parse_sg_section(sec) : parse_block_pair_section(sec);
  std::visit([](const auto& c) { c.validate(); }, g.config);
  return g;
}

inline BenchRow run_bench_row(const Sweep& s, double value, std::uint64_t seed,
                              const FitConfig& base) {
  BenchRow row;
  row.param_value = value;
  row.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const PlantedGraph planted = generate(sweep_point(s, value, seed));
    FitConfig cfg = base;
    cfg.seed = derive_seed(seed, 1);
    cfg.workers = 1;
    const FitResult result = fit(planted.graph, cfg);
    const auto rep = k_recovery(result, planted.truth);
    row.nmi = rep.nmi;
    row.k_found = rep.k_found;
    row.status = result.degenerate ? "degenerate" : (result.converged ? "ok" : "nonconverged");
  } catch (const Error& e) {
    row.status = std::string("error:") + to_string(e.code());
  }
  row.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

// Runs every (value, seed) cell, up to `workers` at a time; rows come back
// in grid order.
inline std::vector<BenchRow> run_sweep(const Sweep& s, const FitConfig& fit_cfg,
                                       std::size_t workers) {
  const std::size_t cells = s.values.size() * s.seeds;
  std::vector<BenchRow> rows(cells);
  auto cell = [&](std::size_t idx) {
    const double value = s.values[idx / s.seeds];
    const std::uint64_t seed = s.first_seed + idx % s.seeds;
    rows[idx] = run_bench_row(s, value, seed, fit_cfg);
  };
  workers = std::max<std::size_t>(1, std::min(workers, cells));
  if (workers == 1) {
    for (std::size_t i = 0; i < cells; ++i) cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells; i = next++) cell(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  return rows;
}

inline std::string format_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "param_value,seed,nmi,k_found,status,wall_time_ms\n";
  for (const auto& r : rows) {
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", r.wall_time_ms);
    out << format_double(r.param_value) << ',' << r.seed << ',' << format_double(r.nmi) << ','
        << r.k_found << ',' << r.status << ',' << wall << '\n';
  }
  return out.str();
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Per-point medians over the rows that did not error.
inline json summarize_sweep(const Sweep& s, const std::vector<BenchRow>& rows) {
  json points = json::array();
  for (std::size_t p = 0; p < s.values.size(); ++p) {
    std::vector<double> nmis;
    std::vector<double> ks;
    std::size_t failures = 0;
    for (std::size_t r = 0; r < s.seeds; ++r) {
      const auto& row = rows[p * s.seeds + r];
      if (row.status.starts_with("error")) {
        ++failures;
        continue;
      }
      nmis.push_back(row.nmi);
      ks.push_back(static_cast<double>(row.k_found));
    }
    json pt;
    pt["param_value"] = s.values[p];
    pt["median_nmi"] = nmis.empty() ? json(nullptr) : json(median(nmis));
    pt["median_k_found"] = ks.empty() ? json(nullptr) : json(median(ks));
    pt["runs"] = s.seeds;
    pt["failures"] = failures;
    points.push_back(pt);
  }
  json j;
  j["family"] = s.family;
  j["param"] = s.params;
  j["csv"] = s.name + ".csv";
  j["points"] = points;
  return j;
}

struct BenchOptions {
  std::optional<std::size_t> workers;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> k_min;
  std::optional<std::size_t> k_max;
  std::optional<double> epsilon;
};

// Writes NAME.csv per sweep and summary.json into out_dir.
inline json cmd_bench(const std::string& suite_path, const std::string& out_dir,
                      const BenchOptions& opts = {}) {
  BenchSuite suite = load_bench_suite(suite_path);
  if (opts.workers) suite.workers = *opts.workers;
  if (opts.restarts) suite.fit.restarts = *opts.restarts;
  if (opts.k_min) suite.fit.k_min = *opts.k_min;
  if (opts.k_max) suite.fit.k_max = *opts.k_max;
  if (opts.epsilon) suite.fit.epsilon = *opts.epsilon;
  suite.fit.validate();
  const std::filesystem::path dir(out_dir);
  ensure_dir(dir);

  json summary;
  summary["command"] = "bench";
  summary["tool_version"] = kVersion;
  summary["suite"] = suite_path;
  summary["suite_digest"] = sha256_hex(read_file(suite_path));
  summary["fit"] = to_json(suite.fit);
  summary["workers"] = suite.workers;
  summary["started"] = utc_timestamp();
  json sweeps = json::object();
  for (const auto& s : suite.sweeps) {
    const auto rows = run_sweep(s, suite.fit, suite.workers);
    write_file(dir / (s.name + ".csv"), format_csv(rows));
    sweeps[s.name] = summarize_sweep(s, rows);
  }
  summary["sweeps"] = sweeps;
  summary["finished"] = utc_timestamp();
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

}  // namespace ssbm::harness
