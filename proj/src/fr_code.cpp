#include "frcodes/fr_code.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace frcodes {

namespace {

using Mask = std::vector<uint64_t>;

Mask node_mask(const std::vector<uint32_t>& node, uint32_t theta) {
  Mask m((theta + 63) / 64, 0);
  for (uint32_t s : node) m[s >> 6] |= uint64_t{1} << (s & 63);
  return m;
}

uint32_t mask_overlap(const Mask& a, const Mask& b) {
  uint32_t c = 0;
  for (size_t i = 0; i < a.size(); ++i) c += std::popcount(a[i] & b[i]);
  return c;
}

std::vector<uint32_t> sorted_intersection(const std::vector<uint32_t>& a,
                                          const std::vector<uint32_t>& b) {
  std::vector<uint32_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

// C(n, k) saturating at limit+1 so callers can compare against a cap.
uint64_t binomial_capped(uint64_t n, uint64_t k, uint64_t limit) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > limit) return limit + 1;
  }
  return static_cast<uint64_t>(r);
}

struct Dinic {
  struct Edge {
    int to;
    int cap;
    int rev;
  };
  std::vector<std::vector<Edge>> graph;
  std::vector<int> level, iter;

  explicit Dinic(int n) : graph(n) {}

  void add_edge(int from, int to, int cap) {
    graph[from].push_back({to, cap, static_cast<int>(graph[to].size())});
    graph[to].push_back({from, 0, static_cast<int>(graph[from].size()) - 1});
  }

  bool bfs(int s, int t) {
    level.assign(graph.size(), -1);
    std::vector<int> queue{s};
    level[s] = 0;
    for (size_t head = 0; head < queue.size(); ++head) {
      int v = queue[head];
      for (const Edge& e : graph[v]) {
        if (e.cap > 0 && level[e.to] < 0) {
          level[e.to] = level[v] + 1;
          queue.push_back(e.to);
        }
      }
    }
    return level[t] >= 0;
  }

  int dfs(int v, int t, int flow) {
    if (v == t) return flow;
    for (int& i = iter[v]; i < static_cast<int>(graph[v].size()); ++i) {
      Edge& e = graph[v][i];
      if (e.cap > 0 && level[v] < level[e.to]) {
        int pushed = dfs(e.to, t, std::min(flow, e.cap));
        if (pushed > 0) {
          e.cap -= pushed;
          graph[e.to][e.rev].cap += pushed;
          return pushed;
        }
      }
    }
    return 0;
  }

  int max_flow(int s, int t) {
    int total = 0;
    while (bfs(s, t)) {
      iter.assign(graph.size(), 0);
      while (int pushed = dfs(s, t, INT32_MAX)) total += pushed;
    }
    return total;
  }
};

void check_node_ids(const FRCode& code, const std::vector<uint32_t>& ids,
                    const char* what) {
  for (uint32_t id : ids) {
    if (id >= code.nodes.size()) throw std::invalid_argument(what);
  }
}

// Smallest parallel class containing no failed node; rho_res <= rho-1
// failures cannot touch every class.
std::optional<size_t> intact_class(const FRCode& code,
                                   const std::set<uint32_t>& failed) {
  if (!code.resolution) return std::nullopt;
  for (size_t c = 0; c < code.resolution->classes.size(); ++c) {
    bool clean = true;
    for (size_t node : code.resolution->classes[c]) {
      if (failed.count(static_cast<uint32_t>(node))) {
        clean = false;
        break;
      }
    }
    if (clean) return c;
  }
  return std::nullopt;
}

std::optional<NodeRepair> repair_via_class(const FRCode& code, uint32_t fail,
                                           size_t cls) {
  NodeRepair plan;
  plan.node = fail;
  const auto& target = code.nodes[fail];
  size_t recovered = 0;
  for (size_t helper : code.resolution->classes[cls]) {
    std::vector<uint32_t> part =
        sorted_intersection(target, code.nodes[helper]);
    if (part.empty()) continue;
    if (part.size() != code.beta) return std::nullopt;
    recovered += part.size();
    plan.helpers.push_back({static_cast<uint32_t>(helper), std::move(part)});
  }
  if (plan.helpers.size() != code.d || recovered != target.size())
    return std::nullopt;
  return plan;
}

// Lexicographic search over d-subsets of survivors, first feasible wins.
std::optional<NodeRepair> repair_via_search(const FRCode& code, uint32_t fail,
                                            const std::set<uint32_t>& failed,
                                            uint64_t& budget) {
  std::vector<uint32_t> survivors;
  for (uint32_t v = 0; v < code.nodes.size(); ++v) {
    if (!failed.count(v)) survivors.push_back(v);
  }
  if (survivors.size() < code.d) return std::nullopt;

  std::vector<size_t> pick(code.d);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    if (budget == 0) return std::nullopt;
    --budget;
    std::vector<uint32_t> helpers;
    for (size_t i : pick) helpers.push_back(survivors[i]);
    if (auto found = beta_recoverable(code, code.nodes[fail], helpers)) {
      NodeRepair plan;
      plan.node = fail;
      for (size_t i = 0; i < helpers.size(); ++i) {
        if (found->parts[i].empty()) continue;
        plan.helpers.push_back({helpers[i], found->parts[i]});
      }
      return plan;
    }
    // Advance the combination.
    size_t i = code.d;
    bool advanced = false;
    while (i-- > 0) {
      if (pick[i] + (code.d - i) <= survivors.size() - 1) {
        ++pick[i];
        for (size_t j = i + 1; j < code.d; ++j) pick[j] = pick[j - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) return std::nullopt;
  }
}

uint32_t certify_resilience(const FRCode& code, uint64_t budget,
                            bool& certified);

}  // namespace

FRCode fr_from_classes(const Design& design, const Resolution& res,
                       std::vector<size_t> chosen, uint32_t beta) {
  if (chosen.empty()) throw std::invalid_argument("choose at least one class");
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  for (size_t c : chosen) {
    if (c >= res.classes.size())
      throw std::invalid_argument("chosen class index out of range");
  }

  FRCode code;
  code.theta = design.theta;
  code.labels = design.labels;
  Resolution kept;
  for (size_t c : chosen) {
    std::vector<size_t> cls;
    std::vector<uint32_t> cover(design.theta, 0);
    for (size_t idx : res.classes[c]) {
      if (idx >= design.blocks.size())
        throw std::invalid_argument("resolution references missing block");
      cls.push_back(code.nodes.size());
      code.nodes.push_back(design.blocks[idx]);
      for (uint32_t s : design.blocks[idx]) ++cover[s];
    }
    for (uint32_t s = 0; s < design.theta; ++s) {
      if (cover[s] != 1)
        throw std::invalid_argument("chosen class is not a parallel class");
    }
    kept.classes.push_back(std::move(cls));
  }

  code.alpha = static_cast<uint32_t>(code.nodes.front().size());
  for (const auto& node : code.nodes) {
    if (node.size() != code.alpha)
      throw std::invalid_argument("node sizes are not uniform");
  }
  if (beta == 0 || code.alpha % beta != 0)
    throw std::invalid_argument("beta must divide alpha");

  // Cross-class intersections must justify beta.
  std::vector<Mask> masks;
  masks.reserve(code.nodes.size());
  for (const auto& node : code.nodes) masks.push_back(node_mask(node, code.theta));
  std::vector<size_t> class_of(code.nodes.size());
  for (size_t c = 0; c < kept.classes.size(); ++c) {
    for (size_t v : kept.classes[c]) class_of[v] = c;
  }
  uint32_t lo = UINT32_MAX, hi = 0;
  bool any_cross = false;
  for (size_t i = 0; i < code.nodes.size(); ++i) {
    for (size_t j = i + 1; j < code.nodes.size(); ++j) {
      if (class_of[i] == class_of[j]) continue;
      any_cross = true;
      uint32_t overlap = mask_overlap(masks[i], masks[j]);
      lo = std::min(lo, overlap);
      hi = std::max(hi, overlap);
    }
  }
  if (any_cross && !(lo == beta && hi == beta) && !(hi <= 1 && beta == 1))
    throw std::invalid_argument(
        "beta is inconsistent with the cross-class intersection profile");

  code.beta = beta;
  code.d = code.alpha / beta;
  code.rho = static_cast<uint32_t>(kept.classes.size());
  code.rho_res = code.rho - 1;
  code.resolution = std::move(kept);
  code.pairwise_beta_bounded = !any_cross || hi <= beta;
  return code;
}

FRCode fr_from_design(const Design& design, uint32_t beta,
                      uint64_t resilience_budget) {
  if (design.blocks.empty()) throw std::invalid_argument("design has no blocks");
  FRCode code;
  code.theta = design.theta;
  code.labels = design.labels;
  code.nodes = design.blocks;

  code.alpha = static_cast<uint32_t>(code.nodes.front().size());
  for (const auto& node : code.nodes) {
    if (node.size() != code.alpha)
      throw std::invalid_argument("node sizes are not uniform");
  }
  if (beta == 0 || code.alpha % beta != 0)
    throw std::invalid_argument("beta must divide alpha");
  code.beta = beta;
  code.d = code.alpha / beta;

  std::vector<uint32_t> replication(design.theta, 0);
  for (const auto& node : code.nodes) {
    for (uint32_t s : node) ++replication[s];
  }
  for (uint32_t r : replication) {
    if (r != replication[0])
      throw std::invalid_argument("symbol replication is not uniform");
  }
  code.rho = replication.empty() ? 0 : replication[0];

  std::vector<Mask> masks;
  masks.reserve(code.nodes.size());
  for (const auto& node : code.nodes) masks.push_back(node_mask(node, code.theta));
  code.pairwise_beta_bounded = true;
  for (size_t i = 0; i < code.nodes.size() && code.pairwise_beta_bounded; ++i) {
    for (size_t j = i + 1; j < code.nodes.size(); ++j) {
      if (mask_overlap(masks[i], masks[j]) > beta) {
        code.pairwise_beta_bounded = false;
        break;
      }
    }
  }

  bool certified = true;
  code.rho_res = certify_resilience(code, resilience_budget, certified);
  return code;
}

RateResult code_rate(const FRCode& code, uint32_t k, const RateOptions& opt) {
  const size_t n = code.nodes.size();
  if (k < 1 || k > n) throw std::invalid_argument("k must be in [1, n]");

  std::vector<Mask> masks;
  masks.reserve(n);
  for (const auto& node : code.nodes) masks.push_back(node_mask(node, code.theta));
  const size_t words = masks.front().size();

  auto union_size = [&](const std::vector<uint32_t>& subset) {
    Mask acc(words, 0);
    for (uint32_t v : subset) {
      for (size_t w = 0; w < words; ++w) acc[w] |= masks[v][w];
    }
    uint32_t total = 0;
    for (uint64_t w : acc) total += std::popcount(w);
    return total;
  };

  RateResult out;
  out.value = UINT64_MAX;

  if (opt.mode == RateOptions::Mode::exact) {
    if (binomial_capped(n, k, opt.subset_cap) > opt.subset_cap)
      throw std::invalid_argument("exact rate enumeration exceeds the subset cap");
    int64_t floor_value = 0;
    if (code.pairwise_beta_bounded) {
      floor_value =
          std::max<int64_t>(static_cast<int64_t>(k) * code.alpha -
                                static_cast<int64_t>(k) * (k - 1) / 2 * code.beta,
                            code.alpha);
    }
    std::vector<uint32_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      uint64_t u = union_size(pick);
      if (u < out.value) {
        out.value = u;
        out.witness = pick;
        if (code.pairwise_beta_bounded &&
            static_cast<int64_t>(u) == floor_value)
          break;  // the union bound says nothing smaller exists
      }
      size_t i = k;
      bool advanced = false;
      while (i-- > 0) {
        if (pick[i] + (k - i) <= n - 1) {
          ++pick[i];
          for (size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
    out.exact = true;
    return out;
  }

  // Sampled mode: seeded upper bound. Selection uses plain modulo so the
  // stream is identical on every platform.
  std::mt19937_64 rng(opt.seed);
  for (uint64_t t = 0; t < opt.trials; ++t) {
    std::set<uint32_t> subset;
    for (size_t j = n - k; j < n; ++j) {
      uint32_t cand = static_cast<uint32_t>(rng() % (j + 1));
      if (!subset.insert(cand).second) subset.insert(static_cast<uint32_t>(j));
    }
    std::vector<uint32_t> pick(subset.begin(), subset.end());
    uint64_t u = union_size(pick);
    if (u < out.value) {
      out.value = u;
      out.witness = pick;
    }
  }
  out.exact = false;
  return out;
}

GoodnessResult universally_good(const FRCode& code, uint32_t k,
                                uint64_t subset_cap) {
  RateOptions opt;
  opt.subset_cap = subset_cap;
  RateResult rate = code_rate(code, k, opt);
  GoodnessResult out;
  out.rate = rate.value;
  out.floor_value = static_cast<int64_t>(k) * code.alpha -
                    static_cast<int64_t>(k) * (k - 1) / 2 * code.beta;
  out.margin = static_cast<int64_t>(rate.value) - out.floor_value;
  out.good = out.margin >= 0;
  return out;
}

std::optional<RecoveryAssignment> beta_recoverable(
    const FRCode& code, const std::vector<uint32_t>& symbols,
    const std::vector<uint32_t>& helpers) {
  std::vector<uint32_t> a = symbols;
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  for (uint32_t s : a) {
    if (s >= code.theta) throw std::invalid_argument("symbol out of range");
  }
  if (a.size() != static_cast<size_t>(code.d) * code.beta)
    throw std::invalid_argument("symbol set size must equal d·beta");
  if (helpers.size() != code.d)
    throw std::invalid_argument("helper count must equal d");
  check_node_ids(code, helpers, "helper index out of range");
  {
    std::set<uint32_t> distinct(helpers.begin(), helpers.end());
    if (distinct.size() != helpers.size())
      throw std::invalid_argument("helpers must be distinct");
  }

  const int d = static_cast<int>(code.d);
  const int na = static_cast<int>(a.size());
  const int source = 0, sink = 1 + d + na;
  Dinic flow(sink + 1);
  for (int i = 0; i < d; ++i) {
    flow.add_edge(source, 1 + i, static_cast<int>(code.beta));
    std::vector<uint32_t> reachable =
        sorted_intersection(code.nodes[helpers[i]], a);
    for (uint32_t s : reachable) {
      int sym = static_cast<int>(std::lower_bound(a.begin(), a.end(), s) -
                                 a.begin());
      flow.add_edge(1 + i, 1 + d + sym, 1);
    }
  }
  for (int j = 0; j < na; ++j) flow.add_edge(1 + d + j, sink, 1);

  if (flow.max_flow(source, sink) != na) return std::nullopt;

  RecoveryAssignment out;
  out.helpers = helpers;
  out.parts.resize(code.d);
  for (int i = 0; i < d; ++i) {
    for (const Dinic::Edge& e : flow.graph[1 + i]) {
      if (e.to > d && e.to < sink && e.cap == 0) {  // saturated helper→symbol
        out.parts[i].push_back(a[e.to - d - 1]);
      }
    }
    std::sort(out.parts[i].begin(), out.parts[i].end());
  }
  return out;
}

RepairPlan repair_plan(const FRCode& code, const std::vector<uint32_t>& failed,
                       uint64_t search_budget) {
  check_node_ids(code, failed, "failed node index out of range");
  std::set<uint32_t> failset(failed.begin(), failed.end());
  if (failset.size() > code.rho_res)
    throw std::invalid_argument("failure count exceeds the resilience bound");

  RepairPlan plan;
  plan.failed.assign(failset.begin(), failset.end());
  for (uint32_t fail : plan.failed) {
    std::optional<NodeRepair> repaired;
    if (code.resolution) {
      if (auto cls = intact_class(code, failset)) {
        repaired = repair_via_class(code, fail, *cls);
      }
      if (!repaired) {
        repaired = repair_via_search(code, fail, failset, search_budget);
      }
      if (!repaired) {
        throw std::runtime_error(
            "parallel-class repair failed for node " + std::to_string(fail) +
            " and the exhaustive fallback found no feasible d-subset");
      }
    } else {
      repaired = repair_via_search(code, fail, failset, search_budget);
      if (!repaired) {
        throw std::runtime_error(
            search_budget == 0
                ? "helper search budget exhausted repairing node " +
                      std::to_string(fail)
                : "exhaustive helper search found no feasible d-subset for "
                  "node " +
                      std::to_string(fail));
      }
    }
    plan.plans.push_back(std::move(*repaired));
  }
  return plan;
}

namespace {

uint32_t certify_resilience(const FRCode& code, uint64_t budget,
                            bool& certified) {
  certified = true;
  if (code.rho == 0) return 0;
  const uint32_t ceiling = code.rho - 1;
  if (code.resolution) return ceiling;

  const size_t n = code.nodes.size();
  uint32_t achieved = 0;
  for (uint32_t f = 1; f <= ceiling; ++f) {
    if (f > n) break;
    std::vector<uint32_t> pick(f);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      if (budget == 0) {
        certified = false;
        return achieved;
      }
      --budget;
      std::set<uint32_t> failset(pick.begin(), pick.end());
      bool all_ok = true;
      for (uint32_t fail : pick) {
        auto repaired = repair_via_search(code, fail, failset, budget);
        if (!repaired) {
          if (budget == 0) {  // ran out mid-search: result is only a bound
            certified = false;
            return achieved;
          }
          all_ok = false;
          break;
        }
      }
      if (!all_ok) return achieved;  // a pattern with no plan refutes f
      size_t i = f;
      bool advanced = false;
      while (i-- > 0) {
        if (pick[i] + (f - i) <= n - 1) {
          ++pick[i];
          for (size_t j = i + 1; j < f; ++j) pick[j] = pick[j - 1] + 1;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
    achieved = f;
  }
  return achieved;
}

}  // namespace

ResilienceResult resilience(const FRCode& code, uint64_t budget) {
  ResilienceResult out;
  out.value = certify_resilience(code, budget, out.certified);
  return out;
}

MbrResult mbr_alpha(uint64_t M, uint32_t k, uint32_t d) {
  if (k < 1 || d < 1) throw std::invalid_argument("k and d must be positive");
  const int64_t den_signed =
      2 * static_cast<int64_t>(k) * d - static_cast<int64_t>(k) * k + k;
  if (den_signed <= 0)
    throw std::invalid_argument("MBR point undefined: k(2d - k + 1) <= 0");

  MbrResult out;
  out.num = 2 * M * static_cast<uint64_t>(d);
  out.den = static_cast<uint64_t>(den_signed);
  uint64_t g = std::gcd(out.num, out.den);
  if (g > 0) {
    out.num /= g;
    out.den /= g;
  }
  out.integral = out.den == 1;
  if (out.integral) out.alpha = out.num;
  return out;
}

Json repair_plan_to_json(const RepairPlan& plan) {
  Json j = Json::object();
  j["failed"] = plan.failed;
  Json plans = Json::array();
  for (const NodeRepair& rep : plan.plans) {
    Json helpers = Json::array();
    for (const HelperFetch& fetch : rep.helpers) {
      helpers.push_back(Json{{"node", fetch.node}, {"symbols", fetch.symbols}});
    }
    plans.push_back(Json{{"node", rep.node}, {"helpers", helpers}});
  }
  j["plans"] = plans;
  return j;
}

}  // namespace frcodes
