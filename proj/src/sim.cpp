#include "frcodes/sim.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace frcodes {

namespace {

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

uint32_t fetch_packet(const std::vector<CodedSymbol>& contents,
                      uint32_t index) {
  auto it = std::lower_bound(
      contents.begin(), contents.end(), index,
      [](const CodedSymbol& sym, uint32_t want) { return sym.index < want; });
  if (it == contents.end() || it->index != index)
    throw std::logic_error("repair plan references a packet the helper "
                           "does not hold");
  return it->value;
}

}  // namespace

SystemState dss_init(const FRCode& code, uint32_t k,
                     const std::vector<uint32_t>& file, const Gf& field,
                     std::optional<uint64_t> rate_bound) {
  const size_t n = code.nodes.size();
  if (k < 1 || k > n) throw std::invalid_argument("k must be in [1, n]");
  if (file.empty()) throw std::invalid_argument("file must be nonempty");
  const uint64_t bound = rate_bound ? *rate_bound : code_rate(code, k).value;
  if (file.size() > bound)
    throw std::invalid_argument("filesize exceeds the rate bound at k");

  MdsCode mds(field, static_cast<uint32_t>(file.size()), code.theta);
  std::vector<uint32_t> codeword = mds.encode(file);

  std::vector<std::vector<CodedSymbol>> contents(n);
  for (size_t i = 0; i < n; ++i) {
    contents[i].reserve(code.nodes[i].size());
    for (uint32_t j : code.nodes[i]) contents[i].push_back({j, codeword[j]});
  }
  return SystemState{code,
                     std::move(mds),
                     k,
                     file,
                     std::move(codeword),
                     std::move(contents),
                     {},
                     0};
}

void fail_nodes(SystemState& state, const std::vector<uint32_t>& nodes) {
  std::set<uint32_t> updated = state.failed;
  for (uint32_t v : nodes) {
    if (v >= state.code.nodes.size())
      throw std::invalid_argument("failed node index out of range");
    updated.insert(v);
  }
  if (updated.size() > state.code.rho_res)
    throw std::invalid_argument("failure count exceeds the resilience bound");
  for (uint32_t v : updated) state.node_contents[v].clear();
  state.failed = std::move(updated);
}

RepairOutcome repair(SystemState& state) {
  RepairOutcome out;
  state.download_counter = 0;
  if (state.failed.empty()) return out;

  std::vector<uint32_t> failed(state.failed.begin(), state.failed.end());
  out.plan = repair_plan(state.code, failed);

  for (const NodeRepair& rep : out.plan.plans) {
    std::vector<CodedSymbol> rebuilt;
    rebuilt.reserve(state.code.alpha);
    for (const HelperFetch& fetch : rep.helpers) {
      for (uint32_t j : fetch.symbols) {
        rebuilt.push_back({j, fetch_packet(state.node_contents[fetch.node], j)});
        ++out.downloads;
      }
    }
    std::sort(rebuilt.begin(), rebuilt.end(),
              [](const CodedSymbol& a, const CodedSymbol& b) {
                return a.index < b.index;
              });
    state.node_contents[rep.node] = std::move(rebuilt);
    state.failed.erase(rep.node);
  }
  state.download_counter = out.downloads;
  return out;
}

std::vector<uint32_t> reconstruct(const SystemState& state,
                                  const std::vector<uint32_t>& nodes) {
  if (nodes.size() != state.k)
    throw std::invalid_argument("reconstruction must contact exactly k nodes");
  std::set<uint32_t> distinct;
  for (uint32_t v : nodes) {
    if (v >= state.code.nodes.size())
      throw std::invalid_argument("node index out of range");
    if (state.failed.count(v))
      throw std::invalid_argument("cannot contact a failed node");
    if (!distinct.insert(v).second)
      throw std::invalid_argument("contacted nodes must be distinct");
  }

  std::vector<CodedSymbol> gathered;
  std::set<uint32_t> seen;
  for (uint32_t v : nodes) {
    for (const CodedSymbol& sym : state.node_contents[v]) {
      if (seen.insert(sym.index).second) gathered.push_back(sym);
    }
  }
  if (gathered.size() < state.mds.message_len())
    throw std::runtime_error(
        "contacted nodes hold fewer distinct symbols than the filesize");
  return state.mds.decode(gathered);
}

Json run_scenario(const Json& scenario, const Json& design_doc) {
  auto [design, res] = design_from_json(design_doc);

  std::vector<size_t> classes;
  uint32_t beta = 0;
  uint32_t k = 0;
  std::optional<uint64_t> filesize;
  uint64_t seed = 0;
  std::vector<std::vector<uint32_t>> failures;
  try {
    if (!scenario.is_object())
      throw std::invalid_argument("scenario JSON must be an object");
    if (scenario.contains("classes"))
      classes = scenario.at("classes").get<std::vector<size_t>>();
    beta = scenario.at("beta").get<uint32_t>();
    k = scenario.at("k").get<uint32_t>();
    if (scenario.contains("M") && !scenario.at("M").is_string()) {
      filesize = scenario.at("M").get<uint64_t>();
    } else if (scenario.contains("M") &&
               scenario.at("M").get<std::string>() != "max") {
      throw std::invalid_argument("M must be an integer or \"max\"");
    }
    if (scenario.contains("seed")) seed = scenario.at("seed").get<uint64_t>();
    if (scenario.contains("failures")) {
      failures =
          scenario.at("failures").get<std::vector<std::vector<uint32_t>>>();
    }
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed scenario JSON: ") +
                                e.what());
  }

  FRCode code;
  if (classes.empty()) {
    code = fr_from_design(design, beta);
  } else {
    if (!res)
      throw std::invalid_argument(
          "scenario chooses classes but the design carries no resolution");
    code = fr_from_classes(design, *res, classes, beta);
  }

  const uint64_t rate = code_rate(code, k).value;
  const uint64_t m = filesize.value_or(rate);
  if (m < 1 || m > rate)
    throw std::invalid_argument("M must lie in [1, R_C(k)]");

  Gf field(2, 16);
  std::mt19937_64 rng(seed);
  std::vector<uint32_t> file(m);
  for (uint32_t& v : file) v = static_cast<uint32_t>(rng() % field.order());

  SystemState state = dss_init(code, k, file, field, rate);

  Json trace = Json::object();
  trace["family"] = design.family;
  trace["code"] = Json{{"theta", code.theta},
                       {"n", code.nodes.size()},
                       {"alpha", code.alpha},
                       {"beta", code.beta},
                       {"d", code.d},
                       {"rho", code.rho},
                       {"rho_res", code.rho_res}};
  trace["k"] = k;
  trace["M"] = m;
  trace["rate"] = rate;
  trace["seed"] = seed;

  bool all_ok = true;
  uint64_t downloads_total = 0;
  Json rounds = Json::array();
  for (const auto& round : failures) {
    std::vector<std::pair<uint32_t, std::vector<CodedSymbol>>> snapshot;
    for (uint32_t v : round) {
      if (v >= state.code.nodes.size())
        throw std::invalid_argument("failed node index out of range");
      snapshot.emplace_back(v, state.node_contents[v]);
    }
    const uint64_t ops_before = field.op_count();
    fail_nodes(state, round);
    RepairOutcome outcome = repair(state);
    const uint64_t payload_ops = field.op_count() - ops_before;

    bool exact = true;
    for (const auto& [v, before] : snapshot) {
      if (state.node_contents[v] != before) exact = false;
    }
    const uint64_t expected =
        snapshot.size() * static_cast<uint64_t>(code.d) * code.beta;
    downloads_total += outcome.downloads;

    Json entry = Json::object();
    entry["failed"] = outcome.plan.failed;
    entry["plan"] = repair_plan_to_json(outcome.plan);
    entry["downloads"] = outcome.downloads;
    entry["expected_downloads"] = expected;
    entry["repair_exact"] = exact;
    entry["payload_field_ops"] = payload_ops;
    rounds.push_back(std::move(entry));
    all_ok = all_ok && exact && payload_ops == 0 &&
             outcome.downloads == expected;
  }
  trace["rounds"] = std::move(rounds);

  const size_t n = code.nodes.size();
  const uint64_t subset_count = binomial_capped(n, k, 10'000);
  const bool exhaustive = subset_count <= 10'000;
  uint64_t checked = 0;
  bool recon_ok = true;
  auto check_subset = [&](const std::vector<uint32_t>& pick) {
    ++checked;
    if (reconstruct(state, pick) != file) recon_ok = false;
  };
  if (exhaustive) {
    std::vector<uint32_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      check_subset(pick);
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
  } else {
    for (int trial = 0; trial < 200; ++trial) {
      std::set<uint32_t> subset;
      for (size_t j = n - k; j < n; ++j) {
        uint32_t cand = static_cast<uint32_t>(rng() % (j + 1));
        if (!subset.insert(cand).second)
          subset.insert(static_cast<uint32_t>(j));
      }
      check_subset({subset.begin(), subset.end()});
    }
  }
  trace["reconstruction"] = Json{
      {"checked", checked}, {"exhaustive", exhaustive}, {"ok", recon_ok}};
  trace["downloads_total"] = downloads_total;
  all_ok = all_ok && recon_ok;
  trace["ok"] = all_ok;
  return trace;
}

}  // namespace frcodes
