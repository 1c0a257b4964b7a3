#include "frcodes/design.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <stdexcept>

namespace frcodes {

namespace {

using Mask = std::vector<uint64_t>;

Mask block_mask(const std::vector<uint32_t>& block, uint32_t theta) {
  Mask m((theta + 63) / 64, 0);
  for (uint32_t s : block) m[s >> 6] |= uint64_t{1} << (s & 63);
  return m;
}

bool masks_disjoint(const Mask& a, const Mask& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] & b[i]) return false;
  }
  return true;
}

uint32_t masks_overlap(const Mask& a, const Mask& b) {
  uint32_t c = 0;
  for (size_t i = 0; i < a.size(); ++i) c += std::popcount(a[i] & b[i]);
  return c;
}

}  // namespace

Design make_design(uint32_t theta, std::vector<std::vector<uint32_t>> blocks,
                   std::vector<std::string> labels, std::string family,
                   Json params) {
  if (theta == 0) throw std::invalid_argument("design needs at least one symbol");
  for (auto& b : blocks) {
    for (uint32_t s : b) {
      if (s >= theta) throw std::invalid_argument("block symbol out of range");
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
  }
  if (labels.empty()) {
    labels.reserve(theta);
    for (uint32_t s = 0; s < theta; ++s) labels.push_back(std::to_string(s));
  } else if (labels.size() != theta) {
    throw std::invalid_argument("label count must equal theta");
  }
  return Design{theta, std::move(blocks), std::move(labels), std::move(family),
                std::move(params)};
}

BibdReport verify_bibd(const Design& design) {
  if (design.theta < 2) throw std::invalid_argument("BIBD needs theta >= 2");
  if (design.blocks.empty()) throw std::invalid_argument("BIBD needs blocks");

  const uint32_t theta = design.theta;
  const uint64_t n = design.blocks.size();
  BibdReport rep;

  size_t min_size = design.blocks.front().size();
  size_t max_size = min_size;
  for (const auto& b : design.blocks) {
    min_size = std::min(min_size, b.size());
    max_size = std::max(max_size, b.size());
  }
  rep.uniform_block_size = min_size == max_size;
  if (rep.uniform_block_size) {
    rep.alpha = static_cast<uint32_t>(min_size);
  } else {
    rep.violations.push_back("block sizes vary between " +
                             std::to_string(min_size) + " and " +
                             std::to_string(max_size));
  }

  std::vector<uint64_t> replication(theta, 0);
  for (const auto& b : design.blocks) {
    for (uint32_t s : b) ++replication[s];
  }
  rep.uniform_replication =
      std::all_of(replication.begin(), replication.end(),
                  [&](uint64_t r) { return r == replication[0]; });
  if (rep.uniform_replication) {
    rep.rho = static_cast<uint32_t>(replication[0]);
  } else {
    auto [lo, hi] = std::minmax_element(replication.begin(), replication.end());
    rep.violations.push_back(
        "replication varies: symbol " +
        std::to_string(lo - replication.begin()) + " in " +
        std::to_string(*lo) + " blocks, symbol " +
        std::to_string(hi - replication.begin()) + " in " +
        std::to_string(*hi));
  }

  // Pair coverage over the upper triangle of Ω × Ω.
  std::vector<uint32_t> pairs(static_cast<size_t>(theta) * theta, 0);
  for (const auto& b : design.blocks) {
    for (size_t i = 0; i < b.size(); ++i) {
      for (size_t j = i + 1; j < b.size(); ++j) {
        ++pairs[static_cast<size_t>(b[i]) * theta + b[j]];
      }
    }
  }
  uint32_t lambda0 = pairs[1];  // pair (0, 1)
  rep.constant_pair_coverage = true;
  for (uint32_t i = 0; i < theta && rep.constant_pair_coverage; ++i) {
    for (uint32_t j = i + 1; j < theta; ++j) {
      uint32_t c = pairs[static_cast<size_t>(i) * theta + j];
      if (c != lambda0) {
        rep.constant_pair_coverage = false;
        rep.violations.push_back("pair (0,1) covered " + std::to_string(lambda0) +
                                 " times but pair (" + std::to_string(i) + "," +
                                 std::to_string(j) + ") covered " +
                                 std::to_string(c));
        break;
      }
    }
  }
  if (rep.constant_pair_coverage) {
    rep.lambda = lambda0;
    if (lambda0 == 0) rep.violations.push_back("no pair is covered by any block");
  }

  {
    std::set<std::vector<uint32_t>> distinct(design.blocks.begin(),
                                             design.blocks.end());
    rep.repeated_blocks = n - distinct.size();
  }

  rep.is_bibd = rep.uniform_block_size && rep.uniform_replication &&
                rep.constant_pair_coverage && rep.lambda >= 1;
  if (rep.is_bibd) {
    bool eq1 = n * rep.alpha == uint64_t{theta} * rep.rho;
    bool eq2 = uint64_t{rep.rho} * (rep.alpha - 1) ==
               uint64_t{rep.lambda} * (theta - 1);
    if (!eq1 || !eq2) throw std::logic_error("BIBD counting identities failed");
  }
  return rep;
}

ResolutionReport verify_resolution(const Design& design, const Resolution& res) {
  const size_t n = design.blocks.size();
  ResolutionReport rep;

  std::vector<uint32_t> used(n, 0);
  for (size_t c = 0; c < res.classes.size(); ++c) {
    for (size_t idx : res.classes[c]) {
      if (idx >= n) throw std::out_of_range("block index out of range");
      ++used[idx];
    }
  }
  for (size_t b = 0; b < n; ++b) {
    if (used[b] == 0) {
      rep.violations.push_back("block " + std::to_string(b) + " is in no class");
    } else if (used[b] > 1) {
      rep.violations.push_back("block " + std::to_string(b) + " is in " +
                               std::to_string(used[b]) + " classes");
    }
  }

  std::vector<uint32_t> cover(design.theta);
  for (size_t c = 0; c < res.classes.size(); ++c) {
    std::fill(cover.begin(), cover.end(), 0);
    for (size_t idx : res.classes[c]) {
      for (uint32_t s : design.blocks[idx]) ++cover[s];
    }
    for (uint32_t s = 0; s < design.theta; ++s) {
      if (cover[s] != 1) {
        rep.violations.push_back("class " + std::to_string(c) + " covers symbol " +
                                 std::to_string(s) + " " +
                                 std::to_string(cover[s]) + " times");
      }
    }
  }

  rep.ok = rep.violations.empty();
  return rep;
}

namespace {

struct ResolutionSearcher {
  const Design& design;
  uint64_t budget;
  std::vector<Mask> masks;
  std::vector<std::vector<size_t>> by_symbol;
  std::vector<char> used;
  std::vector<std::vector<size_t>> classes;
  uint64_t nodes = 0;
  bool exhausted = false;

  ResolutionSearcher(const Design& d, uint64_t b) : design(d), budget(b) {
    const size_t n = d.blocks.size();
    masks.reserve(n);
    for (const auto& blk : d.blocks) masks.push_back(block_mask(blk, d.theta));
    by_symbol.assign(d.theta, {});
    for (size_t i = 0; i < n; ++i) {
      for (uint32_t s : d.blocks[i]) by_symbol[s].push_back(i);
    }
    used.assign(n, 0);
  }

  bool spend() {
    if (++nodes > budget) {
      exhausted = true;
      return false;
    }
    return true;
  }

  bool next_class() {
    size_t seed = 0;
    while (seed < used.size() && used[seed]) ++seed;
    if (seed == used.size()) return true;  // every block assigned
    if (!spend()) return false;
    used[seed] = 1;
    classes.push_back({seed});
    Mask covered = masks[seed];
    if (extend_class(covered)) return true;
    classes.pop_back();
    used[seed] = 0;
    return false;
  }

  bool extend_class(Mask& covered) {
    uint32_t missing = design.theta;
    for (uint32_t s = 0; s < design.theta; ++s) {
      if (!(covered[s >> 6] >> (s & 63) & 1)) {
        missing = s;
        break;
      }
    }
    if (missing == design.theta) return next_class();

    const Mask* last_tried = nullptr;
    for (size_t cand : by_symbol[missing]) {
      if (used[cand]) continue;
      if (!masks_disjoint(masks[cand], covered)) continue;
      if (last_tried && masks[cand] == *last_tried) continue;  // identical block
      if (!spend()) return false;
      last_tried = &masks[cand];
      used[cand] = 1;
      classes.back().push_back(cand);
      for (size_t w = 0; w < covered.size(); ++w) covered[w] |= masks[cand][w];
      if (extend_class(covered)) return true;
      if (exhausted) return false;
      for (size_t w = 0; w < covered.size(); ++w) covered[w] &= ~masks[cand][w];
      classes.back().pop_back();
      used[cand] = 0;
    }
    return false;
  }
};

}  // namespace

ResolutionSearch find_resolution(const Design& design, uint64_t node_budget) {
  if (design.blocks.empty()) throw std::invalid_argument("design has no blocks");
  const size_t alpha = design.blocks.front().size();
  for (const auto& b : design.blocks) {
    if (b.size() != alpha)
      throw std::invalid_argument("resolution search needs uniform block size");
  }
  if (alpha == 0) throw std::invalid_argument("blocks are empty");

  ResolutionSearch out;
  if (design.theta % alpha != 0) return out;  // classes cannot partition Ω
  const size_t class_size = design.theta / alpha;
  if (design.blocks.size() % class_size != 0) return out;
  const size_t r = design.blocks.size() / class_size;
  std::vector<uint64_t> replication(design.theta, 0);
  for (const auto& b : design.blocks) {
    for (uint32_t s : b) ++replication[s];
  }
  for (uint64_t rep : replication) {
    if (rep != r) return out;  // each class covers each symbol exactly once
  }

  ResolutionSearcher searcher(design, node_budget);
  bool found = searcher.next_class();
  out.nodes = searcher.nodes;
  if (found) {
    out.status = SearchStatus::found;
    for (auto& cls : searcher.classes) std::sort(cls.begin(), cls.end());
    out.resolution.classes = std::move(searcher.classes);
  } else if (searcher.exhausted) {
    out.status = SearchStatus::budget_exhausted;
  }
  return out;
}

IntersectionProfile intersection_profile(const Design& design,
                                         const Resolution& res) {
  const size_t n = design.blocks.size();
  std::vector<int64_t> class_of(n, -1);
  for (size_t c = 0; c < res.classes.size(); ++c) {
    for (size_t idx : res.classes[c]) {
      if (idx >= n) throw std::out_of_range("block index out of range");
      class_of[idx] = static_cast<int64_t>(c);
    }
  }
  std::vector<Mask> masks;
  masks.reserve(n);
  for (const auto& b : design.blocks) masks.push_back(block_mask(b, design.theta));

  IntersectionProfile prof;
  for (size_t i = 0; i < n; ++i) {
    if (class_of[i] < 0) continue;
    for (size_t j = i + 1; j < n; ++j) {
      if (class_of[j] < 0) continue;
      uint32_t overlap = masks_overlap(masks[i], masks[j]);
      if (class_of[i] == class_of[j]) {
        ++prof.within[overlap];
      } else {
        ++prof.cross[overlap];
      }
    }
  }
  return prof;
}

int64_t bose_slack(const Design& design, const Resolution& res) {
  BibdReport bibd = verify_bibd(design);
  if (!bibd.is_bibd)
    throw std::invalid_argument("bose_slack needs a BIBD: " +
                                (bibd.violations.empty()
                                     ? std::string("unknown violation")
                                     : bibd.violations.front()));
  ResolutionReport rr = verify_resolution(design, res);
  if (!rr.ok)
    throw std::invalid_argument("bose_slack needs a valid resolution: " +
                                rr.violations.front());
  return static_cast<int64_t>(design.blocks.size()) -
         (static_cast<int64_t>(design.theta) + bibd.rho - 1);
}

Json design_to_json(const Design& design, const std::optional<Resolution>& res) {
  Json j = Json::object();
  j["theta"] = design.theta;
  j["labels"] = design.labels;
  j["blocks"] = design.blocks;
  if (res) {
    j["resolution"] = res->classes;
  } else {
    j["resolution"] = nullptr;
  }
  j["family"] = design.family;
  j["params"] = design.params;
  return j;
}

std::pair<Design, std::optional<Resolution>> design_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw std::invalid_argument("design JSON must be an object");
    for (const char* key : {"theta", "labels", "blocks", "resolution", "family",
                            "params"}) {
      if (!j.contains(key))
        throw std::invalid_argument(std::string("design JSON missing key: ") + key);
    }
    Design d = make_design(j.at("theta").get<uint32_t>(),
                           j.at("blocks").get<std::vector<std::vector<uint32_t>>>(),
                           j.at("labels").get<std::vector<std::string>>(),
                           j.at("family").get<std::string>(), j.at("params"));
    std::optional<Resolution> res;
    if (!j.at("resolution").is_null()) {
      res = Resolution{j.at("resolution").get<std::vector<std::vector<size_t>>>()};
      for (const auto& cls : res->classes) {
        for (size_t idx : cls) {
          if (idx >= d.blocks.size())
            throw std::invalid_argument("resolution references missing block");
        }
      }
    }
    return {std::move(d), std::move(res)};
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed design JSON: ") + e.what());
  }
}

}  // namespace frcodes
