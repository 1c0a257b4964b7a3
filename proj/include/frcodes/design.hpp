#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace frcodes {

using Json = nlohmann::ordered_json;

/// Block design over the symbol set Ω = {0..theta-1}. Blocks hold sorted,
/// deduplicated symbol indices; repeated blocks are allowed (the list is a
/// multiset). Labels give each symbol a display name.
struct Design {
  uint32_t theta = 0;
  std::vector<std::vector<uint32_t>> blocks;
  std::vector<std::string> labels;
  std::string family;
  Json params = Json::object();

  friend bool operator==(const Design&, const Design&) = default;
};

/// Validates symbols, sorts and deduplicates each block, and fills default
/// decimal labels when none are given.
Design make_design(uint32_t theta, std::vector<std::vector<uint32_t>> blocks,
                   std::vector<std::string> labels = {},
                   std::string family = {}, Json params = Json::object());

/// Outcome of BIBD verification. alpha/rho/lambda are meaningful only when
/// the matching uniformity flag is set. Repeated blocks are reported, not
/// rejected.
struct BibdReport {
  bool is_bibd = false;
  bool uniform_block_size = false;
  uint32_t alpha = 0;
  bool uniform_replication = false;
  uint32_t rho = 0;
  bool constant_pair_coverage = false;
  uint32_t lambda = 0;
  uint64_t repeated_blocks = 0;
  std::vector<std::string> violations;
};

/// Checks constant block size, constant replication, and constant pair
/// coverage. When all hold, the counting identities n·alpha = theta·rho and
/// rho·(alpha-1) = lambda·(theta-1) are asserted; a failure there throws
/// std::logic_error since it would mean the counts themselves are wrong.
BibdReport verify_bibd(const Design& design);

/// A partition of the block index set into parallel classes. Class members
/// are kept sorted ascending.
struct Resolution {
  std::vector<std::vector<size_t>> classes;

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

struct ResolutionReport {
  bool ok = false;
  std::vector<std::string> violations;
};

/// True iff every class partitions Ω and the classes partition the block
/// index set. Out-of-range block indices throw std::out_of_range.
ResolutionReport verify_resolution(const Design& design, const Resolution& res);

enum class SearchStatus { found, proved_none, budget_exhausted };

struct ResolutionSearch {
  SearchStatus status = SearchStatus::proved_none;
  Resolution resolution;  // populated iff status == found
  uint64_t nodes = 0;     // backtracking nodes expended
};

/// Exact-cover backtracking for a resolution, blocks tried in index order
/// with first-fit class assembly. Requires uniform nonzero block size;
/// distinguishes a completed refutation from running out of budget.
ResolutionSearch find_resolution(const Design& design,
                                 uint64_t node_budget = 10'000'000);

/// Histograms of pairwise block intersection sizes, split into same-class
/// and different-class pairs.
struct IntersectionProfile {
  std::map<uint32_t, uint64_t> within;
  std::map<uint32_t, uint64_t> cross;
};

IntersectionProfile intersection_profile(const Design& design,
                                         const Resolution& res);

/// n - (theta + rho - 1). Requires a verified resolvable BIBD; zero slack is
/// the affine resolvable case.
int64_t bose_slack(const Design& design, const Resolution& res);

/// Canonical JSON with fixed key order: theta, labels, blocks, resolution,
/// family, params. Resolution serializes as null when absent.
Json design_to_json(const Design& design,
                    const std::optional<Resolution>& res = std::nullopt);

/// Parses and validates the canonical format; throws std::invalid_argument
/// on malformed input.
std::pair<Design, std::optional<Resolution>> design_from_json(const Json& j);

}  // namespace frcodes
