#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frcodes/design.hpp"

namespace frcodes {

/// Fractional repetition code: theta symbols spread over n nodes, alpha
/// symbols per node, every symbol on exactly rho nodes, repaired by pulling
/// beta symbols from each of d = alpha/beta helpers.
struct FRCode {
  uint32_t theta = 0;
  std::vector<std::vector<uint32_t>> nodes;  // sorted symbol subsets
  std::vector<std::string> labels;           // per-symbol display names
  uint32_t alpha = 0;
  uint32_t beta = 0;
  uint32_t d = 0;
  uint32_t rho = 0;
  uint32_t rho_res = 0;
  std::optional<Resolution> resolution;  // parallel classes over node indices
  /// True when every pairwise node intersection is at most beta; makes
  /// k·alpha - C(k,2)·beta a valid union lower bound.
  bool pairwise_beta_bounded = false;
};

/// Restricts a resolvable design to the chosen parallel classes. beta must
/// divide alpha and agree with the cross-class intersection profile: either
/// all cross intersections equal beta, or they are all at most 1 and beta
/// is 1. rho = number of chosen classes, rho_res = rho - 1.
FRCode fr_from_classes(const Design& design, const Resolution& res,
                       std::vector<size_t> chosen, uint32_t beta);

/// Wraps a whole design (no resolution required) as an FR code. Requires
/// uniform block size and uniform symbol replication; resilience is
/// certified exhaustively within the budget.
FRCode fr_from_design(const Design& design, uint32_t beta,
                      uint64_t resilience_budget = 1'000'000);

struct RateOptions {
  enum class Mode { exact, sampled } mode = Mode::exact;
  uint64_t trials = 1000;           // sampled mode
  uint64_t seed = 0;                // sampled mode
  uint64_t subset_cap = 10'000'000;  // exact mode enumeration ceiling
};

struct RateResult {
  uint64_t value = 0;             // min union size seen
  bool exact = false;             // full enumeration finished (else upper bound)
  std::vector<uint32_t> witness;  // node subset attaining value
};

/// R_C(k) = min over k-subsets of nodes of their union size. Exact mode
/// enumerates lexicographically (with an early exit once the theoretical
/// floor is reached on beta-bounded codes) and throws when C(n,k) exceeds
/// the cap; sampled mode draws seeded subsets and reports an upper bound.
RateResult code_rate(const FRCode& code, uint32_t k, const RateOptions& opt = {});

struct GoodnessResult {
  bool good = false;
  int64_t margin = 0;     // rate - floor
  uint64_t rate = 0;      // exact R_C(k)
  int64_t floor_value = 0;  // k·alpha - C(k,2)·beta
};

/// Universal goodness at k: exact code rate against the MBR filesize floor.
GoodnessResult universally_good(const FRCode& code, uint32_t k,
                                uint64_t subset_cap = 10'000'000);

/// A feasible split of a symbol set A across d helpers, beta symbols each.
struct RecoveryAssignment {
  std::vector<uint32_t> helpers;             // as supplied
  std::vector<std::vector<uint32_t>> parts;  // parts[i] ⊆ V_helpers[i] ∩ A
};

/// Decides beta-recoverability of A from the given d helpers by maximum
/// flow (source → helper, cap beta; helper → symbol of V_i ∩ A, cap 1;
/// symbol → sink, cap 1). Returns the assignment when the flow saturates A.
std::optional<RecoveryAssignment> beta_recoverable(
    const FRCode& code, const std::vector<uint32_t>& symbols,
    const std::vector<uint32_t>& helpers);

struct HelperFetch {
  uint32_t node = 0;
  std::vector<uint32_t> symbols;
};

struct NodeRepair {
  uint32_t node = 0;
  std::vector<HelperFetch> helpers;
};

struct RepairPlan {
  std::vector<uint32_t> failed;
  std::vector<NodeRepair> plans;
};

/// Deterministic repair plan for a failure set of size at most rho_res.
/// Resolution-bearing codes use the lowest-index parallel class with no
/// failed member and fetch V_fail ∩ V_i from each of its nodes; otherwise
/// d-subsets of survivors are searched in lexicographic order via
/// beta_recoverable, up to the budget.
RepairPlan repair_plan(const FRCode& code, const std::vector<uint32_t>& failed,
                       uint64_t search_budget = 100'000);

struct ResilienceResult {
  uint32_t value = 0;
  bool certified = true;  // false when the budget cut the search short
};

/// rho - 1 for resolution-bearing codes; otherwise the largest f such that
/// every f-subset of nodes can be repaired, checked exhaustively.
ResilienceResult resilience(const FRCode& code, uint64_t budget = 1'000'000);

struct MbrResult {
  uint64_t num = 0;  // reduced numerator of 2Md / (2kd - k² + k)
  uint64_t den = 1;  // reduced denominator
  bool integral = false;
  uint64_t alpha = 0;  // the storage = bandwidth value when integral
};

/// Per-node storage at the minimum-bandwidth-regenerating point, alpha =
/// gamma = 2Md / (2kd - k² + k), reported as a reduced rational.
MbrResult mbr_alpha(uint64_t M, uint32_t k, uint32_t d);

Json repair_plan_to_json(const RepairPlan& plan);

}  // namespace frcodes
