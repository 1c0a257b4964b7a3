#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "frcodes/fr_code.hpp"
#include "frcodes/mds.hpp"

namespace frcodes {

/// Concatenated storage system: the file is MDS-encoded into theta coded
/// symbols and codeword[j] is copied onto every node whose block contains j.
/// Mutate only through fail_nodes/repair; reads are safe between mutations.
struct SystemState {
  FRCode code;
  MdsCode mds;
  uint32_t k = 0;
  std::vector<uint32_t> file;
  std::vector<uint32_t> codeword;
  std::vector<std::vector<CodedSymbol>> node_contents;  // empty while failed
  std::set<uint32_t> failed;
  uint64_t download_counter = 0;  // packets fetched by the last repair
};

/// Encodes the file and populates every node. The file must fit the code
/// rate at k; pass rate_bound to skip the exact rate computation when it is
/// already known.
SystemState dss_init(const FRCode& code, uint32_t k,
                     const std::vector<uint32_t>& file, const Gf& field,
                     std::optional<uint64_t> rate_bound = std::nullopt);

/// Erases the given nodes. Rejects, leaving the state unchanged, any set
/// that would push the failure count past rho_res.
void fail_nodes(SystemState& state, const std::vector<uint32_t>& nodes);

struct RepairOutcome {
  RepairPlan plan;
  uint64_t downloads = 0;
};

/// Restores every failed node by copying beta packets from each of its d
/// helpers per the repair plan. Table lookups only: no field arithmetic
/// touches the payloads.
RepairOutcome repair(SystemState& state);

/// Contacts the k given live nodes and decodes their distinct coded symbols
/// back into the file.
std::vector<uint32_t> reconstruct(const SystemState& state,
                                  const std::vector<uint32_t>& nodes);

/// Executes a scenario document against an already-loaded design document:
/// builds the code, seeds the file, runs each failure round through
/// fail_nodes + repair, then checks reconstruction across k-subsets.
/// Returns the trace; its "ok" field is the overall verdict.
Json run_scenario(const Json& scenario, const Json& design_doc);

}  // namespace frcodes
