#include "frcodes/fr_code.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "frcodes/constructions.hpp"
#include "frcodes/design.hpp"

using namespace frcodes;

namespace {

FRCode grid_code() {
  Constructed built = fr_from_mols(3, {});
  return fr_from_classes(built.design, built.resolution, {0, 1}, 1);
}

FRCode hadamard_code(uint32_t m) {
  Constructed built = hadamard_design(m);
  std::vector<size_t> all(built.resolution.classes.size());
  std::iota(all.begin(), all.end(), 0);
  return fr_from_classes(built.design, built.resolution, all, m);
}

FRCode ag33_code() {
  Constructed built = affine_geometry_hyperplanes(3, 3);
  return fr_from_classes(built.design, built.resolution, {0, 1, 2, 3, 4}, 3);
}

// Pairwise intersections of size two, so the union bound does not apply.
FRCode doubled_pair_code() {
  Design d = make_design(4, {{0, 1}, {0, 1}, {2, 3}, {2, 3}});
  return fr_from_design(d, 1);
}

std::vector<uint32_t> sorted_unique(std::vector<uint32_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Independent recovery route: assign each symbol of A to some helper that
// stores it and still has room, by plain backtracking.
std::optional<std::vector<std::vector<uint32_t>>> assign_by_backtracking(
    const FRCode& code, const std::vector<uint32_t>& symbols,
    const std::vector<uint32_t>& helpers) {
  std::vector<uint32_t> a = sorted_unique(symbols);
  std::vector<std::vector<uint32_t>> parts(helpers.size());
  std::vector<uint32_t> room(helpers.size(), code.beta);
  std::function<bool(size_t)> place = [&](size_t i) -> bool {
    if (i == a.size()) return true;
    for (size_t h = 0; h < helpers.size(); ++h) {
      if (room[h] == 0) continue;
      const auto& node = code.nodes[helpers[h]];
      if (!std::binary_search(node.begin(), node.end(), a[i])) continue;
      --room[h];
      parts[h].push_back(a[i]);
      if (place(i + 1)) return true;
      ++room[h];
      parts[h].pop_back();
    }
    return false;
  };
  if (!place(0)) return std::nullopt;
  return parts;
}

void check_assignment(const FRCode& code, const std::vector<uint32_t>& symbols,
                      const std::vector<uint32_t>& helpers,
                      const RecoveryAssignment& got) {
  REQUIRE(got.helpers == helpers);
  REQUIRE(got.parts.size() == helpers.size());
  std::vector<uint32_t> covered;
  for (size_t i = 0; i < got.parts.size(); ++i) {
    CHECK(got.parts[i].size() == code.beta);
    CHECK(std::is_sorted(got.parts[i].begin(), got.parts[i].end()));
    const auto& node = code.nodes[helpers[i]];
    for (uint32_t s : got.parts[i]) {
      CHECK(std::binary_search(node.begin(), node.end(), s));
      covered.push_back(s);
    }
  }
  std::sort(covered.begin(), covered.end());
  CHECK(covered == sorted_unique(symbols));  // disjoint parts covering A
}

std::vector<uint32_t> sample_distinct(std::mt19937_64& rng, uint32_t bound,
                                      size_t want) {
  std::set<uint32_t> seen;
  while (seen.size() < want) {
    seen.insert(static_cast<uint32_t>(rng() % bound));
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

TEST_CASE("grid code from chosen row and column classes") {
  FRCode code = grid_code();
  CHECK(code.theta == 9);
  CHECK(code.nodes.size() == 6);
  CHECK(code.alpha == 3);
  CHECK(code.beta == 1);
  CHECK(code.d == 3);
  CHECK(code.rho == 2);
  CHECK(code.rho_res == 1);
  CHECK(code.pairwise_beta_bounded);
  REQUIRE(code.resolution.has_value());
  CHECK(code.resolution->classes ==
        std::vector<std::vector<size_t>>{{0, 1, 2}, {3, 4, 5}});
  CHECK(code.nodes == std::vector<std::vector<uint32_t>>{{0, 1, 2},
                                                         {3, 4, 5},
                                                         {6, 7, 8},
                                                         {0, 3, 6},
                                                         {1, 4, 7},
                                                         {2, 5, 8}});
}

TEST_CASE("single chosen class leaves no failure headroom") {
  Constructed built = fr_from_mols(3, {});
  FRCode code = fr_from_classes(built.design, built.resolution, {1}, 1);
  CHECK(code.rho == 1);
  CHECK(code.rho_res == 0);
  CHECK(code.nodes.size() == 3);
  CHECK(code.nodes[0] == std::vector<uint32_t>{0, 3, 6});
  CHECK_THROWS_AS(repair_plan(code, {0}), std::invalid_argument);
}

TEST_CASE("five hyperplane classes make a beta-three code") {
  FRCode code = ag33_code();
  CHECK(code.theta == 27);
  CHECK(code.nodes.size() == 15);
  CHECK(code.alpha == 9);
  CHECK(code.beta == 3);
  CHECK(code.d == 3);
  CHECK(code.rho == 5);
  CHECK(code.rho_res == 4);
  CHECK(code.pairwise_beta_bounded);
  REQUIRE(code.resolution.has_value());
  CHECK(code.resolution->classes.size() == 5);
  for (size_t c = 0; c < 5; ++c) {
    CHECK(code.resolution->classes[c] ==
          std::vector<size_t>{3 * c, 3 * c + 1, 3 * c + 2});
  }
}

TEST_CASE("hadamard code spans every translate class") {
  FRCode code = hadamard_code(2);
  CHECK(code.theta == 8);
  CHECK(code.nodes.size() == 14);
  CHECK(code.alpha == 4);
  CHECK(code.beta == 2);
  CHECK(code.d == 2);
  CHECK(code.rho == 7);
  CHECK(code.rho_res == 6);
  CHECK(code.pairwise_beta_bounded);
  CHECK(code.nodes[0] == std::vector<uint32_t>{1, 2, 4, 7});
  CHECK(code.nodes[1] == std::vector<uint32_t>{0, 3, 5, 6});
}

TEST_CASE("storage codes satisfy the replication identity") {
  for (const FRCode& code :
       {grid_code(), ag33_code(), hadamard_code(2), hadamard_code(3),
        fr_from_design(complete_graph_code(5), 1)}) {
    uint64_t stored = static_cast<uint64_t>(code.nodes.size()) * code.alpha;
    CHECK(stored == static_cast<uint64_t>(code.theta) * code.rho);
    CHECK(code.alpha == code.d * code.beta);
  }
}

TEST_CASE("class selection validates its inputs") {
  Constructed built = fr_from_mols(3, {});
  CHECK_THROWS_AS(fr_from_classes(built.design, built.resolution, {}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(fr_from_classes(built.design, built.resolution, {2}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(fr_from_classes(built.design, built.resolution, {0, 1}, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(fr_from_classes(built.design, built.resolution, {0, 1}, 2),
                  std::invalid_argument);
  // beta = 3 divides alpha but the cross intersections are all 1.
  CHECK_THROWS_AS(fr_from_classes(built.design, built.resolution, {0, 1}, 3),
                  std::invalid_argument);

  Constructed had = hadamard_design(2);
  std::vector<size_t> all(had.resolution.classes.size());
  std::iota(all.begin(), all.end(), 0);
  // Cross intersections equal 2, so beta = 1 is inconsistent.
  CHECK_THROWS_AS(fr_from_classes(had.design, had.resolution, all, 1),
                  std::invalid_argument);

  Design lopsided = make_design(4, {{0, 1}, {2, 3}, {0, 2}});
  Resolution bad{{{0, 1}, {2}}};
  CHECK_THROWS_AS(fr_from_classes(lopsided, bad, {1}, 1),
                  std::invalid_argument);
}

TEST_CASE("whole-design codes require a uniform shape") {
  CHECK_THROWS_AS(fr_from_design(make_design(3, {}), 1), std::invalid_argument);
  CHECK_THROWS_AS(fr_from_design(make_design(3, {{0, 1}, {2}}), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(fr_from_design(make_design(3, {{0, 1}, {1, 2}}), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(fr_from_design(make_design(4, {{0, 1}, {2, 3}}), 0),
                  std::invalid_argument);

  FRCode code = fr_from_design(complete_graph_code(5), 1);
  CHECK(code.theta == 10);
  CHECK(code.nodes.size() == 5);
  CHECK(code.alpha == 4);
  CHECK(code.beta == 1);
  CHECK(code.d == 4);
  CHECK(code.rho == 2);
  CHECK(code.rho_res == 1);
  CHECK(code.pairwise_beta_bounded);
  CHECK_FALSE(code.resolution.has_value());

  FRCode doubled = doubled_pair_code();
  CHECK(doubled.rho == 2);
  CHECK_FALSE(doubled.pairwise_beta_bounded);
  CHECK(doubled.rho_res == 0);
}

TEST_CASE("exact code rate enumerates every subset size") {
  FRCode code = grid_code();
  const uint64_t expected[] = {3, 5, 7, 8, 9, 9};
  for (uint32_t k = 1; k <= 6; ++k) {
    RateResult r = code_rate(code, k);
    CHECK(r.exact);
    CHECK(r.value == expected[k - 1]);
    if (k >= 2) CHECK(r.value >= code_rate(code, k - 1).value);
  }
  CHECK(code_rate(code, 1).witness == std::vector<uint32_t>{0});
  CHECK(code_rate(code, 2).witness == std::vector<uint32_t>{0, 3});
  CHECK(code_rate(code, 3).witness == std::vector<uint32_t>{0, 1, 3});
  CHECK_THROWS_AS(code_rate(code, 0), std::invalid_argument);
  CHECK_THROWS_AS(code_rate(code, 7), std::invalid_argument);
}

TEST_CASE("exact code rate respects the subset cap") {
  FRCode code = grid_code();
  RateOptions opt;
  opt.subset_cap = 10;  // C(6,3) = 20
  CHECK_THROWS_AS(code_rate(code, 3, opt), std::invalid_argument);
  opt.subset_cap = 20;
  CHECK(code_rate(code, 3, opt).value == 7);
}

TEST_CASE("sampled code rate is a seeded upper bound") {
  FRCode code = ag33_code();
  RateResult exact = code_rate(code, 3);
  RateOptions opt;
  opt.mode = RateOptions::Mode::sampled;
  opt.trials = 60;
  opt.seed = 7;
  RateResult first = code_rate(code, 3, opt);
  RateResult again = code_rate(code, 3, opt);
  CHECK_FALSE(first.exact);
  CHECK(first.value == again.value);
  CHECK(first.witness == again.witness);
  CHECK(first.value >= exact.value);
  CHECK(first.value <= code.theta);
  CHECK(first.witness.size() == 3);
  CHECK(std::is_sorted(first.witness.begin(), first.witness.end()));
}

TEST_CASE("universal goodness against the filesize floor") {
  FRCode grid = grid_code();
  GoodnessResult g2 = universally_good(grid, 2);
  CHECK(g2.good);
  CHECK(g2.rate == 5);
  CHECK(g2.floor_value == 5);
  CHECK(g2.margin == 0);
  GoodnessResult g3 = universally_good(grid, 3);
  CHECK(g3.good);
  CHECK(g3.rate == 7);
  CHECK(g3.floor_value == 6);
  CHECK(g3.margin == 1);

  FRCode had = hadamard_code(2);
  GoodnessResult h2 = universally_good(had, 2);
  CHECK(h2.good);
  CHECK(h2.rate == 6);
  CHECK(h2.margin == 0);
  CHECK(universally_good(had, 3).good);
  CHECK(universally_good(had, 4).good);

  GoodnessResult h3 = universally_good(hadamard_code(3), 2);
  CHECK(h3.good);
  CHECK(h3.rate == 9);
  CHECK(h3.margin == 0);

  FRCode ag = ag33_code();
  GoodnessResult a2 = universally_good(ag, 2);
  CHECK(a2.rate == 15);
  CHECK(a2.margin == 0);
  GoodnessResult a3 = universally_good(ag, 3);
  CHECK(a3.rate == 18);
  CHECK(a3.margin == 0);
  for (uint32_t k = 1; k <= 5; ++k) CHECK(universally_good(ag, k).good);

  FRCode cg = fr_from_design(complete_graph_code(5), 1);
  for (uint32_t k = 1; k <= 5; ++k) {
    GoodnessResult g = universally_good(cg, k);
    CHECK(g.good);
    CHECK(g.margin == 0);
  }
}

TEST_CASE("goodness flags codes below the floor") {
  FRCode doubled = doubled_pair_code();
  GoodnessResult g = universally_good(doubled, 2);
  CHECK_FALSE(g.good);
  CHECK(g.rate == 2);
  CHECK(g.floor_value == 3);
  CHECK(g.margin == -1);
}

TEST_CASE("recovery splits match worked examples") {
  FRCode grid = grid_code();
  auto row = beta_recoverable(grid, {0, 1, 2}, {3, 4, 5});
  REQUIRE(row.has_value());
  CHECK(row->parts == std::vector<std::vector<uint32_t>>{{0}, {1}, {2}});
  CHECK_FALSE(beta_recoverable(grid, {0, 1, 2}, {1, 2, 3}).has_value());

  FRCode had = hadamard_code(2);
  auto split = beta_recoverable(had, had.nodes[0], {2, 3});
  REQUIRE(split.has_value());
  CHECK(split->parts == std::vector<std::vector<uint32_t>>{{2, 7}, {1, 4}});
  // A block and its complement share nothing with each other's class mate.
  CHECK_FALSE(beta_recoverable(had, had.nodes[0], {1, 3}).has_value());
}

TEST_CASE("recovery validates its inputs") {
  FRCode grid = grid_code();
  CHECK_THROWS_AS(beta_recoverable(grid, {0, 1}, {3, 4, 5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(beta_recoverable(grid, {0, 0, 1}, {3, 4, 5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(beta_recoverable(grid, {0, 1, 9}, {3, 4, 5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(beta_recoverable(grid, {0, 1, 2}, {3, 4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(beta_recoverable(grid, {0, 1, 2}, {3, 3, 4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(beta_recoverable(grid, {0, 1, 2}, {3, 4, 6}),
                  std::invalid_argument);
}

TEST_CASE("flow recovery agrees with the backtracking oracle") {
  std::mt19937_64 rng(20260813);
  for (const FRCode& code : {grid_code(), hadamard_code(2), ag33_code()}) {
    const uint32_t n = static_cast<uint32_t>(code.nodes.size());
    const size_t dbeta = static_cast<size_t>(code.d) * code.beta;
    size_t feasible_seen = 0;
    size_t infeasible_seen = 0;
    for (int trial = 0; trial < 120; ++trial) {
      std::vector<uint32_t> symbols;
      std::vector<uint32_t> helpers;
      if (trial % 2 == 0) {
        uint32_t fail = static_cast<uint32_t>(rng() % n);
        symbols = code.nodes[fail];
        while (helpers.size() < code.d) {
          uint32_t cand = static_cast<uint32_t>(rng() % n);
          if (cand == fail) continue;
          if (std::find(helpers.begin(), helpers.end(), cand) != helpers.end())
            continue;
          helpers.push_back(cand);
        }
        std::sort(helpers.begin(), helpers.end());
      } else {
        symbols = sample_distinct(rng, code.theta, dbeta);
        helpers = sample_distinct(rng, n, code.d);
      }
      auto flow = beta_recoverable(code, symbols, helpers);
      auto oracle = assign_by_backtracking(code, symbols, helpers);
      REQUIRE(flow.has_value() == oracle.has_value());
      if (flow.has_value()) {
        check_assignment(code, symbols, helpers, *flow);
        ++feasible_seen;
      } else {
        ++infeasible_seen;
      }
    }
    CHECK(feasible_seen > 0);
    CHECK(infeasible_seen > 0);
  }
}

TEST_CASE("repair plans come from the lowest intact class") {
  FRCode grid = grid_code();
  RepairPlan plan = repair_plan(grid, {0});
  REQUIRE(plan.failed == std::vector<uint32_t>{0});
  REQUIRE(plan.plans.size() == 1);
  CHECK(plan.plans[0].node == 0);
  REQUIRE(plan.plans[0].helpers.size() == 3);
  CHECK(plan.plans[0].helpers[0].node == 3);
  CHECK(plan.plans[0].helpers[0].symbols == std::vector<uint32_t>{0});
  CHECK(plan.plans[0].helpers[1].node == 4);
  CHECK(plan.plans[0].helpers[1].symbols == std::vector<uint32_t>{1});
  CHECK(plan.plans[0].helpers[2].node == 5);
  CHECK(plan.plans[0].helpers[2].symbols == std::vector<uint32_t>{2});

  // A column failure must draw from the rows instead.
  RepairPlan col = repair_plan(grid, {4});
  REQUIRE(col.plans.size() == 1);
  CHECK(col.plans[0].helpers[0].node == 0);
  CHECK(col.plans[0].helpers[0].symbols == std::vector<uint32_t>{1});

  FRCode ag = ag33_code();
  RepairPlan multi = repair_plan(ag, {9, 0, 6, 3});
  CHECK(multi.failed == std::vector<uint32_t>{0, 3, 6, 9});
  REQUIRE(multi.plans.size() == 4);
  for (const NodeRepair& rep : multi.plans) {
    REQUIRE(rep.helpers.size() == ag.d);
    std::vector<uint32_t> fetched;
    for (const HelperFetch& fetch : rep.helpers) {
      CHECK(fetch.node >= 12);  // class 4 is the first without a failure
      CHECK(fetch.symbols.size() == ag.beta);
      fetched.insert(fetched.end(), fetch.symbols.begin(),
                     fetch.symbols.end());
    }
    std::sort(fetched.begin(), fetched.end());
    CHECK(fetched == ag.nodes[rep.node]);  // exact uncoded copy, gamma = alpha
  }

  FRCode had = hadamard_code(2);
  RepairPlan six = repair_plan(had, {0, 2, 4, 6, 8, 10});
  REQUIRE(six.plans.size() == 6);
  for (const NodeRepair& rep : six.plans) {
    REQUIRE(rep.helpers.size() == 2);
    CHECK(rep.helpers[0].node == 12);
    CHECK(rep.helpers[1].node == 13);
    std::vector<uint32_t> fetched;
    for (const HelperFetch& fetch : rep.helpers) {
      CHECK(fetch.symbols.size() == 2);
      fetched.insert(fetched.end(), fetch.symbols.begin(),
                     fetch.symbols.end());
    }
    std::sort(fetched.begin(), fetched.end());
    CHECK(fetched == had.nodes[rep.node]);
  }
}

TEST_CASE("repair plans search survivors when no resolution exists") {
  FRCode cg = fr_from_design(complete_graph_code(5), 1);
  RepairPlan plan = repair_plan(cg, {0});
  REQUIRE(plan.plans.size() == 1);
  REQUIRE(plan.plans[0].helpers.size() == 4);
  uint64_t fetched = 0;
  for (size_t i = 0; i < 4; ++i) {
    const HelperFetch& fetch = plan.plans[0].helpers[i];
    CHECK(fetch.node == i + 1);
    CHECK(fetch.symbols == std::vector<uint32_t>{static_cast<uint32_t>(i)});
    fetched += fetch.symbols.size();
  }
  CHECK(fetched == static_cast<uint64_t>(cg.d) * cg.beta);

  RepairPlan empty = repair_plan(cg, {});
  CHECK(empty.failed.empty());
  CHECK(empty.plans.empty());

  CHECK_THROWS_AS(repair_plan(cg, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(repair_plan(cg, {5}), std::invalid_argument);
  CHECK_THROWS_WITH_AS(repair_plan(cg, {0}, 0),
                       "helper search budget exhausted repairing node 0",
                       std::runtime_error);
}

TEST_CASE("resilience certification is honest about budgets") {
  ResilienceResult grid = resilience(grid_code());
  CHECK(grid.value == 1);
  CHECK(grid.certified);

  ResilienceResult had = resilience(hadamard_code(2));
  CHECK(had.value == 6);
  CHECK(had.certified);

  Constructed built = fr_from_mols(3, {});
  ResilienceResult lone =
      resilience(fr_from_classes(built.design, built.resolution, {0}, 1));
  CHECK(lone.value == 0);
  CHECK(lone.certified);

  FRCode cg = fr_from_design(complete_graph_code(5), 1);
  ResilienceResult full = resilience(cg);
  CHECK(full.value == 1);
  CHECK(full.certified);
  ResilienceResult starved = resilience(cg, 1);
  CHECK(starved.value == 0);
  CHECK_FALSE(starved.certified);

  ResilienceResult doubled = resilience(doubled_pair_code());
  CHECK(doubled.value == 0);
  CHECK(doubled.certified);  // refuted outright, not a budget artifact
}

TEST_CASE("MBR storage matches uncoded repair") {
  MbrResult whole = mbr_alpha(9, 3, 4);
  CHECK(whole.integral);
  CHECK(whole.alpha == 4);
  CHECK(whole.num == 4);
  CHECK(whole.den == 1);

  MbrResult fifth = mbr_alpha(6, 2, 3);
  CHECK_FALSE(fifth.integral);
  CHECK(fifth.num == 18);
  CHECK(fifth.den == 5);

  MbrResult half = mbr_alpha(3, 3, 3);
  CHECK_FALSE(half.integral);
  CHECK(half.num == 3);
  CHECK(half.den == 2);

  CHECK_THROWS_AS(mbr_alpha(5, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(mbr_alpha(5, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(mbr_alpha(5, 5, 2), std::invalid_argument);
  CHECK_THROWS_AS(mbr_alpha(5, 6, 2), std::invalid_argument);

  // Filling the code to its rate at margin zero lands exactly on alpha.
  struct Case {
    FRCode code;
    uint32_t k;
  };
  for (const Case& c : {Case{grid_code(), 2}, Case{hadamard_code(2), 2},
                        Case{fr_from_design(complete_graph_code(5), 1), 3}}) {
    uint64_t m = code_rate(c.code, c.k).value;
    MbrResult at = mbr_alpha(m, c.k, c.code.d);
    CHECK(at.integral);
    CHECK(at.alpha == c.code.alpha);
  }
}

TEST_CASE("repair plans serialize to stable JSON") {
  FRCode grid = grid_code();
  Json j = repair_plan_to_json(repair_plan(grid, {0}));
  CHECK(j.dump() ==
        R"({"failed":[0],"plans":[{"node":0,"helpers":[)"
        R"({"node":3,"symbols":[0]},{"node":4,"symbols":[1]},)"
        R"({"node":5,"symbols":[2]}]}]})");
  CHECK(repair_plan_to_json(repair_plan(grid, {})).dump() ==
        R"({"failed":[],"plans":[]})");
}
