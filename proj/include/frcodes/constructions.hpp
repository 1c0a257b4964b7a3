#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frcodes/design.hpp"
#include "frcodes/gf.hpp"

namespace frcodes {

/// Symbol-count ceiling for generated designs.
inline constexpr uint64_t kDefaultSymbolBound = 1u << 20;

/// Gaussian binomial coefficient: the product over i < delta of
/// (q^(m-i) - 1) / (q^(i+1) - 1), evaluated exactly. 1 when delta is 0 or m.
uint64_t gaussian_coefficient(uint32_t m, uint32_t delta, uint64_t q);

/// Parameters a delta-flat design on F_q^m must have. beta and d are filled
/// for the hyperplane case delta = m-1, where blocks from distinct parallel
/// classes meet in beta = q^(m-2) points and repair degree d = q.
struct ConstructionParams {
  std::string family;
  uint64_t theta = 0;
  uint64_t n = 0;
  uint64_t alpha = 0;
  uint64_t rho = 0;
  uint64_t lambda = 0;
  std::optional<uint64_t> beta;
  std::optional<uint64_t> d;
  Json params = Json::object();
};

ConstructionParams predict_parameters(uint64_t q, uint32_t m, uint32_t delta);

/// A design together with its construction-time resolution.
struct Constructed {
  Design design;
  Resolution resolution;
};

/// Affine plane of order q: symbols (x, y) over F_q, lines y = ax + b plus
/// the verticals, q+1 parallel classes of q lines each.
Constructed affine_plane(uint32_t q);

/// Hyperplane design of the affine geometry on F_q^m: for each of the
/// (q^m-1)/(q-1) normal directions, the hyperplane through the origin and
/// its q-1 additive cosets form one parallel class.
Constructed affine_geometry_hyperplanes(uint32_t q, uint32_t m,
                                        uint64_t symbol_bound = kDefaultSymbolBound);

/// Difference set in the additive group of F_q: every nonzero group element
/// arises as a member difference exactly lambda times.
struct DifferenceSet {
  Gf field;
  std::vector<uint32_t> members;
  uint32_t lambda = 0;
};

/// Quadratic-residue difference set for q = 4m-1: the (q-1)/2 nonzero
/// squares form a (4m-1, 2m-1, m-1)-difference set. Requires q an odd prime
/// power congruent to 3 mod 4; the difference property is re-verified
/// exhaustively at construction.
DifferenceSet qr_difference_set(uint32_t q);

/// Development of a difference set: the block g + D for every group element
/// g, a (theta, theta, alpha, alpha, lambda)-BIBD.
Design development(const DifferenceSet& ds);

/// Hadamard design on 4m symbols F_q ∪ {∞}, q = 4m-1: each translate B of
/// the quadratic-residue development yields the parallel class
/// {B ∪ {∞}, complement of B}.
Constructed hadamard_design(uint32_t m);

struct LatinSquare {
  uint32_t order = 0;
  std::vector<std::vector<uint32_t>> cells;  // cells[row][col] in [0, order)

  friend bool operator==(const LatinSquare&, const LatinSquare&) = default;
};

/// The N-1 field-based squares L_a(r, c) = a·r + c over GF(N) for nonzero a,
/// pairwise orthogonal. Composite non-prime-power orders are rejected.
std::vector<LatinSquare> mols_from_field(uint32_t N);

/// True iff superposing the squares attains every ordered value pair exactly
/// once.
bool check_orthogonal(const LatinSquare& a, const LatinSquare& b);

/// FR code from an s×s symbol array: parallel classes are the rows, the
/// columns, and the value-level sets of each supplied square. With no
/// squares this is the two-class grid code.
Constructed fr_from_mols(uint32_t s, const std::vector<LatinSquare>& squares);

/// One symbol per unordered pair of nodes; node i stores the v-1 symbols of
/// the pairs containing i (every symbol replicated twice).
Design complete_graph_code(uint32_t v);

}  // namespace frcodes
