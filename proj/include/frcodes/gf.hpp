#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace frcodes {

/// Largest field order a Gf will construct (inclusive). GF(2^16) is the
/// default codec field, so the bound admits it exactly.
inline constexpr uint32_t kDefaultFieldOrderBound = 1u << 16;

bool is_prime(uint64_t n);

/// Decomposes n as p^s for prime p. Returns false if n is not a prime power.
bool is_prime_power(uint64_t n, uint32_t* p_out = nullptr, uint32_t* s_out = nullptr);

class GfElem;

/// Exact arithmetic over GF(p^s).
///
/// Elements are addressed by index in [0, q). The index encodes the
/// coefficient vector of the residue polynomial in base p with the constant
/// coefficient least significant, so index order is the canonical element
/// order and index 0 is the additive identity, index 1 the multiplicative
/// identity. The modulus is the first monic irreducible polynomial of degree
/// s in that same encoding order, found by exhaustive search, so a (p, s)
/// pair names one field reproducibly.
class Gf {
 public:
  Gf(uint32_t p, uint32_t s, uint32_t order_bound = kDefaultFieldOrderBound);
  Gf(uint32_t p, uint32_t s, std::vector<uint32_t> modulus,
     uint32_t order_bound = kDefaultFieldOrderBound);

  uint32_t characteristic() const;
  uint32_t degree() const;
  uint32_t order() const;
  /// Modulus coefficients, constant first, length degree()+1, monic.
  const std::vector<uint32_t>& modulus() const;

  bool same_spec(const Gf& other) const;

  uint32_t add(uint32_t a, uint32_t b) const;
  uint32_t sub(uint32_t a, uint32_t b) const;
  uint32_t neg(uint32_t a) const;
  uint32_t mul(uint32_t a, uint32_t b) const;
  uint32_t inv(uint32_t a) const;  // throws std::domain_error on 0
  uint32_t pow(uint32_t a, uint64_t e) const;

  /// All q elements in canonical order (identity: the index sequence 0..q-1).
  std::vector<uint32_t> elements() const;

  /// Coefficient vector of an element, constant coefficient first, length s.
  std::vector<uint32_t> coeffs(uint32_t a) const;
  uint32_t from_coeffs(const std::vector<uint32_t>& c) const;

  GfElem element(uint32_t a) const;
  GfElem zero() const;
  GfElem one() const;

  /// Total arithmetic operations performed through this field since
  /// construction. Used to audit copy-only code paths.
  uint64_t op_count() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  friend class GfElem;
};

/// A field element bound to its field; arithmetic between elements of
/// different specs throws std::invalid_argument.
class GfElem {
 public:
  GfElem(const Gf& field, uint32_t value);

  uint32_t value() const { return value_; }
  const Gf& field() const { return field_; }

  GfElem operator+(const GfElem& o) const;
  GfElem operator-(const GfElem& o) const;
  GfElem operator*(const GfElem& o) const;
  GfElem operator-() const;
  GfElem inverse() const;
  bool operator==(const GfElem& o) const;

 private:
  Gf field_;
  uint32_t value_;
};

/// Nonzero squares {z^2 : z in F_q, z != 0}, sorted by element index.
/// Requires odd characteristic; the result has (q-1)/2 members.
std::vector<uint32_t> quadratic_residues(const Gf& field);

}  // namespace frcodes
