#include "frcodes/gf.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>

namespace frcodes {

namespace {

// Dense polynomials over GF(p), coefficient of x^i at position i.

using Poly = std::vector<uint32_t>;

void poly_trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& mod, uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Poly prod(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      prod[i + j] = static_cast<uint32_t>(
          (prod[i + j] + static_cast<uint64_t>(a[i]) * b[j]) % p);
    }
  }
  // mod is monic of degree n; cancel leading terms downward.
  const size_t n = mod.size() - 1;
  for (size_t i = prod.size(); i-- > n;) {
    uint32_t c = prod[i];
    if (c == 0) continue;
    for (size_t j = 0; j < n; ++j) {
      uint64_t sub = static_cast<uint64_t>(c) * mod[j] % p;
      prod[i - n + j] = static_cast<uint32_t>((prod[i - n + j] + p - sub) % p);
    }
    prod[i] = 0;
  }
  prod.resize(n);
  poly_trim(prod);
  return prod;
}

Poly poly_powmod(Poly base, uint64_t e, const Poly& mod, uint32_t p) {
  Poly result{1};
  while (e > 0) {
    if (e & 1) result = poly_mulmod(result, base, mod, p);
    base = poly_mulmod(base, base, mod, p);
    e >>= 1;
  }
  return result;
}

Poly poly_sub(Poly a, const Poly& b, uint32_t p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
  poly_trim(a);
  return a;
}

Poly poly_rem(Poly a, const Poly& b, uint32_t p) {
  // b nonzero; divide out leading terms.
  poly_trim(a);
  uint32_t lead_inv = 1;
  {
    // Fermat inverse of b's leading coefficient mod p.
    uint32_t lead = b.back();
    uint64_t acc = 1, base = lead, e = p - 2;
    while (e > 0) {
      if (e & 1) acc = acc * base % p;
      base = base * base % p;
      e >>= 1;
    }
    lead_inv = static_cast<uint32_t>(acc);
  }
  while (a.size() >= b.size() && !a.empty()) {
    uint64_t factor = static_cast<uint64_t>(a.back()) * lead_inv % p;
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) {
      uint64_t sub = factor * b[i] % p;
      a[shift + i] = static_cast<uint32_t>((a[shift + i] + p - sub) % p);
    }
    poly_trim(a);
  }
  return a;
}

Poly poly_gcd(Poly a, Poly b, uint32_t p) {
  poly_trim(a);
  poly_trim(b);
  while (!b.empty()) {
    Poly r = poly_rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Rabin irreducibility test for a monic polynomial of degree n over GF(p).
bool poly_irreducible(const Poly& f, uint32_t p) {
  const size_t n = f.size() - 1;
  if (n == 0) return false;
  if (n == 1) return true;
  std::vector<uint32_t> prime_divs;
  {
    size_t m = n;
    for (uint32_t d = 2; static_cast<size_t>(d) * d <= m; ++d) {
      if (m % d == 0) {
        prime_divs.push_back(d);
        while (m % d == 0) m /= d;
      }
    }
    if (m > 1) prime_divs.push_back(static_cast<uint32_t>(m));
  }
  const Poly x{0, 1};
  // frob[k] = x^(p^k) mod f, built by repeated p-th powers.
  Poly t = x;
  std::vector<Poly> frob(n + 1);
  frob[0] = x;
  for (size_t k = 1; k <= n; ++k) {
    t = poly_powmod(t, p, f, p);
    frob[k] = t;
  }
  if (poly_sub(frob[n], x, p) != Poly{}) return false;
  for (uint32_t r : prime_divs) {
    Poly h = poly_sub(frob[n / r], x, p);
    Poly g = poly_gcd(f, h, p);
    if (g.size() != 1) return false;  // gcd must be a unit
  }
  return true;
}

std::vector<uint32_t> factor_distinct_primes(uint64_t n) {
  std::vector<uint32_t> out;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(static_cast<uint32_t>(d));
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(static_cast<uint32_t>(n));
  return out;
}

}  // namespace

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

bool is_prime_power(uint64_t n, uint32_t* p_out, uint32_t* s_out) {
  if (n < 2) return false;
  uint64_t p = n;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      p = d;
      break;
    }
  }
  uint32_t s = 0;
  uint64_t m = n;
  while (m % p == 0) {
    m /= p;
    ++s;
  }
  if (m != 1) return false;
  if (p_out) *p_out = static_cast<uint32_t>(p);
  if (s_out) *s_out = s;
  return true;
}

struct Gf::Impl {
  uint32_t p = 0;
  uint32_t s = 0;
  uint32_t q = 0;
  std::vector<uint32_t> modulus;       // degree s, monic, constant first
  std::vector<uint32_t> pow_p;         // p^0 .. p^s
  std::vector<uint32_t> exp_table;     // g^i for i in [0, q-1)
  std::vector<uint32_t> log_table;     // log_g, defined for nonzero indices
  mutable std::atomic<uint64_t> ops{0};

  void bump() const { ops.fetch_add(1, std::memory_order_relaxed); }

  uint32_t add_raw(uint32_t a, uint32_t b) const {
    if (s == 1) return (a + b) % p;
    if (p == 2) return a ^ b;
    uint32_t r = 0;
    for (uint32_t i = 0; i < s; ++i) {
      uint32_t da = a / pow_p[i] % p;
      uint32_t db = b / pow_p[i] % p;
      r += (da + db) % p * pow_p[i];
    }
    return r;
  }

  uint32_t neg_raw(uint32_t a) const {
    if (p == 2) return a;
    if (s == 1) return a == 0 ? 0 : p - a;
    uint32_t r = 0;
    for (uint32_t i = 0; i < s; ++i) {
      uint32_t da = a / pow_p[i] % p;
      r += (da == 0 ? 0 : p - da) * pow_p[i];
    }
    return r;
  }

  Poly to_poly(uint32_t a) const {
    Poly c(s, 0);
    for (uint32_t i = 0; i < s; ++i) c[i] = a / pow_p[i] % p;
    poly_trim(c);
    return c;
  }

  uint32_t from_poly(const Poly& c) const {
    uint32_t v = 0;
    for (size_t i = 0; i < c.size(); ++i) v += c[i] * pow_p[i];
    return v;
  }

  uint32_t mul_generic(uint32_t a, uint32_t b) const {
    if (a == 0 || b == 0) return 0;
    return from_poly(poly_mulmod(to_poly(a), to_poly(b), modulus, p));
  }

  uint32_t pow_generic(uint32_t a, uint64_t e) const {
    uint32_t r = 1;
    while (e > 0) {
      if (e & 1) r = mul_generic(r, a);
      a = mul_generic(a, a);
      e >>= 1;
    }
    return r;
  }

  static std::shared_ptr<const Impl> make(uint32_t p, uint32_t s,
                                          std::vector<uint32_t> modulus_opt,
                                          uint32_t order_bound);

  void build_log_tables() {
    if (q == 2) {
      exp_table = {1};
      log_table = {0, 0};
      return;
    }
    const uint64_t group = q - 1;
    const auto primes = factor_distinct_primes(group);
    uint32_t gen = 0;
    for (uint32_t cand = 2; cand < q; ++cand) {
      bool primitive = true;
      for (uint32_t r : primes) {
        if (pow_generic(cand, group / r) == 1) {
          primitive = false;
          break;
        }
      }
      if (primitive) {
        gen = cand;
        break;
      }
    }
    exp_table.resize(group);
    log_table.assign(q, 0);
    uint32_t acc = 1;
    for (uint64_t i = 0; i < group; ++i) {
      exp_table[i] = acc;
      log_table[acc] = static_cast<uint32_t>(i);
      acc = mul_generic(acc, gen);
    }
  }
};

std::shared_ptr<const Gf::Impl> Gf::Impl::make(uint32_t p, uint32_t s,
                                               std::vector<uint32_t> modulus_opt,
                                               uint32_t order_bound) {
  if (!is_prime(p)) throw std::invalid_argument("field characteristic must be prime");
  if (s < 1) throw std::invalid_argument("extension degree must be >= 1");
  uint64_t q = 1;
  for (uint32_t i = 0; i < s; ++i) {
    q *= p;
    if (q > order_bound) throw std::invalid_argument("field order exceeds bound");
  }
  auto impl = std::make_shared<Gf::Impl>();
  impl->p = p;
  impl->s = s;
  impl->q = static_cast<uint32_t>(q);
  impl->pow_p.resize(s + 1);
  impl->pow_p[0] = 1;
  for (uint32_t i = 1; i <= s; ++i) impl->pow_p[i] = impl->pow_p[i - 1] * p;

  if (modulus_opt.empty()) {
    // First irreducible monic degree-s polynomial in element-encoding order.
    for (uint32_t v = 0; v < impl->q; ++v) {
      Poly f(s + 1, 0);
      for (uint32_t i = 0; i < s; ++i) f[i] = v / impl->pow_p[i] % p;
      f[s] = 1;
      if (poly_irreducible(f, p)) {
        impl->modulus = f;
        break;
      }
    }
    if (impl->modulus.empty()) throw std::logic_error("no irreducible modulus found");
  } else {
    if (modulus_opt.size() != s + 1 || modulus_opt.back() != 1)
      throw std::invalid_argument("modulus must be monic of degree s");
    for (uint32_t c : modulus_opt) {
      if (c >= p) throw std::invalid_argument("modulus coefficient out of range");
    }
    if (!poly_irreducible(modulus_opt, p))
      throw std::invalid_argument("modulus is reducible");
    impl->modulus = std::move(modulus_opt);
  }
  impl->build_log_tables();
  return impl;
}

Gf::Gf(uint32_t p, uint32_t s, uint32_t order_bound)
    : impl_(Impl::make(p, s, {}, order_bound)) {}

Gf::Gf(uint32_t p, uint32_t s, std::vector<uint32_t> modulus, uint32_t order_bound)
    : impl_(Impl::make(p, s, std::move(modulus), order_bound)) {}

uint32_t Gf::characteristic() const { return impl_->p; }
uint32_t Gf::degree() const { return impl_->s; }
uint32_t Gf::order() const { return impl_->q; }
const std::vector<uint32_t>& Gf::modulus() const { return impl_->modulus; }

bool Gf::same_spec(const Gf& other) const {
  return impl_ == other.impl_ ||
         (impl_->p == other.impl_->p && impl_->s == other.impl_->s &&
          impl_->modulus == other.impl_->modulus);
}

namespace {
void check_index(uint32_t a, uint32_t q) {
  if (a >= q) throw std::invalid_argument("element index out of range");
}
}  // namespace

uint32_t Gf::add(uint32_t a, uint32_t b) const {
  check_index(a, impl_->q);
  check_index(b, impl_->q);
  impl_->bump();
  return impl_->add_raw(a, b);
}

uint32_t Gf::neg(uint32_t a) const {
  check_index(a, impl_->q);
  impl_->bump();
  return impl_->neg_raw(a);
}

uint32_t Gf::sub(uint32_t a, uint32_t b) const {
  check_index(a, impl_->q);
  check_index(b, impl_->q);
  impl_->bump();
  return impl_->add_raw(a, impl_->neg_raw(b));
}

uint32_t Gf::mul(uint32_t a, uint32_t b) const {
  check_index(a, impl_->q);
  check_index(b, impl_->q);
  impl_->bump();
  if (a == 0 || b == 0) return 0;
  uint64_t e = static_cast<uint64_t>(impl_->log_table[a]) + impl_->log_table[b];
  return impl_->exp_table[e % (impl_->q - 1)];
}

uint32_t Gf::inv(uint32_t a) const {
  check_index(a, impl_->q);
  if (a == 0) throw std::domain_error("inverse of zero");
  impl_->bump();
  uint32_t l = impl_->log_table[a];
  return impl_->exp_table[(impl_->q - 1 - l) % (impl_->q - 1)];
}

uint32_t Gf::pow(uint32_t a, uint64_t e) const {
  check_index(a, impl_->q);
  impl_->bump();
  if (a == 0) return e == 0 ? 1 : 0;
  uint64_t l = static_cast<uint64_t>(impl_->log_table[a]) * (e % (impl_->q - 1));
  return impl_->exp_table[l % (impl_->q - 1)];
}

std::vector<uint32_t> Gf::elements() const {
  std::vector<uint32_t> out(impl_->q);
  for (uint32_t i = 0; i < impl_->q; ++i) out[i] = i;
  return out;
}

std::vector<uint32_t> Gf::coeffs(uint32_t a) const {
  check_index(a, impl_->q);
  std::vector<uint32_t> c(impl_->s);
  for (uint32_t i = 0; i < impl_->s; ++i) c[i] = a / impl_->pow_p[i] % impl_->p;
  return c;
}

uint32_t Gf::from_coeffs(const std::vector<uint32_t>& c) const {
  if (c.size() != impl_->s) throw std::invalid_argument("coefficient count mismatch");
  uint32_t v = 0;
  for (uint32_t i = 0; i < impl_->s; ++i) {
    if (c[i] >= impl_->p) throw std::invalid_argument("coefficient out of range");
    v += c[i] * impl_->pow_p[i];
  }
  return v;
}

GfElem Gf::element(uint32_t a) const { return GfElem(*this, a); }
GfElem Gf::zero() const { return GfElem(*this, 0); }
GfElem Gf::one() const { return GfElem(*this, 1); }

uint64_t Gf::op_count() const { return impl_->ops.load(std::memory_order_relaxed); }

GfElem::GfElem(const Gf& field, uint32_t value) : field_(field), value_(value) {
  if (value >= field.order()) throw std::invalid_argument("element index out of range");
}

namespace {
void check_specs(const Gf& a, const Gf& b) {
  if (!a.same_spec(b)) throw std::invalid_argument("mixed field specs");
}
}  // namespace

GfElem GfElem::operator+(const GfElem& o) const {
  check_specs(field_, o.field_);
  return GfElem(field_, field_.add(value_, o.value_));
}

GfElem GfElem::operator-(const GfElem& o) const {
  check_specs(field_, o.field_);
  return GfElem(field_, field_.sub(value_, o.value_));
}

GfElem GfElem::operator*(const GfElem& o) const {
  check_specs(field_, o.field_);
  return GfElem(field_, field_.mul(value_, o.value_));
}

GfElem GfElem::operator-() const { return GfElem(field_, field_.neg(value_)); }

GfElem GfElem::inverse() const { return GfElem(field_, field_.inv(value_)); }

bool GfElem::operator==(const GfElem& o) const {
  check_specs(field_, o.field_);
  return value_ == o.value_;
}

std::vector<uint32_t> quadratic_residues(const Gf& field) {
  if (field.characteristic() == 2)
    throw std::domain_error("quadratic residues require odd characteristic");
  std::vector<bool> seen(field.order(), false);
  for (uint32_t z = 1; z < field.order(); ++z) seen[field.mul(z, z)] = true;
  std::vector<uint32_t> out;
  for (uint32_t v = 0; v < field.order(); ++v) {
    if (seen[v]) out.push_back(v);
  }
  return out;
}

}  // namespace frcodes
