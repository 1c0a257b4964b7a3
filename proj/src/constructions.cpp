#include "frcodes/constructions.hpp"

#include <algorithm>
#include <stdexcept>

namespace frcodes {

namespace {

using u128 = unsigned __int128;

u128 ipow128(uint64_t base, uint32_t exp) {
  u128 r = 1;
  for (uint32_t i = 0; i < exp; ++i) {
    if (base != 0 && r > ~u128{0} / base)
      throw std::overflow_error("power exceeds 128 bits");
    r *= base;
  }
  return r;
}

uint64_t checked_pow(uint64_t base, uint32_t exp, uint64_t bound,
                     const char* what) {
  u128 r = ipow128(base, exp);
  if (r > bound) throw std::invalid_argument(what);
  return static_cast<uint64_t>(r);
}

std::string coord_label(uint32_t e, uint32_t q) {
  if (q <= 10) return std::string(1, static_cast<char>('0' + e));
  std::string text = std::to_string(e);
  return std::string(std::to_string(q - 1).size() - text.size(), '0') + text;
}

Gf field_for_order(uint32_t q, const char* what) {
  uint32_t p = 0, s = 0;
  if (!is_prime_power(q, &p, &s)) throw std::invalid_argument(what);
  return Gf(p, s);
}

bool is_latin(const LatinSquare& sq) {
  const uint32_t s = sq.order;
  if (sq.cells.size() != s) return false;
  std::vector<char> seen(s);
  for (uint32_t r = 0; r < s; ++r) {
    if (sq.cells[r].size() != s) return false;
    std::fill(seen.begin(), seen.end(), 0);
    for (uint32_t c = 0; c < s; ++c) {
      uint32_t v = sq.cells[r][c];
      if (v >= s || seen[v]) return false;
      seen[v] = 1;
    }
  }
  for (uint32_t c = 0; c < s; ++c) {
    std::fill(seen.begin(), seen.end(), 0);
    for (uint32_t r = 0; r < s; ++r) {
      uint32_t v = sq.cells[r][c];
      if (seen[v]) return false;
      seen[v] = 1;
    }
  }
  return true;
}

}  // namespace

uint64_t gaussian_coefficient(uint32_t m, uint32_t delta, uint64_t q) {
  if (delta > m) throw std::invalid_argument("delta exceeds m");
  if (q < 2) throw std::invalid_argument("q must be at least 2");
  u128 acc = 1;
  for (uint32_t i = 0; i < delta; ++i) {
    u128 num = ipow128(q, m - i) - 1;
    u128 den = ipow128(q, i + 1) - 1;
    if (num != 0 && acc > ~u128{0} / num)
      throw std::overflow_error("gaussian coefficient overflow");
    acc = acc * num / den;  // every prefix is itself a Gaussian coefficient
  }
  if (acc > UINT64_MAX)
    throw std::overflow_error("gaussian coefficient exceeds 64 bits");
  return static_cast<uint64_t>(acc);
}

ConstructionParams predict_parameters(uint64_t q, uint32_t m, uint32_t delta) {
  if (!is_prime_power(q)) throw std::invalid_argument("q must be a prime power");
  if (delta < 1 || delta >= m)
    throw std::invalid_argument("delta must satisfy 1 <= delta <= m-1");

  ConstructionParams out;
  out.family = "affine-geometry";
  out.theta = static_cast<uint64_t>(ipow128(q, m));
  out.rho = gaussian_coefficient(m, delta, q);
  out.alpha = static_cast<uint64_t>(ipow128(q, delta));
  out.n = static_cast<uint64_t>(ipow128(q, m - delta)) * out.rho;
  out.lambda = gaussian_coefficient(m - 1, delta - 1, q);
  if (delta == m - 1) {
    out.beta = static_cast<uint64_t>(ipow128(q, m - 2));
    out.d = q;
  }
  out.params = Json{{"q", q}, {"m", m}, {"delta", delta}};

  if (out.n * out.alpha != out.theta * out.rho ||
      out.rho * (out.alpha - 1) != out.lambda * (out.theta - 1))
    throw std::logic_error("predicted parameters violate design identities");
  return out;
}

Constructed affine_plane(uint32_t q) {
  Gf field = field_for_order(q, "affine plane order must be a prime power");
  checked_pow(q, 2, kDefaultSymbolBound, "affine plane exceeds symbol bound");
  const uint32_t theta = q * q;

  std::vector<std::string> labels;
  labels.reserve(theta);
  for (uint32_t x = 0; x < q; ++x) {
    for (uint32_t y = 0; y < q; ++y) {
      labels.push_back("(" + coord_label(x, q) + "," + coord_label(y, q) + ")");
    }
  }

  std::vector<std::vector<uint32_t>> blocks;
  blocks.reserve(theta + q);
  Resolution res;
  for (uint32_t a = 0; a < q; ++a) {
    std::vector<size_t> cls;
    for (uint32_t b = 0; b < q; ++b) {
      std::vector<uint32_t> line;
      line.reserve(q);
      for (uint32_t x = 0; x < q; ++x) {
        line.push_back(x * q + field.add(field.mul(a, x), b));
      }
      cls.push_back(blocks.size());
      blocks.push_back(std::move(line));
    }
    res.classes.push_back(std::move(cls));
  }
  std::vector<size_t> verticals;
  for (uint32_t c = 0; c < q; ++c) {
    std::vector<uint32_t> line;
    line.reserve(q);
    for (uint32_t y = 0; y < q; ++y) line.push_back(c * q + y);
    verticals.push_back(blocks.size());
    blocks.push_back(std::move(line));
  }
  res.classes.push_back(std::move(verticals));

  Design d = make_design(theta, std::move(blocks), std::move(labels),
                         "affine-plane", Json{{"q", q}});
  return {std::move(d), std::move(res)};
}

Constructed affine_geometry_hyperplanes(uint32_t q, uint32_t m,
                                        uint64_t symbol_bound) {
  Gf field = field_for_order(q, "affine geometry order must be a prime power");
  if (m < 2) throw std::invalid_argument("affine geometry needs m >= 2");
  const uint64_t theta64 =
      checked_pow(q, m, symbol_bound, "affine geometry exceeds symbol bound");
  const uint32_t theta = static_cast<uint32_t>(theta64);

  // Coordinate i (0-based, first coordinate most significant) of symbol v.
  std::vector<uint64_t> place(m);
  place[m - 1] = 1;
  for (uint32_t i = m - 1; i-- > 0;) place[i] = place[i + 1] * q;

  std::vector<std::string> labels;
  labels.reserve(theta);
  for (uint32_t v = 0; v < theta; ++v) {
    std::string label;
    for (uint32_t i = 0; i < m; ++i) {
      label += coord_label(static_cast<uint32_t>(v / place[i] % q), q);
    }
    labels.push_back(std::move(label));
  }

  // One normal per direction: first nonzero coordinate scaled to 1,
  // enumerated by leading position, then by tail in symbol order.
  std::vector<std::vector<uint32_t>> normals;
  for (uint32_t lead = 0; lead < m; ++lead) {
    const uint64_t tails = static_cast<uint64_t>(ipow128(q, m - lead - 1));
    for (uint64_t t = 0; t < tails; ++t) {
      std::vector<uint32_t> u(m, 0);
      u[lead] = 1;
      uint64_t rem = t;
      for (uint32_t i = m; i-- > lead + 1;) {
        u[i] = static_cast<uint32_t>(rem % q);
        rem /= q;
      }
      normals.push_back(std::move(u));
    }
  }

  std::vector<std::vector<uint32_t>> blocks;
  Resolution res;
  for (const auto& u : normals) {
    std::vector<std::vector<uint32_t>> coset(q);
    for (auto& c : coset) c.reserve(theta / q);
    for (uint32_t v = 0; v < theta; ++v) {
      uint32_t dot = 0;
      for (uint32_t i = 0; i < m; ++i) {
        if (u[i] == 0) continue;
        dot = field.add(dot,
                        field.mul(u[i], static_cast<uint32_t>(v / place[i] % q)));
      }
      coset[dot].push_back(v);
    }
    // Hyperplane through 0 first, then cosets by smallest member.
    std::vector<uint32_t> order(q);
    for (uint32_t c = 0; c < q; ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
      return coset[a].front() < coset[b].front();
    });
    std::vector<size_t> cls;
    for (uint32_t c : order) {
      cls.push_back(blocks.size());
      blocks.push_back(std::move(coset[c]));
    }
    res.classes.push_back(std::move(cls));
  }

  Design d = make_design(theta, std::move(blocks), std::move(labels),
                         "affine-geometry", Json{{"q", q}, {"m", m}});
  return {std::move(d), std::move(res)};
}

DifferenceSet qr_difference_set(uint32_t q) {
  if (q % 4 != 3)
    throw std::invalid_argument("difference set needs q congruent to 3 mod 4");
  Gf field = field_for_order(q, "difference set order must be a prime power");

  DifferenceSet ds{field, quadratic_residues(field), 0};

  std::vector<uint32_t> diff_count(q, 0);
  for (uint32_t a : ds.members) {
    for (uint32_t b : ds.members) {
      if (a != b) ++diff_count[field.sub(a, b)];
    }
  }
  const uint32_t expected = (q - 3) / 4;  // m - 1 with q = 4m - 1
  for (uint32_t g = 1; g < q; ++g) {
    if (diff_count[g] != expected)
      throw std::logic_error("quadratic residues failed the difference property");
  }
  ds.lambda = expected;
  return ds;
}

Design development(const DifferenceSet& ds) {
  const Gf& field = ds.field;
  const uint32_t q = field.order();
  std::vector<std::vector<uint32_t>> blocks;
  blocks.reserve(q);
  for (uint32_t g = 0; g < q; ++g) {
    std::vector<uint32_t> block;
    block.reserve(ds.members.size());
    for (uint32_t d : ds.members) block.push_back(field.add(g, d));
    blocks.push_back(std::move(block));
  }
  std::vector<std::string> labels;
  labels.reserve(q);
  for (uint32_t e = 0; e < q; ++e) labels.push_back(coord_label(e, q));
  return make_design(q, std::move(blocks), std::move(labels), "development",
                     Json{{"q", q}, {"lambda", ds.lambda}});
}

Constructed hadamard_design(uint32_t m) {
  if (m < 1) throw std::invalid_argument("hadamard design needs m >= 1");
  const uint32_t q = 4 * m - 1;
  if (!is_prime_power(q))
    throw std::invalid_argument("hadamard design needs 4m-1 to be a prime power (" +
                                std::to_string(q) + " is not)");
  DifferenceSet ds = qr_difference_set(q);
  const Gf& field = ds.field;
  const uint32_t theta = q + 1;
  const uint32_t infinity = q;  // last symbol index

  std::vector<std::string> labels;
  labels.reserve(theta);
  for (uint32_t e = 0; e < q; ++e) labels.push_back(coord_label(e, q));
  labels.push_back("∞");

  std::vector<std::vector<uint32_t>> blocks;
  blocks.reserve(2 * q);
  Resolution res;
  std::vector<char> in_translate(q);
  for (uint32_t g = 0; g < q; ++g) {
    std::fill(in_translate.begin(), in_translate.end(), 0);
    std::vector<uint32_t> with_inf;
    with_inf.reserve(2 * m);
    for (uint32_t d : ds.members) {
      uint32_t e = field.add(g, d);
      in_translate[e] = 1;
      with_inf.push_back(e);
    }
    with_inf.push_back(infinity);
    std::vector<uint32_t> complement;
    complement.reserve(2 * m);
    for (uint32_t e = 0; e < q; ++e) {
      if (!in_translate[e]) complement.push_back(e);
    }
    res.classes.push_back({blocks.size(), blocks.size() + 1});
    blocks.push_back(std::move(with_inf));
    blocks.push_back(std::move(complement));
  }

  Design d = make_design(theta, std::move(blocks), std::move(labels), "hadamard",
                         Json{{"m", m}, {"q", q}});
  return {std::move(d), std::move(res)};
}

std::vector<LatinSquare> mols_from_field(uint32_t N) {
  uint32_t p = 0, s = 0;
  if (!is_prime_power(N, &p, &s))
    throw std::invalid_argument(
        "order " + std::to_string(N) +
        " is not a prime power; field-based squares do not exist and the "
        "Bose-Shrikhande-Parker constructions are not implemented");
  Gf field(p, s);
  std::vector<LatinSquare> out;
  out.reserve(N - 1);
  for (uint32_t a = 1; a < N; ++a) {
    LatinSquare sq{N, std::vector<std::vector<uint32_t>>(N, std::vector<uint32_t>(N))};
    for (uint32_t r = 0; r < N; ++r) {
      for (uint32_t c = 0; c < N; ++c) sq.cells[r][c] = field.add(field.mul(a, r), c);
    }
    out.push_back(std::move(sq));
  }
  return out;
}

bool check_orthogonal(const LatinSquare& a, const LatinSquare& b) {
  if (a.order != b.order)
    throw std::invalid_argument("orthogonality check needs equal orders");
  const uint32_t s = a.order;
  std::vector<char> seen(static_cast<size_t>(s) * s, 0);
  for (uint32_t r = 0; r < s; ++r) {
    for (uint32_t c = 0; c < s; ++c) {
      size_t pair = static_cast<size_t>(a.cells[r][c]) * s + b.cells[r][c];
      if (seen[pair]) return false;
      seen[pair] = 1;
    }
  }
  return true;
}

Constructed fr_from_mols(uint32_t s, const std::vector<LatinSquare>& squares) {
  if (s < 2) throw std::invalid_argument("array order must be at least 2");
  if (squares.size() > static_cast<size_t>(s) - 1)
    throw std::invalid_argument("at most s-1 squares fit (r-2 <= s-1)");
  for (const auto& sq : squares) {
    if (sq.order != s) throw std::invalid_argument("square order mismatch");
    if (!is_latin(sq)) throw std::invalid_argument("input square is not Latin");
  }
  for (size_t i = 0; i < squares.size(); ++i) {
    for (size_t j = i + 1; j < squares.size(); ++j) {
      if (!check_orthogonal(squares[i], squares[j]))
        throw std::invalid_argument("input squares are not orthogonal");
    }
  }

  const uint32_t theta = s * s;
  std::vector<std::string> labels;
  labels.reserve(theta);
  for (uint32_t v = 1; v <= theta; ++v) labels.push_back(std::to_string(v));

  std::vector<std::vector<uint32_t>> blocks;
  Resolution res;
  auto begin_class = [&] { res.classes.emplace_back(); };
  auto push_block = [&](std::vector<uint32_t> block) {
    res.classes.back().push_back(blocks.size());
    blocks.push_back(std::move(block));
  };

  begin_class();  // rows of the array A(i,j) = i·s + j
  for (uint32_t i = 0; i < s; ++i) {
    std::vector<uint32_t> row;
    row.reserve(s);
    for (uint32_t j = 0; j < s; ++j) row.push_back(i * s + j);
    push_block(std::move(row));
  }
  begin_class();  // columns
  for (uint32_t j = 0; j < s; ++j) {
    std::vector<uint32_t> col;
    col.reserve(s);
    for (uint32_t i = 0; i < s; ++i) col.push_back(i * s + j);
    push_block(std::move(col));
  }
  for (const auto& sq : squares) {  // value-level sets, one class per square
    begin_class();
    std::vector<std::vector<uint32_t>> level(s);
    for (uint32_t i = 0; i < s; ++i) {
      for (uint32_t j = 0; j < s; ++j) level[sq.cells[i][j]].push_back(i * s + j);
    }
    for (uint32_t z = 0; z < s; ++z) push_block(std::move(level[z]));
  }

  const uint32_t r = static_cast<uint32_t>(2 + squares.size());
  std::string family = squares.empty() ? "grid" : "mols";
  Design d = make_design(theta, std::move(blocks), std::move(labels), family,
                         Json{{"s", s}, {"r", r}});
  return {std::move(d), std::move(res)};
}

Design complete_graph_code(uint32_t v) {
  if (v < 2) throw std::invalid_argument("complete graph needs at least 2 nodes");
  const uint32_t theta = v * (v - 1) / 2;
  std::vector<std::vector<uint32_t>> blocks(v);
  uint32_t symbol = 0;
  for (uint32_t i = 0; i < v; ++i) {
    for (uint32_t j = i + 1; j < v; ++j) {
      blocks[i].push_back(symbol);
      blocks[j].push_back(symbol);
      ++symbol;
    }
  }
  std::vector<std::string> labels;
  labels.reserve(theta);
  for (uint32_t t = 1; t <= theta; ++t) labels.push_back("y" + std::to_string(t));
  return make_design(theta, std::move(blocks), std::move(labels), "complete-graph",
                     Json{{"v", v}});
}

}  // namespace frcodes
