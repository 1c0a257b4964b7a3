#include "frcodes/mds.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace frcodes {

namespace {

// Barycentric weights w_i = 1 / prod_{j != i} (x_i - x_j) for the given
// sample points, so each later evaluation costs O(#points).
std::vector<uint32_t> barycentric_weights(const Gf& field,
                                          const std::vector<uint32_t>& xs) {
  std::vector<uint32_t> ws(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    uint32_t prod = 1;
    for (size_t j = 0; j < xs.size(); ++j) {
      if (j == i) continue;
      prod = field.mul(prod, field.sub(xs[i], xs[j]));
    }
    ws[i] = field.inv(prod);
  }
  return ws;
}

// Evaluates the interpolant through (xs, ys) at x, assuming x is not a
// sample point.
uint32_t evaluate_off_sample(const Gf& field, const std::vector<uint32_t>& xs,
                             const std::vector<uint32_t>& ys,
                             const std::vector<uint32_t>& ws, uint32_t x) {
  uint32_t master = 1;
  for (uint32_t xi : xs) master = field.mul(master, field.sub(x, xi));
  uint32_t acc = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    uint32_t basis = field.mul(master, field.inv(field.sub(x, xs[i])));
    acc = field.add(acc, field.mul(ys[i], field.mul(ws[i], basis)));
  }
  return acc;
}

}  // namespace

MdsCode::MdsCode(Gf field, uint32_t message_len, uint32_t code_len)
    : field_(std::move(field)), message_len_(message_len), code_len_(code_len) {
  if (message_len_ == 0)
    throw std::invalid_argument("message length must be positive");
  if (message_len_ > code_len_)
    throw std::invalid_argument("message length exceeds the codeword length");
  if (code_len_ >= field_.order())
    throw std::invalid_argument(
        "codeword length requires as many distinct evaluation points, which "
        "the field order does not provide");
}

std::vector<uint32_t> MdsCode::encode(const std::vector<uint32_t>& file) const {
  if (file.size() != message_len_)
    throw std::invalid_argument("file size must equal the message length");
  for (uint32_t v : file) {
    if (v >= field_.order())
      throw std::invalid_argument("file symbol is not a field element");
  }

  std::vector<uint32_t> coded(file);
  coded.resize(code_len_);
  if (code_len_ == message_len_) return coded;

  std::vector<uint32_t> xs(message_len_);
  for (uint32_t i = 0; i < message_len_; ++i) xs[i] = i;
  std::vector<uint32_t> ws = barycentric_weights(field_, xs);
  for (uint32_t t = message_len_; t < code_len_; ++t) {
    coded[t] = evaluate_off_sample(field_, xs, file, ws, t);
  }
  return coded;
}

std::vector<uint32_t> MdsCode::decode(
    const std::vector<CodedSymbol>& available) const {
  std::map<uint32_t, uint32_t> by_index;
  for (const CodedSymbol& sym : available) {
    if (sym.index >= code_len_)
      throw std::invalid_argument("coded symbol index out of range");
    if (sym.value >= field_.order())
      throw std::invalid_argument("coded symbol is not a field element");
    auto [it, inserted] = by_index.emplace(sym.index, sym.value);
    if (!inserted && it->second != sym.value)
      throw std::invalid_argument("conflicting values for coded symbol " +
                                  std::to_string(sym.index));
  }
  if (by_index.size() < message_len_)
    throw std::invalid_argument(
        "decoding needs at least message-length distinct coded symbols");

  std::vector<uint32_t> xs, ys;
  for (const auto& [index, value] : by_index) {
    if (xs.size() == message_len_) break;
    xs.push_back(index);
    ys.push_back(value);
  }

  std::vector<uint32_t> file(message_len_);
  std::vector<uint32_t> ws = barycentric_weights(field_, xs);
  for (uint32_t j = 0; j < message_len_; ++j) {
    auto hit = std::lower_bound(xs.begin(), xs.end(), j);
    if (hit != xs.end() && *hit == j) {
      file[j] = ys[static_cast<size_t>(hit - xs.begin())];
    } else {
      file[j] = evaluate_off_sample(field_, xs, ys, ws, j);
    }
  }
  return file;
}

}  // namespace frcodes
