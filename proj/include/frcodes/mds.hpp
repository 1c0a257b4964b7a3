#pragma once

#include <cstdint>
#include <vector>

#include "frcodes/gf.hpp"

namespace frcodes {

/// A coded symbol: position in the codeword plus the field element stored
/// there.
struct CodedSymbol {
  uint32_t index = 0;
  uint32_t value = 0;

  friend bool operator==(const CodedSymbol&, const CodedSymbol&) = default;
};

/// Systematic (code_len, message_len) erasure code by polynomial evaluation.
/// Evaluation points are the first code_len elements in canonical field
/// order; the message occupies the first message_len positions and every
/// parity is the unique degree-(message_len - 1) interpolant evaluated at
/// the remaining points. Any message_len distinct coded symbols determine
/// the message.
class MdsCode {
 public:
  MdsCode(Gf field, uint32_t message_len, uint32_t code_len);

  const Gf& field() const { return field_; }
  uint32_t message_len() const { return message_len_; }
  uint32_t code_len() const { return code_len_; }

  std::vector<uint32_t> encode(const std::vector<uint32_t>& file) const;
  std::vector<uint32_t> decode(const std::vector<CodedSymbol>& available) const;

 private:
  Gf field_;
  uint32_t message_len_;
  uint32_t code_len_;
};

}  // namespace frcodes
