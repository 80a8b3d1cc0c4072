#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowising/errors.hpp"

namespace flowising {

// One byte per binary variable, value 0 or 1. Index 0 is the first character
// of the textual form, and lexicographic comparison of two Bits of equal
// length matches comparison of their strings.
using Bits = std::vector<std::uint8_t>;

inline std::string to_string(std::span<const std::uint8_t> bits) {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) s[i] = '1';
  }
  return s;
}

inline Bits bits_from_string(std::string_view s) {
  Bits out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') {
      out[i] = 1;
    } else if (s[i] != '0') {
      throw SchemaError("assignment string contains a character other than 0/1: '" +
                        std::string(s) + "'");
    }
  }
  return out;
}

inline bool lex_less(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Bits of `full` at the given positions, in the order given.
inline Bits project(std::span<const std::uint8_t> full, std::span<const std::size_t> positions) {
  Bits out;
  out.reserve(positions.size());
  for (auto p : positions) {
    if (p >= full.size()) throw DimensionError("projection index out of range");
    out.push_back(full[p]);
  }
  return out;
}

// Assignment whose bits are the binary digits of `code`, most significant
// digit first, so that counting code upward walks assignments in lexicographic
// order.
inline Bits bits_from_code(std::uint64_t code, std::size_t n) {
  Bits out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (code >> (n - 1 - i)) & 1U;
  return out;
}

}  // namespace flowising
