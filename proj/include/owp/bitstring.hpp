#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace owp {

// Fixed-length bit string, n <= 24 bits. Value type, ordered and hashable.
//
// Bits are stored in an integer whose numeric value equals the string read
// MSB-first, so lexicographic order on equal-length strings coincides with
// numeric order on value(). The canonical support ordering everywhere in
// this project is exactly that order.
class BitString {
 public:
  static constexpr int kMaxLen = 24;

  BitString() : value_(0), len_(0) {}

  BitString(std::uint32_t value, int len) : value_(value), len_(static_cast<std::uint8_t>(len)) {
    if (len < 0 || len > kMaxLen) throw std::invalid_argument("BitString: length out of range");
    if (len < 32 && (value >> len) != 0) throw std::invalid_argument("BitString: value wider than length");
  }

  static BitString from_string(const std::string& s) {
    if (s.size() > kMaxLen) throw std::invalid_argument("BitString: string too long");
    std::uint32_t v = 0;
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("BitString: invalid character");
      v = (v << 1) | static_cast<std::uint32_t>(c - '0');
    }
    return BitString(v, static_cast<int>(s.size()));
  }

  static BitString zeros(int len) { return BitString(0, len); }

  std::uint32_t value() const { return value_; }
  int size() const { return len_; }
  bool empty() const { return len_ == 0; }

  // bit(0) is the leftmost (most significant) character.
  int bit(int i) const {
    if (i < 0 || i >= len_) throw std::out_of_range("BitString: bit index");
    return static_cast<int>((value_ >> (len_ - 1 - i)) & 1u);
  }

  std::string to_string() const {
    std::string s(len_, '0');
    for (int i = 0; i < len_; ++i) s[i] = static_cast<char>('0' + bit(i));
    return s;
  }

  // Concatenation; result length must stay within kMaxLen.
  BitString concat(const BitString& other) const {
    int len = len_ + other.len_;
    if (len > kMaxLen) throw std::invalid_argument("BitString: concat overflows max length");
    return BitString((value_ << other.len_) | other.value_, len);
  }

  friend bool operator==(const BitString& a, const BitString& b) {
    return a.len_ == b.len_ && a.value_ == b.value_;
  }
  friend bool operator!=(const BitString& a, const BitString& b) { return !(a == b); }
  friend bool operator<(const BitString& a, const BitString& b) {
    if (a.len_ != b.len_) return a.len_ < b.len_;
    return a.value_ < b.value_;
  }

 private:
  std::uint32_t value_;
  std::uint8_t len_;
};

}  // namespace owp

template <>
struct std::hash<owp::BitString> {
  std::size_t operator()(const owp::BitString& b) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(b.size()) << 32) | b.value());
  }
};
