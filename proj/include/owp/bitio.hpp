#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace owp {

// Append-only bit buffer, MSB-first within the stream.
class BitWriter {
 public:
  void push_bit(int b) { bits_.push_back(b & 1); }
  void push_bits(std::uint64_t value, int width) {
    for (int i = width - 1; i >= 0; --i) push_bit(static_cast<int>((value >> i) & 1));
  }
  // Elias gamma code for v >= 1: floor(log2 v) zeros, then v in binary.
  void push_gamma(std::uint64_t v) {
    if (v < 1) throw std::invalid_argument("gamma code needs v >= 1");
    int width = 0;
    while ((v >> width) > 1) ++width;
    for (int i = 0; i < width; ++i) push_bit(0);
    push_bits(v, width + 1);
  }
  const std::vector<int>& bits() const { return bits_; }
  std::size_t size() const { return bits_.size(); }
  void append(const BitWriter& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
  }

 private:
  std::vector<int> bits_;
};

// Cursor over a bit vector. Reads throw std::out_of_range past the end;
// callers that need "ran out of input" semantics catch that.
class BitReader {
 public:
  explicit BitReader(const std::vector<int>& bits) : bits_(bits) {}

  bool exhausted() const { return pos_ >= bits_.size(); }
  std::size_t position() const { return pos_; }

  int read_bit() {
    if (pos_ >= bits_.size()) throw std::out_of_range("BitReader: out of bits");
    return bits_[pos_++];
  }
  std::uint64_t read_bits(int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(read_bit());
    return v;
  }
  std::uint64_t read_gamma() {
    int zeros = 0;
    while (read_bit() == 0) {
      if (++zeros > 62) throw std::out_of_range("BitReader: gamma code too long");
    }
    std::uint64_t v = 1;
    for (int i = 0; i < zeros; ++i) v = (v << 1) | static_cast<std::uint64_t>(read_bit());
    return v;
  }

 private:
  const std::vector<int>& bits_;
  std::size_t pos_ = 0;
};

inline int gamma_length(std::uint64_t v) {
  int width = 0;
  while ((v >> width) > 1) ++width;
  return 2 * width + 1;
}

}  // namespace owp
