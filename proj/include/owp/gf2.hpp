#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>

namespace owp {
namespace gf2 {

// Fixed modulus table for GF(2^n), n in [1,24]: the lexicographically
// smallest irreducible polynomial of each degree, written with bit i for
// the coefficient of x^i (bit n is the leading term). The table is frozen
// so that serialized hash functions mean the same thing on every build;
// see docs/field_moduli.md. A test re-verifies irreducibility of each entry.
inline constexpr std::uint32_t kModulus[25] = {
    0,         0x3,      0x7,      0xB,       0x13,     0x25,     0x43,      0x83,
    0x11B,     0x203,    0x409,    0x805,     0x1009,   0x201B,   0x4021,    0x8003,
    0x1002B,   0x20009,  0x40009,  0x80027,   0x100009, 0x200005, 0x400003,  0x800021,
    0x100001B,
};

inline void check_width(int n) {
  if (n < 1 || n > 24) throw std::invalid_argument("gf2: width out of range [1,24]");
}

// Carry-less product reduced modulo kModulus[n].
inline std::uint32_t mul(std::uint32_t a, std::uint32_t b, int n) {
  check_width(n);
  std::uint64_t acc = 0;
  std::uint64_t aa = a;
  while (b) {
    if (b & 1u) acc ^= aa;
    aa <<= 1;
    b >>= 1;
  }
  // Reduce the up-to-47-bit product, clearing the top bit each round.
  const std::uint64_t mod = kModulus[n];
  int width = std::bit_width(acc);
  while (width > n) {
    acc ^= mod << (width - 1 - n);
    width = std::bit_width(acc);
  }
  return static_cast<std::uint32_t>(acc);
}

inline std::uint32_t add(std::uint32_t a, std::uint32_t b) { return a ^ b; }

}  // namespace gf2
}  // namespace owp
