#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "owp/bitstring.hpp"
#include "owp/distribution.hpp"
#include "owp/gf2.hpp"
#include "owp/rng.hpp"

namespace owp {

// One member of the 3-wise independent family H_n^k: the degree-2 polynomial
// a*x^2 + b*x + c over GF(2^n), truncated to its top k bits (the first k
// characters of the n-bit output string). Truncation preserves t-wise
// independence, and |family| = 2^{3n} with uniform (a,b,c).
struct HashFunction {
  int n = 0;
  int k = 0;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t c = 0;

  friend bool operator==(const HashFunction&, const HashFunction&) = default;
};

HashFunction sample_hash(int n, int k, SeededRng& rng);

// Full n-bit polynomial value, before truncation.
std::uint32_t eval_full(const HashFunction& h, const BitString& x);

// Truncated evaluation: the first k bits of the field value.
BitString eval(const HashFunction& h, const BitString& x);

// 2 + ceil(3n/8) bytes: one byte n, one byte k, then a|b<<n|c<<2n packed
// little-endian.
std::vector<std::uint8_t> serialize_hash(const HashFunction& h);
HashFunction deserialize_hash(const std::vector<std::uint8_t>& bytes);

struct IndependenceViolation {
  std::vector<BitString> inputs;
  std::vector<BitString> targets;
  std::uint64_t count = 0;     // occurrences over the family
  std::uint64_t expected = 0;  // |family| / 2^{tk}
};

struct IndependenceReport {
  int n = 0;
  int k = 0;
  int t = 0;
  std::uint64_t family_size = 0;
  std::uint64_t tuples_checked = 0;
  std::vector<IndependenceViolation> violations;
  bool passed() const { return violations.empty(); }
};

// Exhaustive t-wise independence check over the whole family (t in {2,3}).
// For every tuple of distinct inputs, every output tuple must occur for
// exactly |family| / 2^{tk} of the (a,b,c) triples. Requires n <= 5.
IndependenceReport verify_t_wise_independence(int n, int k, int t);

// Exact Pr_h[h(x') = h(x)] over the full family, as a fraction of family
// size. For distinct inputs this is 2^{-k} exactly.
Rational exact_collision_rate(int n, int k, const BitString& x, const BitString& x_prime);

}  // namespace owp
