#include "owp/hashing.hpp"

#include <stdexcept>

namespace owp {

HashFunction sample_hash(int n, int k, SeededRng& rng) {
  gf2::check_width(n);
  if (k < 1 || k > n) throw std::invalid_argument("sample_hash: need 1 <= k <= n");
  HashFunction h;
  h.n = n;
  h.k = k;
  h.a = static_cast<std::uint32_t>(rng.below(1ull << n));
  h.b = static_cast<std::uint32_t>(rng.below(1ull << n));
  h.c = static_cast<std::uint32_t>(rng.below(1ull << n));
  return h;
}

std::uint32_t eval_full(const HashFunction& h, const BitString& x) {
  if (x.size() != h.n) throw std::invalid_argument("eval: input length mismatch");
  const std::uint32_t v = x.value();
  const std::uint32_t x2 = gf2::mul(v, v, h.n);
  return gf2::mul(h.a, x2, h.n) ^ gf2::mul(h.b, v, h.n) ^ h.c;
}

BitString eval(const HashFunction& h, const BitString& x) {
  return BitString(eval_full(h, x) >> (h.n - h.k), h.k);
}

std::vector<std::uint8_t> serialize_hash(const HashFunction& h) {
  // 3n can reach 72 bits, so pack through a 128-bit accumulator.
  std::vector<std::uint8_t> bytes;
  bytes.push_back(static_cast<std::uint8_t>(h.n));
  bytes.push_back(static_cast<std::uint8_t>(h.k));
  const int total_bits = 3 * h.n;
  unsigned __int128 packed = (static_cast<unsigned __int128>(h.c) << (2 * h.n)) |
                             (static_cast<unsigned __int128>(h.b) << h.n) |
                             static_cast<unsigned __int128>(h.a);
  for (int i = 0; i < (total_bits + 7) / 8; ++i)
    bytes.push_back(static_cast<std::uint8_t>(packed >> (8 * i)));
  return bytes;
}

HashFunction deserialize_hash(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2) throw std::invalid_argument("deserialize_hash: short buffer");
  HashFunction h;
  h.n = bytes[0];
  h.k = bytes[1];
  gf2::check_width(h.n);
  if (h.k < 1 || h.k > h.n) throw std::invalid_argument("deserialize_hash: bad k");
  const int total_bits = 3 * h.n;
  const std::size_t need = 2 + static_cast<std::size_t>((total_bits + 7) / 8);
  if (bytes.size() != need) throw std::invalid_argument("deserialize_hash: bad length");
  unsigned __int128 packed = 0;
  for (std::size_t i = 2; i < bytes.size(); ++i)
    packed |= static_cast<unsigned __int128>(bytes[i]) << (8 * (i - 2));
  const unsigned __int128 mask = (static_cast<unsigned __int128>(1) << h.n) - 1;
  h.a = static_cast<std::uint32_t>(packed & mask);
  h.b = static_cast<std::uint32_t>((packed >> h.n) & mask);
  h.c = static_cast<std::uint32_t>((packed >> (2 * h.n)) & mask);
  if ((packed >> (3 * h.n)) != 0) throw std::invalid_argument("deserialize_hash: trailing bits");
  return h;
}

IndependenceReport verify_t_wise_independence(int n, int k, int t) {
  if (n < 1 || n > 5) throw std::invalid_argument("verify_t_wise_independence: exhaustive mode needs n <= 5");
  if (k < 1 || k > n) throw std::invalid_argument("verify_t_wise_independence: need 1 <= k <= n");
  if (t != 2 && t != 3) throw std::invalid_argument("verify_t_wise_independence: t must be 2 or 3");

  IndependenceReport report;
  report.n = n;
  report.k = k;
  report.t = t;
  const std::uint32_t q = 1u << n;
  report.family_size = 1ull << (3 * n);
  const std::uint64_t expected = report.family_size >> (t * k);
  if (expected == 0) throw std::invalid_argument("verify_t_wise_independence: 2^{tk} exceeds family size");

  // Precompute truncated values h(x) for all x once per (a,b,c).
  std::vector<std::uint32_t> hv(q);
  std::vector<std::uint64_t> counts(std::size_t{1} << (t * k));

  auto check_tuple = [&](const std::vector<std::uint32_t>& xs) {
    std::fill(counts.begin(), counts.end(), 0);
    HashFunction h;
    h.n = n;
    h.k = k;
    for (std::uint32_t a = 0; a < q; ++a)
      for (std::uint32_t b = 0; b < q; ++b)
        for (std::uint32_t c = 0; c < q; ++c) {
          h.a = a;
          h.b = b;
          h.c = c;
          std::uint64_t key = 0;
          for (std::uint32_t x : xs) {
            const std::uint32_t y = eval_full(h, BitString(x, n)) >> (n - k);
            key = (key << k) | y;
          }
          ++counts[key];
        }
    ++report.tuples_checked;
    for (std::size_t key = 0; key < counts.size(); ++key) {
      if (counts[key] != expected) {
        IndependenceViolation v;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          v.inputs.push_back(BitString(xs[i], n));
          v.targets.push_back(BitString(static_cast<std::uint32_t>((key >> (k * (xs.size() - 1 - i))) & ((1u << k) - 1)), k));
        }
        v.count = counts[key];
        v.expected = expected;
        report.violations.push_back(std::move(v));
      }
    }
  };

  if (t == 2) {
    for (std::uint32_t x1 = 0; x1 < q; ++x1)
      for (std::uint32_t x2 = x1 + 1; x2 < q; ++x2) check_tuple({x1, x2});
  } else {
    for (std::uint32_t x1 = 0; x1 < q; ++x1)
      for (std::uint32_t x2 = x1 + 1; x2 < q; ++x2)
        for (std::uint32_t x3 = x2 + 1; x3 < q; ++x3) check_tuple({x1, x2, x3});
  }
  return report;
}

Rational exact_collision_rate(int n, int k, const BitString& x, const BitString& x_prime) {
  gf2::check_width(n);
  if (n > 5) throw std::invalid_argument("exact_collision_rate: exhaustive mode needs n <= 5");
  const std::uint32_t q = 1u << n;
  std::uint64_t hits = 0;
  HashFunction h;
  h.n = n;
  h.k = k;
  for (std::uint32_t a = 0; a < q; ++a)
    for (std::uint32_t b = 0; b < q; ++b)
      for (std::uint32_t c = 0; c < q; ++c) {
        h.a = a;
        h.b = b;
        h.c = c;
        if (eval(h, x) == eval(h, x_prime)) ++hits;
      }
  return Rational(hits, 1ull << (3 * n));
}

}  // namespace owp
