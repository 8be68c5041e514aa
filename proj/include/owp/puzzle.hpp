#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "owp/bitstring.hpp"
#include "owp/distribution.hpp"
#include "owp/hashing.hpp"
#include "owp/rng.hpp"

namespace owp {

// The puzzle sampler draws k uniformly from [2n], but the polynomial hash
// family only exists at output widths up to n. For k > n the hash is
// instantiated at width n and its output zero-padded on the right to k
// bits, so distinct inputs still collide with probability exactly 2^-n.
// All conditioning sets are unchanged by the padding.
BitString puzzle_hash(const HashFunction& h, const BitString& x, int k);

// Effective family output width for a requested k at input width n.
inline int effective_k(int n, int k) { return k < n ? k : n; }

struct PuzzleInstance {
  int k = 0;          // requested output length, in [1, 2n]
  HashFunction h;     // width effective_k(n, k)
  BitString y;        // puzzle_hash(h, key, k), length k
  BitString key;      // hidden key x; cleared before handing to adversaries
};

// Algorithm Samp: k <-$ [2n], h <-$ H_n^k, x <- d, puzzle (k,h,h(x)), key x.
PuzzleInstance samp_candidate(const FiniteDistribution& d, SeededRng& rng);

// Wire format {"k": int, "h": base64, "y": bitstring}; never carries the key.
std::string puzzle_to_json(const PuzzleInstance& p);
PuzzleInstance puzzle_from_json(const std::string& text);

// Distributional inverter oracle. invert() must always answer; oracles that
// can state their exact conditional output law expose it through
// output_distribution(), which unlocks exact security computation.
class DistributionalInverter {
 public:
  virtual ~DistributionalInverter() = default;
  virtual BitString invert(int k, const HashFunction& h, const BitString& y, SeededRng& rng) const = 0;
  virtual std::optional<FiniteDistribution> output_distribution(int /*k*/, const HashFunction& /*h*/,
                                                                const BitString& /*y*/) const {
    return std::nullopt;
  }
};

enum class SecurityMode { Exact, ConditionalMonteCarlo, Histogram };

// Statistical distance between the honest joint (k,h,h(x),x) and the
// inverted joint (k,h,h(x),O(k,h,h(x))).
struct SecurityReport {
  double sd = 0.0;
  std::optional<Rational> sd_exact;  // set in exact mode
  SecurityMode mode = SecurityMode::Histogram;
  std::uint64_t trials = 0;
  double confidence_radius = 0.0;  // 99% Hoeffding radius; 0 in exact mode
};

// Exact mode enumerates every (k, h, support x) tuple and requires
// |support| * |family| * 2n <= 2^26 plus an oracle that exposes its law;
// otherwise falls back to Monte Carlo over (k,h,x) with exact conditional
// distances when available, or paired-sample histograms as a last resort.
SecurityReport distributional_security(const FiniteDistribution& d, const DistributionalInverter& inverter,
                                       std::uint64_t trials, SeededRng& rng);

// Forces a particular estimation strategy (for tests and diagnostics).
SecurityReport distributional_security_with_mode(const FiniteDistribution& d,
                                                 const DistributionalInverter& inverter,
                                                 std::uint64_t trials, SeededRng& rng, SecurityMode mode);

using Verifier = std::function<bool(const BitString& key, const PuzzleInstance& puzzle)>;
using Adversary = std::function<BitString(const PuzzleInstance& puzzle, SeededRng& rng)>;

// Ver accepts iff the proposed key equals the hidden one.
Verifier equality_verifier();
// Ver accepts iff the proposed key hashes to the puzzle value.
Verifier hash_consistency_verifier();

struct GameResult {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
};

// Runs the one-way puzzle security game: sample, strip the key, let the
// adversary answer, verify. The adversary never sees the hidden key.
GameResult owpuzz_security_game(const FiniteDistribution& d, const Verifier& ver, const Adversary& adversary,
                                std::uint64_t trials, SeededRng& rng);

}  // namespace owp
