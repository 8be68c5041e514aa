#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "owp/bitstring.hpp"
#include "owp/distribution.hpp"
#include "owp/qsim.hpp"
#include "owp/toy_machine.hpp"

namespace owp {

// Exact Kolmogorov complexity relative to the toy machine, by enumeration
// of every program up to length_cap bits (cap <= 22). Strings not produced
// by any program within the cap report "above cap" (nullopt).
class KolmogorovOracle {
 public:
  static constexpr int kMaxLengthCap = 22;

  explicit KolmogorovOracle(int length_cap, int max_output_len = BitString::kMaxLen);

  int length_cap() const { return length_cap_; }

  // K(x), or nullopt for "> cap".
  std::optional<int> k(const BitString& x) const;

  // #{x in {0,1}^n : K(x) <= t}; always at most 2^{t+1}-1. Requires t <= cap.
  std::uint64_t count_low_k(int n, int t) const;

  // All n-bit strings with K <= t, canonical order.
  std::vector<BitString> low_k_strings(int n, int t) const;

  const ToyMachine& machine() const { return machine_; }

 private:
  void build();

  ToyMachine machine_;
  int length_cap_;
  int max_output_len_;
  // key: len << 24 | value (outputs are at most 24 bits)
  std::unordered_map<std::uint32_t, std::uint8_t> table_;
};

// Independent cross-check enumerator: walks the instruction syntax tree
// instead of decoding raw bitstrings. Returns the same map (packed key ->
// minimal program length) for all outputs up to max_output_len reachable
// within length_cap bits.
std::unordered_map<std::uint32_t, std::uint8_t> syntactic_k_table(int length_cap, int max_output_len);

inline std::uint32_t pack_output_key(const BitString& x) {
  return (static_cast<std::uint32_t>(x.size()) << 24) | x.value();
}

// --------------------------------------------------------------------------
// Coding theorem: a program of the shape SAMPLE_RANK(desc(circuit), rank)
// that outputs x, with |program| <= -log2 p_x + |desc| + c_enc log2 n.
// --------------------------------------------------------------------------

// Measured overhead constant of this machine's coding construction,
// published in docs/toy_machine.md and asserted by the acceptance suite:
// |program| - |desc| + log2 p_x <= kCodingOverhead * log2(max(n,2)).
inline constexpr int kCodingOverhead = 20;

struct CodingProgram {
  std::vector<int> bits;
  int desc_len = 0;       // |D| in bits
  std::uint64_t rank = 0; // position of x in the sorted support
  int rank_width = 0;
};

// Programs travel as "<bit-length>:<hex>" with the bits packed MSB-first
// and zero-padded to a nibble boundary.
std::string program_to_hex(const std::vector<int>& bits);
std::vector<int> program_from_hex(const std::string& text);

// Rank-in-sorted-support construction: embed the packed circuit
// description, then the rank of x in the support sorted by decreasing
// probability (ties lexicographic). p_x must be positive.
CodingProgram coding_encoder(const Circuit& circuit, const BitString& x);

struct CodingCheck {
  BitString x;
  double p_x = 0.0;
  std::size_t program_len = 0;
  double length_bound = 0.0;  // -log2 p_x + |desc| + c_enc log2 n
  bool output_matches = false;
  bool within_bound = false;
  std::optional<int> oracle_k;  // when within the oracle cap
};

struct CodingReport {
  int desc_len = 0;
  std::vector<CodingCheck> checks;
  bool all_passed() const;
};

// Checks every support string of the circuit: the constructed program must
// output x exactly and satisfy the length bound; where the oracle already
// knows K(x), additionally K(x) <= |program|.
CodingReport verify_coding_theorem(const KolmogorovOracle& oracle, const Circuit& circuit);

// --------------------------------------------------------------------------
// GapK
// --------------------------------------------------------------------------

struct GapKInstance {
  BitString x;
  int s1 = 0;
  int s2 = 0;  // promise: K(x) <= s1 or K(x) >= s2, with 0 < s1 < s2 < |x|... at
               // machine scale thresholds are calibrated, see docs.
};

enum class GapKAnswer { Yes, No };

// Promise classification against the oracle; nullopt when the instance
// violates the promise (flagged, never decided).
std::optional<GapKAnswer> gapk_promise_truth(const KolmogorovOracle& oracle, const GapKInstance& inst);

// The reduction: accept iff the probability estimate is at least
// alpha = 2^{-s + delta/2}. delta must be even.
GapKAnswer gapk_decide_via_estimation(const std::function<double(const BitString&)>& estimate,
                                      const BitString& x, int s, int delta);

double gapk_acceptance_threshold(int s, int delta);

}  // namespace owp
