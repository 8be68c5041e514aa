#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "owp/bitstring.hpp"
#include "owp/rng.hpp"

namespace owp {

using Rational = boost::multiprecision::cpp_rational;

// Exact probability table over n-bit strings; the ground-truth D_n against
// which all estimators, inverters and bound checks are measured.
//
// Two numeric modes. Exact mode keeps rational probabilities (sum must be
// exactly 1) and is the default for supports of at most 2^12 entries, where
// the bound verifications want exact arithmetic. Float mode stores doubles,
// normalized within 1e-12, and is what circuit simulation produces.
// Support is always kept sorted in canonical (lexicographic) order, so
// inverse-CDF sampling is reproducible.
class FiniteDistribution {
 public:
  static constexpr int kMaxBits = 24;
  static constexpr std::size_t kExactSupportLimit = std::size_t{1} << 12;
  static constexpr double kNormTolerance = 1e-12;

  static FiniteDistribution from_float(int n, std::vector<std::pair<BitString, double>> entries);
  static FiniteDistribution from_exact(int n, std::vector<std::pair<BitString, Rational>> entries);
  static FiniteDistribution uniform(int n);
  static FiniteDistribution point_mass(const BitString& x);

  int n() const { return n_; }
  bool exact() const { return exact_; }
  std::size_t support_size() const { return support_.size(); }
  const std::vector<BitString>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<Rational>& exact_probs() const { return exact_probs_; }

  // p_x, or 0 when x is outside the support. Throws on length mismatch.
  double prob(const BitString& x) const;
  Rational prob_exact(const BitString& x) const;

  // Index of x in the canonical support ordering, if present.
  std::optional<std::size_t> support_index(const BitString& x) const;

  BitString sample(SeededRng& rng) const;

  // E[-log2 p_x] in bits; zero-probability terms contribute nothing.
  double entropy() const;

  // Smallest m with p_x >= 2^-m, i.e. ceil(-log2 p_x). Exact, no float logs.
  int ceil_neg_log2_prob(const BitString& x) const;

 private:
  FiniteDistribution() = default;
  void finalize_cdf();

  int n_ = 0;
  bool exact_ = false;
  std::vector<BitString> support_;
  std::vector<double> probs_;
  std::vector<Rational> exact_probs_;
  std::vector<double> cdf_;
};

// (1/2) sum_z |Pr[a->z] - Pr[b->z]|. Lengths must match.
double statistical_distance(const FiniteDistribution& a, const FiniteDistribution& b);
Rational statistical_distance_exact(const FiniteDistribution& a, const FiniteDistribution& b);

// The tail set S = {x : Pr_{x'<-d}[p_{x'} <= p_x] <= n^-c}, by enumeration
// of the support. Its total mass is at most n^-c.
std::vector<BitString> tail_set(const FiniteDistribution& d, int c);

// Total mass of a set of support points.
double mass_of(const FiniteDistribution& d, const std::vector<BitString>& xs);

// Distribution file format: {"n": int, "probs": {"<bitstring>": <number
// or "p/q" string>}}. Any "p/q" entry switches the whole table to exact
// mode (numeric entries are taken at their exact binary value).
FiniteDistribution distribution_from_json(const std::string& text);
std::string distribution_to_json(const FiniteDistribution& d);
FiniteDistribution load_distribution(const std::string& path);

}  // namespace owp
