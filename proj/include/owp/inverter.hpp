#pragma once

#include <memory>
#include <optional>

#include "owp/distribution.hpp"
#include "owp/puzzle.hpp"

namespace owp {

// Exact normalized restriction of d to {x' : puzzle_hash(h, x', k) = y}.
// Zero preimage mass yields nullopt (the explicit empty-posterior result).
std::optional<FiniteDistribution> preimage_posterior(const FiniteDistribution& d, int k,
                                                     const HashFunction& h, const BitString& y);

// The brute-force posterior sampler: the "no one-way puzzles" world made
// concrete. On zero-mass preimages it answers the in-band failure string
// 0^n; the estimation algorithm only counts exact key matches, so the
// failure value cannot inflate anything.
class ExactInverter : public DistributionalInverter {
 public:
  explicit ExactInverter(FiniteDistribution d);

  const FiniteDistribution& distribution() const { return d_; }

  BitString invert(int k, const HashFunction& h, const BitString& y, SeededRng& rng) const override;
  std::optional<FiniteDistribution> output_distribution(int k, const HashFunction& h,
                                                        const BitString& y) const override;

 private:
  FiniteDistribution d_;
  // Field squares of the support values; h(x) = a x^2 + b x + c needs one
  // fewer multiplication per evaluation with these precomputed.
  std::vector<std::uint32_t> support_squares_;
};

// Answers via the exact posterior with probability 1-gamma and via the
// decoy distribution with probability gamma. The resulting joint is within
// statistical distance gamma of the honest one; it equals gamma exactly
// when the decoy's support is disjoint from d's.
class NoisyInverter : public DistributionalInverter {
 public:
  NoisyInverter(std::shared_ptr<const ExactInverter> inner, double gamma, FiniteDistribution decoy);

  // Decoy defaults to uniform over {0,1}^n.
  static NoisyInverter with_uniform_decoy(std::shared_ptr<const ExactInverter> inner, double gamma);

  double gamma() const { return gamma_; }

  BitString invert(int k, const HashFunction& h, const BitString& y, SeededRng& rng) const override;
  std::optional<FiniteDistribution> output_distribution(int k, const HashFunction& h,
                                                        const BitString& y) const override;

 private:
  std::shared_ptr<const ExactInverter> inner_;
  double gamma_;
  FiniteDistribution decoy_;
};

// Ignores the puzzle entirely; useful as a worst-case baseline.
class ConstantInverter : public DistributionalInverter {
 public:
  explicit ConstantInverter(BitString answer) : answer_(std::move(answer)) {}

  BitString invert(int, const HashFunction&, const BitString&, SeededRng&) const override { return answer_; }
  std::optional<FiniteDistribution> output_distribution(int, const HashFunction&,
                                                        const BitString&) const override {
    return FiniteDistribution::point_mass(answer_);
  }

 private:
  BitString answer_;
};

}  // namespace owp
