#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <optional>

#include "owp/inverter.hpp"
#include "test_util.hpp"

using namespace owp;

namespace {

// Finds an (h, k, y) whose preimage set inside d's support is exactly
// `wanted`, by exhaustive search over the family. Small n only.
std::optional<std::pair<HashFunction, BitString>> find_hash_with_preimage(
    const FiniteDistribution& d, int k, const std::vector<BitString>& wanted) {
  const int n = d.n();
  const std::uint32_t q = 1u << n;
  HashFunction h;
  h.n = n;
  h.k = k;
  for (std::uint32_t a = 0; a < q; ++a)
    for (std::uint32_t b = 0; b < q; ++b)
      for (std::uint32_t c = 0; c < q; ++c) {
        h.a = a;
        h.b = b;
        h.c = c;
        const BitString y = eval(h, wanted.front());
        std::vector<BitString> preimage;
        for (const auto& x : d.support())
          if (eval(h, x) == y) preimage.push_back(x);
        if (preimage == wanted) return std::make_pair(h, y);
      }
  return std::nullopt;
}

}  // namespace

TEST_CASE("invert on a point mass") {
  auto d = FiniteDistribution::point_mass(BitString::from_string("110"));
  ExactInverter inv(d);
  SeededRng rng(1);
  for (int i = 0; i < 100; ++i) {
    HashFunction h = sample_hash(3, 2, rng);
    BitString y = puzzle_hash(h, BitString::from_string("110"), 2);
    CHECK(inv.invert(2, h, y, rng) == BitString::from_string("110"));
  }
}

TEST_CASE("constant hash conditions on the full space") {
  auto d = FiniteDistribution::uniform(3);
  ExactInverter inv(d);
  HashFunction constant{3, 1, 0, 0, 0};  // h(x) = 0 for all x
  BitString y = eval(constant, BitString::zeros(3));
  SeededRng rng(2);
  std::map<BitString, int> counts;
  const int draws = 16000;
  for (int i = 0; i < draws; ++i) ++counts[inv.invert(1, constant, y, rng)];
  CHECK(counts.size() == 8);
  for (const auto& [x, count] : counts)
    CHECK(std::abs(count / static_cast<double>(draws) - 0.125) < 0.02);
}

TEST_CASE("two-element preimage set is sampled evenly") {
  auto d = FiniteDistribution::uniform(3);
  const std::vector<BitString> wanted = {BitString::from_string("001"), BitString::from_string("110")};
  auto found = find_hash_with_preimage(d, 2, wanted);
  REQUIRE(found);
  auto [h, y] = *found;
  ExactInverter inv(d);
  SeededRng rng(3);
  int first = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    BitString x = inv.invert(2, h, y, rng);
    const bool is_first = x == wanted[0];
    CHECK((is_first || x == wanted[1]));
    if (is_first) ++first;
  }
  CHECK(std::abs(first / static_cast<double>(draws) - 0.5) <= 0.02);
}

TEST_CASE("preimage posterior") {
  // Point mass conditions to a point mass.
  auto point = FiniteDistribution::point_mass(BitString::from_string("01"));
  SeededRng rng(4);
  HashFunction h = sample_hash(2, 1, rng);
  auto post = preimage_posterior(point, 1, h, eval(h, BitString::from_string("01")));
  REQUIRE(post);
  CHECK(post->prob(BitString::from_string("01")) == 1.0);

  // Identity-like hash with k = n gives a point mass at the solution.
  auto u3 = FiniteDistribution::uniform(3);
  HashFunction identity{3, 3, 0, 1, 0};
  auto post_id = preimage_posterior(u3, 3, identity, BitString::from_string("101"));
  REQUIRE(post_id);
  CHECK(post_id->support_size() == 1);
  CHECK(post_id->prob_exact(BitString::from_string("101")) == 1);

  // Weighted table: normalize 1/2 and 1/8 over a two-element preimage.
  auto d = FiniteDistribution::from_exact(2, {{BitString::from_string("00"), Rational(1, 2)},
                                              {BitString::from_string("01"), Rational(1, 4)},
                                              {BitString::from_string("10"), Rational(1, 8)},
                                              {BitString::from_string("11"), Rational(1, 8)}});
  auto found = find_hash_with_preimage(d, 1, {BitString::from_string("00"), BitString::from_string("11")});
  REQUIRE(found);
  auto [h2, y2] = *found;
  auto post2 = preimage_posterior(d, 1, h2, y2);
  REQUIRE(post2);
  CHECK(post2->prob_exact(BitString::from_string("00")) == Rational(4, 5));
  CHECK(post2->prob_exact(BitString::from_string("11")) == Rational(1, 5));
}

TEST_CASE("zero-mass preimages") {
  // Support misses everything hashing to some y at k = n.
  auto d = FiniteDistribution::point_mass(BitString::from_string("000"));
  HashFunction identity{3, 3, 0, 1, 0};
  auto post = preimage_posterior(d, 3, identity, BitString::from_string("111"));
  CHECK_FALSE(post.has_value());

  ExactInverter inv(d);
  SeededRng rng(5);
  CHECK(inv.invert(3, identity, BitString::from_string("111"), rng) == BitString::zeros(3));
  // The declared output law matches the in-band failure answer.
  auto law = inv.output_distribution(3, identity, BitString::from_string("111"));
  REQUIRE(law);
  CHECK(law->prob(BitString::zeros(3)) == 1.0);
}

TEST_CASE("invert frequencies match the posterior") {
  SeededRng rng(6);
  for (int round = 0; round < 5; ++round) {
    auto d = test::random_exact_distribution(3, rng, 8);
    ExactInverter inv(d);
    const int k = 1 + static_cast<int>(rng.below(3));
    HashFunction h = sample_hash(3, k, rng);
    const BitString x0 = d.support()[rng.below(d.support_size())];
    const BitString y = puzzle_hash(h, x0, k);
    auto post = preimage_posterior(d, k, h, y);
    REQUIRE(post);

    std::map<BitString, int> counts;
    const int draws = 8000;
    for (int i = 0; i < draws; ++i) ++counts[inv.invert(k, h, y, rng)];
    for (std::size_t i = 0; i < post->support_size(); ++i) {
      const double freq = counts[post->support()[i]] / static_cast<double>(draws);
      const double p = post->probs()[i];
      CHECK(std::abs(freq - p) <= 3.0 * std::sqrt(p * (1 - p) / draws) + 1e-3);
    }
  }
}

TEST_CASE("noisy inverter output law stays within gamma of the exact law") {
  auto d = FiniteDistribution::uniform(4);
  auto inner = std::make_shared<ExactInverter>(d);
  NoisyInverter noisy = NoisyInverter::with_uniform_decoy(inner, 0.25);
  CHECK(noisy.gamma() == 0.25);

  SeededRng rng(7);
  for (int round = 0; round < 40; ++round) {
    const int k = 1 + static_cast<int>(rng.below(8));
    HashFunction h = sample_hash(4, effective_k(4, k), rng);
    const BitString x0 = d.support()[rng.below(d.support_size())];
    const BitString y = puzzle_hash(h, x0, k);
    auto exact_law = inner->output_distribution(k, h, y);
    auto noisy_law = noisy.output_distribution(k, h, y);
    REQUIRE(exact_law);
    REQUIRE(noisy_law);
    CHECK(statistical_distance(*exact_law, *noisy_law) <= 0.25 + 1e-12);
  }

  CHECK_THROWS_AS(NoisyInverter(inner, 1.5, FiniteDistribution::uniform(4)), std::invalid_argument);
}
