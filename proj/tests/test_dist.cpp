#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "owp/distribution.hpp"
#include "test_util.hpp"

using namespace owp;

TEST_CASE("bitstring basics") {
  BitString b = BitString::from_string("10110");
  CHECK(b.size() == 5);
  CHECK(b.value() == 0b10110u);
  CHECK(b.to_string() == "10110");
  CHECK(b.bit(0) == 1);
  CHECK(b.bit(4) == 0);
  CHECK(BitString(0b101, 3) < BitString(0b110, 3));
  CHECK(BitString::from_string("01").concat(BitString::from_string("10")).to_string() == "0110");
  CHECK_THROWS_AS(BitString::from_string("012"), std::invalid_argument);
  CHECK_THROWS_AS(BitString(8, 3), std::invalid_argument);
}

TEST_CASE("prob lookups") {
  auto point = FiniteDistribution::point_mass(BitString::from_string("000"));
  CHECK(point.prob(BitString::from_string("000")) == 1.0);
  CHECK(point.prob(BitString::from_string("111")) == 0.0);
  auto u3 = FiniteDistribution::uniform(3);
  CHECK(u3.prob(BitString::from_string("101")) == doctest::Approx(1.0 / 8));
  CHECK(u3.prob_exact(BitString::from_string("101")) == Rational(1, 8));
  CHECK_THROWS_AS(u3.prob(BitString::from_string("1010")), std::invalid_argument);
}

TEST_CASE("construction validation") {
  CHECK_THROWS_AS(FiniteDistribution::from_exact(
                      2, {{BitString::from_string("00"), Rational(1, 2)}}),
                  std::invalid_argument);  // sum != 1
  CHECK_THROWS_AS(FiniteDistribution::from_float(2, {{BitString::from_string("00"), 0.5},
                                                     {BitString::from_string("01"), 0.499}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FiniteDistribution::from_float(2, {{BitString::from_string("0"), 1.0}}),
                  std::invalid_argument);  // length mismatch
  CHECK_THROWS_AS(FiniteDistribution::from_float(2, {}), std::invalid_argument);
}

TEST_CASE("sampling point mass and determinism") {
  auto point = FiniteDistribution::point_mass(BitString::from_string("01"));
  SeededRng rng(42);
  for (int i = 0; i < 50; ++i) CHECK(point.sample(rng) == BitString::from_string("01"));

  auto u2 = FiniteDistribution::uniform(2);
  SeededRng a(123, 9), b(123, 9);
  for (int i = 0; i < 200; ++i) CHECK(u2.sample(a) == u2.sample(b));
  SeededRng c(123, 10);
  bool any_diff = false;
  SeededRng a2(123, 9);
  for (int i = 0; i < 200; ++i) any_diff |= (u2.sample(a2) != u2.sample(c));
  CHECK(any_diff);
}

TEST_CASE("sampling frequencies match probabilities") {
  const int draws = 100000;
  auto u2 = FiniteDistribution::uniform(2);
  SeededRng rng(7);
  std::map<BitString, int> counts;
  for (int i = 0; i < draws; ++i) ++counts[u2.sample(rng)];
  for (const auto& [x, count] : counts)
    CHECK(std::abs(count / static_cast<double>(draws) - 0.25) < 0.01);

  // Chernoff envelope over a skewed table.
  auto d = FiniteDistribution::from_exact(3, {{BitString::from_string("000"), Rational(1, 2)},
                                              {BitString::from_string("001"), Rational(1, 4)},
                                              {BitString::from_string("011"), Rational(3, 16)},
                                              {BitString::from_string("111"), Rational(1, 16)}});
  counts.clear();
  SeededRng rng2(8);
  for (int i = 0; i < draws; ++i) ++counts[d.sample(rng2)];
  for (std::size_t i = 0; i < d.support_size(); ++i) {
    const double p = d.probs()[i];
    const double freq = counts[d.support()[i]] / static_cast<double>(draws);
    CHECK(std::abs(freq - p) <= 4.0 * std::sqrt(p / draws) + 1e-4);
  }
}

TEST_CASE("statistical distance") {
  auto u1 = FiniteDistribution::uniform(1);
  CHECK(statistical_distance(u1, u1) == 0.0);
  auto p0 = FiniteDistribution::point_mass(BitString::from_string("0"));
  auto p1 = FiniteDistribution::point_mass(BitString::from_string("1"));
  CHECK(statistical_distance(p0, p1) == 1.0);
  auto skew = FiniteDistribution::from_exact(
      1, {{BitString::from_string("0"), Rational(3, 4)}, {BitString::from_string("1"), Rational(1, 4)}});
  // Defining sum evaluated directly: (|1/2-3/4| + |1/2-1/4|)/2 = 1/4.
  CHECK(statistical_distance(u1, skew) == doctest::Approx(0.25));
  CHECK(statistical_distance_exact(u1, skew) == Rational(1, 4));
  CHECK_THROWS_AS(statistical_distance(u1, FiniteDistribution::uniform(2)), std::invalid_argument);
}

TEST_CASE("statistical distance is a metric on sampled instances") {
  SeededRng rng(99);
  for (int round = 0; round < 30; ++round) {
    auto a = test::random_exact_distribution(4, rng);
    auto b = test::random_exact_distribution(4, rng);
    auto c = test::random_exact_distribution(4, rng);
    const Rational ab = statistical_distance_exact(a, b);
    const Rational ba = statistical_distance_exact(b, a);
    CHECK(ab == ba);  // symmetry, exact
    CHECK(ab >= 0);
    CHECK(ab <= 1);
    const Rational ac = statistical_distance_exact(a, c);
    const Rational cb = statistical_distance_exact(c, b);
    CHECK(ab <= ac + cb);  // triangle inequality
  }
}

TEST_CASE("entropy") {
  CHECK(FiniteDistribution::point_mass(BitString::from_string("0110")).entropy() == 0.0);
  for (int m = 1; m <= 6; ++m)
    CHECK(FiniteDistribution::uniform(m).entropy() == doctest::Approx(m));
  auto d = FiniteDistribution::from_exact(2, {{BitString::from_string("00"), Rational(1, 2)},
                                              {BitString::from_string("01"), Rational(1, 4)},
                                              {BitString::from_string("10"), Rational(1, 4)}});
  CHECK(d.entropy() == doctest::Approx(1.5));
}

TEST_CASE("ceil_neg_log2_prob") {
  auto d = FiniteDistribution::from_exact(4, {{BitString::from_string("0000"), Rational(1, 2)},
                                              {BitString::from_string("0001"), Rational(1, 4)},
                                              {BitString::from_string("0010"), Rational(3, 16)},
                                              {BitString::from_string("0011"), Rational(1, 16)}});
  CHECK(d.ceil_neg_log2_prob(BitString::from_string("0000")) == 1);
  CHECK(d.ceil_neg_log2_prob(BitString::from_string("0001")) == 2);
  CHECK(d.ceil_neg_log2_prob(BitString::from_string("0010")) == 3);  // ceil(2.415)
  CHECK(d.ceil_neg_log2_prob(BitString::from_string("0011")) == 4);
  CHECK(FiniteDistribution::point_mass(BitString::from_string("0")).ceil_neg_log2_prob(
            BitString::from_string("0")) == 0);
}

TEST_CASE("tail set") {
  // Uniform: every x has rank mass 1, so S is empty for any n^-c < 1.
  CHECK(tail_set(FiniteDistribution::uniform(3), 1).empty());
  CHECK(tail_set(FiniteDistribution::point_mass(BitString::from_string("00")), 1).empty());

  // Geometric-style table on n=4: checked against the hand enumeration.
  auto d = FiniteDistribution::from_exact(4, {{BitString::from_string("0000"), Rational(1, 2)},
                                              {BitString::from_string("0001"), Rational(1, 4)},
                                              {BitString::from_string("0010"), Rational(1, 8)},
                                              {BitString::from_string("0011"), Rational(1, 16)},
                                              {BitString::from_string("0100"), Rational(1, 32)},
                                              {BitString::from_string("0101"), Rational(1, 32)}});
  auto s = tail_set(d, 1);  // threshold 1/4
  // Ascending rank masses: {1/32,1/32} -> 1/16, +1/16 -> 1/8, +1/8 -> 1/4,
  // +1/4 exceeds. So S holds the four smallest atoms.
  CHECK(s.size() == 4);
  CHECK(mass_of(d, s) <= 0.25);

  // Mass bound across random tables.
  SeededRng rng(31337);
  for (int round = 0; round < 40; ++round) {
    auto r = test::random_exact_distribution(4, rng);
    for (int c = 1; c <= 2; ++c) {
      auto tail = tail_set(r, c);
      CHECK(mass_of(r, tail) <= std::pow(4.0, -c) + 1e-12);
    }
  }
}

TEST_CASE("distribution json round trip") {
  auto d = FiniteDistribution::from_exact(3, {{BitString::from_string("000"), Rational(2, 3)},
                                              {BitString::from_string("101"), Rational(1, 3)}});
  auto back = distribution_from_json(distribution_to_json(d));
  CHECK(back.exact());
  CHECK(back.prob_exact(BitString::from_string("000")) == Rational(2, 3));
  CHECK(back.prob_exact(BitString::from_string("101")) == Rational(1, 3));

  // "p/q" strings trigger exact mode.
  auto parsed = distribution_from_json(R"({"n": 2, "probs": {"00": "1/2", "11": 0.5}})");
  CHECK(parsed.exact());
  CHECK(parsed.prob_exact(BitString::from_string("00")) == Rational(1, 2));

  auto floaty = distribution_from_json(R"({"n": 2, "probs": {"00": 0.25, "01": 0.75}})");
  CHECK_FALSE(floaty.exact());
  CHECK(floaty.prob(BitString::from_string("01")) == 0.75);
}

TEST_CASE("rng substreams are stable and independent of call order") {
  SeededRng root(555, 3);
  SeededRng s1 = root.substream(10);
  SeededRng s2 = root.substream(11);
  const std::uint64_t a = s1.next_u64();
  const std::uint64_t b = s2.next_u64();
  SeededRng s2b = root.substream(11);
  SeededRng s1b = root.substream(10);
  CHECK(s2b.next_u64() == b);
  CHECK(s1b.next_u64() == a);
  CHECK(a != b);
}
