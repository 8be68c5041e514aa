#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "owp/bitio.hpp"
#include "owp/kolmo.hpp"
#include "owp/toy_machine.hpp"
#include "test_util.hpp"

using namespace owp;

namespace {

std::vector<int> bits_of(std::uint64_t value, int len) {
  std::vector<int> bits(len);
  for (int i = 0; i < len; ++i) bits[i] = static_cast<int>((value >> (len - 1 - i)) & 1);
  return bits;
}

}  // namespace

TEST_CASE("machine basics") {
  ToyMachine machine;

  // The two-bit HALT program emits nothing.
  auto halt = machine.run(bits_of(0b00, 2));
  CHECK(halt.valid);
  CHECK(halt.output.empty());

  // PUSH 1, PUSH 0, HALT = 01 1 01 0 00.
  auto push = machine.run(bits_of(0b01101000, 8));
  CHECK(push.valid);
  CHECK(push.output == std::vector<int>{1, 0});

  // Truncations and extensions of a valid program are invalid.
  CHECK_FALSE(machine.run(bits_of(0b0110100, 7)).valid);
  CHECK_FALSE(machine.run(bits_of(0b011010001, 9)).valid);

  // DUP_PREFIX beyond the output is invalid: 01 1 110 1 00 appends
  // output[0] again; with an empty prefix operand j=1 > 0 fails first.
  auto dup = machine.run(bits_of(0b011110100, 9));
  CHECK(dup.valid);
  CHECK(dup.output == std::vector<int>{1, 1});
  CHECK_FALSE(machine.run(bits_of(0b1101000, 7)).valid);  // DUP on empty output
}

TEST_CASE("literal and run helper programs") {
  ToyMachine machine;
  SeededRng rng(1);
  for (int round = 0; round < 60; ++round) {
    const int len = 1 + static_cast<int>(rng.below(16));
    const BitString x(static_cast<std::uint32_t>(rng.below(1u << len)), len);
    auto program = ToyMachine::literal_program(x);
    CHECK(static_cast<int>(program.size()) == ToyMachine::literal_program_length(len));
    auto result = machine.run(program);
    REQUIRE(result.valid);
    REQUIRE(static_cast<int>(result.output.size()) == len);
    for (int i = 0; i < len; ++i) CHECK(result.output[i] == x.bit(i));
  }

  for (int len : {1, 2, 5, 16}) {
    auto program = ToyMachine::run_program(1, len);
    auto result = machine.run(program);
    REQUIRE(result.valid);
    CHECK(static_cast<int>(result.output.size()) == len);
    for (int b : result.output) CHECK(b == 1);
  }
}

TEST_CASE("valid programs are prefix-free") {
  // Exhaustive over all programs up to 11 bits: collect valid ones and
  // check no valid program extends another.
  ToyMachine machine;
  std::vector<std::vector<int>> valid;
  std::vector<int> out;
  std::uint64_t steps = 0;
  for (int len = 2; len <= 11; ++len)
    for (std::uint64_t v = 0; v < (1ull << len); ++v) {
      auto program = bits_of(v, len);
      if (machine.run_into(program, out, steps)) valid.push_back(program);
    }
  REQUIRE(valid.size() > 10);
  for (const auto& shorter : valid)
    for (const auto& longer : valid) {
      if (shorter.size() >= longer.size()) continue;
      CHECK_FALSE(std::equal(shorter.begin(), shorter.end(), longer.begin()));
    }
}

TEST_CASE("k oracle small values") {
  KolmogorovOracle oracle(15);
  CHECK(oracle.k(BitString::zeros(0)) == 2);   // the bare HALT program
  CHECK(oracle.k(BitString::from_string("0")) == 5);  // PUSH 0, HALT
  CHECK(oracle.k(BitString::from_string("1")) == 5);

  // Every string up to 6 bits is reachable within its literal length.
  for (int len = 1; len <= 6; ++len)
    for (std::uint32_t v = 0; v < (1u << len); ++v) {
      auto k = oracle.k(BitString(v, len));
      REQUIRE(k.has_value());
      CHECK(*k <= ToyMachine::literal_program_length(len));
    }
}

TEST_CASE("repeat blocks beat the literal encoding on runs") {
  KolmogorovOracle oracle(17);
  auto k16 = oracle.k(BitString::zeros(16));
  REQUIRE(k16.has_value());
  CHECK(*k16 == 17);  // PUSH 0, REPEAT_LAST(1,15), HALT
  CHECK(*k16 < ToyMachine::literal_program_length(16));
}

TEST_CASE("count_low_k") {
  KolmogorovOracle oracle(14);
  // At most one string comes from programs of length <= 0 (none do).
  CHECK(oracle.count_low_k(4, 0) == 0);
  for (int n = 1; n <= 12; ++n) {
    std::uint64_t prev = 0;
    for (int t = 0; t <= 14; ++t) {
      const std::uint64_t count = oracle.count_low_k(n, t);
      CHECK(count >= prev);  // nondecreasing in t
      CHECK(count <= (1ull << (t + 1)) - 1);
      prev = count;
    }
  }
  CHECK(oracle.count_low_k(8, 6) == 0);  // no 8-bit string has K <= 6
  CHECK_THROWS_AS(oracle.count_low_k(4, 15), std::invalid_argument);
}

TEST_CASE("bitstring and syntactic enumerators agree") {
  const int cap = 13;
  KolmogorovOracle oracle(cap, 12);
  auto cross = syntactic_k_table(cap, 12);

  // Identical key sets and identical minimal lengths.
  std::uint64_t checked = 0;
  for (int n = 0; n <= 12; ++n)
    for (std::uint32_t v = 0; v < (1u << n); ++v) {
      const BitString x(v, n);
      auto k = oracle.k(x);
      auto it = cross.find(pack_output_key(x));
      if (k.has_value()) {
        REQUIRE(it != cross.end());
        CHECK(static_cast<int>(it->second) == *k);
        ++checked;
      } else {
        CHECK(it == cross.end());
      }
    }
  CHECK(checked > 20);
}

TEST_CASE("coding encoder on the fixture circuits") {
  KolmogorovOracle oracle(12, 12);

  // Point mass: single-element support, rank 0.
  Circuit point{3, {}};
  CodingProgram prog = coding_encoder(point, BitString::zeros(3));
  CHECK(prog.rank == 0);
  CHECK(prog.rank_width == 1);
  auto run = oracle.machine().run(prog.bits);
  REQUIRE(run.valid);
  CHECK(run.output == std::vector<int>{0, 0, 0});

  // Bell pair: both support strings have single-bit ranks.
  Circuit bell{2, {{GateKind::H, 0, -1}, {GateKind::CNOT, 0, 1}}};
  for (const char* name : {"00", "11"}) {
    CodingProgram p = coding_encoder(bell, BitString::from_string(name));
    CHECK(p.rank_width == 1);
    CHECK(p.rank <= 1);
  }

  // Uniform over 4 bits: ranks up to 15 in at most 4 bits.
  Circuit h4{4, {{GateKind::H, 0, -1}, {GateKind::H, 1, -1}, {GateKind::H, 2, -1}, {GateKind::H, 3, -1}}};
  for (std::uint32_t v = 0; v < 16; ++v) {
    CodingProgram p = coding_encoder(h4, BitString(v, 4));
    CHECK(p.rank <= 15);
    CHECK(p.rank_width <= 4);
    auto r = oracle.machine().run(p.bits);
    REQUIRE(r.valid);
    CHECK(r.output.size() == 4);
  }

  CHECK_THROWS_AS(coding_encoder(point, BitString::from_string("111")), std::invalid_argument);
}

TEST_CASE("verify_coding_theorem passes on fixtures") {
  KolmogorovOracle oracle(12, 12);
  Circuit ghz{3, {{GateKind::H, 0, -1}, {GateKind::CNOT, 0, 1}, {GateKind::CNOT, 1, 2}}};
  CodingReport report = verify_coding_theorem(oracle, ghz);
  CHECK(report.all_passed());
  CHECK(report.checks.size() == 2);
  for (const CodingCheck& check : report.checks) {
    CHECK(check.output_matches);
    CHECK(check.within_bound);
    CHECK(check.p_x == doctest::Approx(0.5));
  }
}

TEST_CASE("program hex round trip") {
  SeededRng rng(61);
  for (int round = 0; round < 50; ++round) {
    const int len = 1 + static_cast<int>(rng.below(14));
    const BitString x(static_cast<std::uint32_t>(rng.below(1u << len)), len);
    auto program = ToyMachine::literal_program(x);
    auto back = program_from_hex(program_to_hex(program));
    CHECK(back == program);
  }
  CHECK(program_to_hex({0, 0}) == "2:0");
  CHECK(program_from_hex("2:0") == std::vector<int>{0, 0});
  CHECK_THROWS_AS(program_from_hex("8:f"), std::invalid_argument);
  CHECK_THROWS_AS(program_from_hex("3:1"), std::invalid_argument);  // nonzero padding
}

TEST_CASE("gapk decisions") {
  auto estimate = [](const BitString&) { return std::pow(2.0, -6); };
  CHECK(gapk_decide_via_estimation(estimate, BitString::zeros(10), 10, 6) == GapKAnswer::Yes);
  auto estimate_low = [](const BitString&) { return std::pow(2.0, -8); };
  CHECK(gapk_decide_via_estimation(estimate_low, BitString::zeros(10), 10, 6) == GapKAnswer::No);
  CHECK(gapk_acceptance_threshold(10, 6) == doctest::Approx(std::pow(2.0, -7)));
  CHECK_THROWS_AS(gapk_acceptance_threshold(10, 5), std::invalid_argument);

  KolmogorovOracle oracle(15);
  GapKInstance yes_inst{BitString::from_string("0"), 5, 8};
  CHECK(gapk_promise_truth(oracle, yes_inst) == GapKAnswer::Yes);
  GapKInstance no_inst{BitString::from_string("01101101"), 5, 8};
  // Any 8-bit string needs more than 8 program bits.
  CHECK(gapk_promise_truth(oracle, no_inst) == GapKAnswer::No);
  CHECK_THROWS_AS(gapk_promise_truth(oracle, GapKInstance{BitString::zeros(2), 8, 5}),
                  std::invalid_argument);
}

TEST_CASE("sample_rank instruction round trips through the machine") {
  // Build SAMPLE_RANK by hand for a Bell circuit and check both ranks.
  Circuit bell{2, {{GateKind::H, 0, -1}, {GateKind::CNOT, 0, 1}}};
  auto desc = encode_circuit_bits(bell);
  ToyMachine machine;
  for (std::uint64_t rank = 0; rank < 2; ++rank) {
    BitWriter w;
    w.push_bits(0b1111, 4);
    w.push_gamma(desc.size());
    for (int b : desc) w.push_bit(b);
    w.push_gamma(1);
    w.push_bits(rank, 1);
    w.push_bits(0b00, 2);
    auto result = machine.run(w.bits());
    REQUIRE(result.valid);
    // Sorted by decreasing probability with lexicographic ties: 00 then 11.
    if (rank == 0) CHECK(result.output == std::vector<int>{0, 0});
    if (rank == 1) CHECK(result.output == std::vector<int>{1, 1});
  }

  // Rank beyond the support is invalid.
  BitWriter w;
  w.push_bits(0b1111, 4);
  w.push_gamma(desc.size());
  for (int b : desc) w.push_bit(b);
  w.push_gamma(2);
  w.push_bits(2, 2);
  w.push_bits(0b00, 2);
  CHECK_FALSE(machine.run(w.bits()).valid);
}
