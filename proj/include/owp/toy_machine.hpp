#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "owp/bitstring.hpp"

namespace owp {

// The fixed prefix-free toy machine that stands in for the universal Turing
// machine. Programs are bit strings, instructions are read MSB-first:
//
//   00                                   HALT
//   01 b                                 PUSH_BIT    append b
//   10 g(L) <L bits>                     EMIT_LITERAL append the L raw bits
//   110 g(j)                             DUP_PREFIX  append output[0..j)
//   1110 g(l) g(r)                       REPEAT_LAST append r copies of the
//                                                    last l output bits
//   1111 g(D) <D bits> g(w) <w bits>     SAMPLE_RANK decode the D bits as a
//                                                    packed circuit, emit the
//                                                    support string of given
//                                                    rank in the probability-
//                                                    sorted output order
//
// g() is the Elias gamma code, so every operand is self-delimiting. A
// program is valid iff decoding consumes it exactly, ends at its first
// HALT, every operand is in range, and the step cap is respected; a valid
// program can therefore never be a prefix of another valid program. Full
// encoding details and worked examples: docs/toy_machine.md.
class ToyMachine {
 public:
  static constexpr std::uint64_t kStepCap = 1'000'000;

  struct RunResult {
    bool valid = false;
    std::vector<int> output;
    std::uint64_t steps = 0;
    std::string error;
  };

  RunResult run(std::span<const int> program) const;

  // Buffer-reusing variant for enumeration loops. Returns validity and
  // leaves the produced bits in `out`.
  bool run_into(std::span<const int> program, std::vector<int>& out, std::uint64_t& steps) const;

  // Machine constants, as measured by construction.
  static constexpr int kHaltProgramLength = 2;  // the empty-output program

  // Length of the literal encoder program for an x of the given length:
  // 2 + gamma(|x|) + |x| + 2.
  static int literal_program_length(int x_len);
  static std::vector<int> literal_program(const BitString& x);

  // Program built from a run: PUSH b, REPEAT_LAST(1, len-1), HALT.
  static std::vector<int> run_program(int bit, int len);
};

}  // namespace owp
