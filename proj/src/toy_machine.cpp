#include "owp/toy_machine.hpp"

#include <stdexcept>

#include "owp/bitio.hpp"
#include "owp/qsim.hpp"

namespace owp {

namespace {

// Local cursor that reports exhaustion without exceptions; enumeration
// feeds this machine mostly-garbage programs and the failure path must be
// cheap.
struct Cursor {
  std::span<const int> bits;
  std::size_t pos = 0;

  bool read(int& b) {
    if (pos >= bits.size()) return false;
    b = bits[pos++];
    return true;
  }
  bool read_gamma(std::uint64_t& v) {
    int zeros = 0;
    int b;
    for (;;) {
      if (!read(b)) return false;
      if (b == 1) break;
      if (++zeros > 40) return false;
    }
    v = 1;
    for (int i = 0; i < zeros; ++i) {
      if (!read(b)) return false;
      v = (v << 1) | static_cast<std::uint64_t>(b);
    }
    return true;
  }
};

bool decode_and_run_sample_rank(Cursor& cur, std::vector<int>& out, std::uint64_t& steps,
                                std::string* error) {
  std::uint64_t dlen;
  if (!cur.read_gamma(dlen)) return false;
  if (dlen < 1 || cur.pos + dlen > cur.bits.size()) return false;
  std::vector<int> desc(cur.bits.begin() + cur.pos, cur.bits.begin() + cur.pos + dlen);
  cur.pos += dlen;

  Circuit circuit;
  try {
    BitReader reader(desc);
    circuit = decode_circuit_bits(reader);
    if (!reader.exhausted()) return false;  // desc must be exactly consumed
  } catch (const std::exception&) {
    if (error) *error = "sample_rank: bad circuit description";
    return false;
  }

  std::uint64_t w;
  if (!cur.read_gamma(w)) return false;
  if (w < 1 || w > 32 || cur.pos + w > cur.bits.size()) return false;
  std::uint64_t rank = 0;
  for (std::uint64_t i = 0; i < w; ++i) rank = (rank << 1) | static_cast<std::uint64_t>(cur.bits[cur.pos++]);

  steps += (std::uint64_t{1} << circuit.n_qubits) * (circuit.gates.size() + 1);
  if (steps > ToyMachine::kStepCap) {
    if (error) *error = "step cap exceeded";
    return false;
  }

  const FiniteDistribution dist = output_distribution(circuit);
  // Support sorted by decreasing probability, ties lexicographic.
  std::vector<std::size_t> order(dist.support_size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dist.probs()[a] != dist.probs()[b]) return dist.probs()[a] > dist.probs()[b];
    return dist.support()[a] < dist.support()[b];
  });
  if (rank >= order.size()) {
    if (error) *error = "sample_rank: rank beyond support";
    return false;
  }
  const BitString& x = dist.support()[order[rank]];
  steps += x.size();
  if (steps > ToyMachine::kStepCap) return false;
  for (int i = 0; i < x.size(); ++i) out.push_back(x.bit(i));
  return true;
}

}  // namespace

bool ToyMachine::run_into(std::span<const int> program, std::vector<int>& out,
                          std::uint64_t& steps) const {
  out.clear();
  steps = 0;
  Cursor cur{program};
  std::string* error = nullptr;

  for (;;) {
    int b0;
    if (!cur.read(b0)) return false;  // ran out before HALT
    ++steps;
    if (steps > kStepCap) return false;

    if (b0 == 0) {
      int b1;
      if (!cur.read(b1)) return false;
      if (b1 == 0) {
        // HALT: valid iff this is exactly the end of the program.
        return cur.pos == program.size();
      }
      // 01 b : PUSH_BIT
      int bit;
      if (!cur.read(bit)) return false;
      out.push_back(bit);
      if (++steps > kStepCap) return false;
      continue;
    }

    int b1;
    if (!cur.read(b1)) return false;
    if (b1 == 0) {
      // 10 : EMIT_LITERAL
      std::uint64_t len;
      if (!cur.read_gamma(len)) return false;
      if (len < 1 || cur.pos + len > cur.bits.size()) return false;
      steps += len;
      if (steps > kStepCap) return false;
      for (std::uint64_t i = 0; i < len; ++i) out.push_back(program[cur.pos++]);
      continue;
    }

    int b2;
    if (!cur.read(b2)) return false;
    if (b2 == 0) {
      // 110 : DUP_PREFIX
      std::uint64_t j;
      if (!cur.read_gamma(j)) return false;
      if (j < 1 || j > out.size()) return false;
      steps += j;
      if (steps > kStepCap) return false;
      for (std::uint64_t i = 0; i < j; ++i) out.push_back(out[i]);
      continue;
    }

    int b3;
    if (!cur.read(b3)) return false;
    if (b3 == 0) {
      // 1110 : REPEAT_LAST
      std::uint64_t block, reps;
      if (!cur.read_gamma(block)) return false;
      if (!cur.read_gamma(reps)) return false;
      if (block < 1 || block > out.size() || reps < 1) return false;
      steps += block * reps;
      if (steps > kStepCap) return false;
      const std::size_t start = out.size() - block;
      for (std::uint64_t r = 0; r < reps; ++r)
        for (std::uint64_t i = 0; i < block; ++i) out.push_back(out[start + i]);
      continue;
    }

    // 1111 : SAMPLE_RANK
    if (!decode_and_run_sample_rank(cur, out, steps, error)) return false;
  }
}

ToyMachine::RunResult ToyMachine::run(std::span<const int> program) const {
  RunResult result;
  result.valid = run_into(program, result.output, result.steps);
  if (!result.valid) result.error = "invalid or non-halting program";
  return result;
}

int ToyMachine::literal_program_length(int x_len) {
  if (x_len == 0) return kHaltProgramLength;
  return 2 + gamma_length(static_cast<std::uint64_t>(x_len)) + x_len + 2;
}

std::vector<int> ToyMachine::literal_program(const BitString& x) {
  BitWriter w;
  if (x.size() > 0) {
    w.push_bits(0b10, 2);
    w.push_gamma(static_cast<std::uint64_t>(x.size()));
    for (int i = 0; i < x.size(); ++i) w.push_bit(x.bit(i));
  }
  w.push_bits(0b00, 2);
  return w.bits();
}

std::vector<int> ToyMachine::run_program(int bit, int len) {
  if (len < 1) throw std::invalid_argument("run_program: len >= 1");
  BitWriter w;
  w.push_bits(0b01, 2);
  w.push_bit(bit);
  if (len > 1) {
    w.push_bits(0b1110, 4);
    w.push_gamma(1);
    w.push_gamma(static_cast<std::uint64_t>(len - 1));
  }
  w.push_bits(0b00, 2);
  return w.bits();
}

}  // namespace owp
