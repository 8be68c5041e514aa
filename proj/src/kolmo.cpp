#include "owp/kolmo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "owp/bitio.hpp"

namespace owp {

KolmogorovOracle::KolmogorovOracle(int length_cap, int max_output_len)
    : length_cap_(length_cap), max_output_len_(max_output_len) {
  if (length_cap < 2 || length_cap > kMaxLengthCap)
    throw std::invalid_argument("KolmogorovOracle: cap out of [2,22]");
  if (max_output_len < 0 || max_output_len > BitString::kMaxLen)
    throw std::invalid_argument("KolmogorovOracle: bad output length limit");
  build();
}

void KolmogorovOracle::build() {
  std::vector<int> program;
  std::vector<int> out;
  std::uint64_t steps = 0;
  // Ascending length, so the first program producing x is minimal.
  for (int len = 2; len <= length_cap_; ++len) {
    program.assign(len, 0);
    const std::uint64_t total = 1ull << len;
    for (std::uint64_t v = 0; v < total; ++v) {
      for (int i = 0; i < len; ++i) program[i] = static_cast<int>((v >> (len - 1 - i)) & 1);
      if (!machine_.run_into(program, out, steps)) continue;
      if (out.size() > static_cast<std::size_t>(max_output_len_)) continue;
      std::uint32_t value = 0;
      for (int b : out) value = (value << 1) | static_cast<std::uint32_t>(b);
      const std::uint32_t key = (static_cast<std::uint32_t>(out.size()) << 24) | value;
      table_.try_emplace(key, static_cast<std::uint8_t>(len));
    }
  }
}

std::optional<int> KolmogorovOracle::k(const BitString& x) const {
  auto it = table_.find(pack_output_key(x));
  if (it == table_.end()) return std::nullopt;
  return static_cast<int>(it->second);
}

std::uint64_t KolmogorovOracle::count_low_k(int n, int t) const {
  if (t > length_cap_) throw std::invalid_argument("count_low_k: t beyond enumeration cap");
  std::uint64_t count = 0;
  for (const auto& [key, len] : table_)
    if (static_cast<int>(key >> 24) == n && len <= t) ++count;
  return count;
}

std::vector<BitString> KolmogorovOracle::low_k_strings(int n, int t) const {
  if (t > length_cap_) throw std::invalid_argument("low_k_strings: t beyond enumeration cap");
  std::vector<BitString> result;
  for (const auto& [key, len] : table_)
    if (static_cast<int>(key >> 24) == n && len <= t)
      result.push_back(BitString(key & 0xFFFFFFu, n));
  std::sort(result.begin(), result.end());
  return result;
}

// --------------------------------------------------------------------------
// Syntactic cross-enumerator
// --------------------------------------------------------------------------

namespace {

struct SyntacticSearch {
  int cap;
  int max_out;
  ToyMachine machine;
  std::unordered_map<std::uint32_t, std::uint8_t> table;
  std::vector<int> program;
  std::vector<int> output;

  void record_halt() {
    if (output.size() > static_cast<std::size_t>(max_out)) return;
    std::uint32_t value = 0;
    for (int b : output) value = (value << 1) | static_cast<std::uint32_t>(b);
    const std::uint32_t key = (static_cast<std::uint32_t>(output.size()) << 24) | value;
    const std::uint8_t len = static_cast<std::uint8_t>(program.size() + 2);
    auto [it, inserted] = table.try_emplace(key, len);
    if (!inserted && len < it->second) it->second = len;
  }

  void push_gamma(std::uint64_t v) {
    int width = 0;
    while ((v >> width) > 1) ++width;
    for (int i = 0; i < width; ++i) program.push_back(0);
    for (int i = width; i >= 0; --i) program.push_back(static_cast<int>((v >> i) & 1));
  }

  void explore() {
    const int remaining = cap - static_cast<int>(program.size());
    if (remaining >= 2) record_halt();

    // PUSH_BIT: 3 bits, needs 2 more for HALT.
    if (remaining >= 5) {
      for (int b = 0; b < 2; ++b) {
        const std::size_t mark = program.size();
        program.push_back(0);
        program.push_back(1);
        program.push_back(b);
        output.push_back(b);
        explore();
        output.pop_back();
        program.resize(mark);
      }
    }

    // EMIT_LITERAL: 2 + gamma(L) + L bits. Enumerate payloads.
    for (int L = 1; 2 + gamma_length(L) + L + 2 <= remaining; ++L) {
      const std::size_t mark = program.size();
      program.push_back(1);
      program.push_back(0);
      push_gamma(static_cast<std::uint64_t>(L));
      const std::size_t payload_at = program.size();
      for (int i = 0; i < L; ++i) program.push_back(0);
      for (std::uint64_t payload = 0; payload < (1ull << L); ++payload) {
        for (int i = 0; i < L; ++i)
          program[payload_at + i] = static_cast<int>((payload >> (L - 1 - i)) & 1);
        for (int i = 0; i < L; ++i) output.push_back(program[payload_at + i]);
        explore();
        output.resize(output.size() - L);
      }
      program.resize(mark);
    }

    // DUP_PREFIX: 3 + gamma(j), j <= |out|.
    for (std::size_t j = 1; j <= output.size(); ++j) {
      if (3 + gamma_length(j) + 2 > remaining) break;
      const std::size_t mark = program.size();
      program.push_back(1);
      program.push_back(1);
      program.push_back(0);
      push_gamma(j);
      const std::size_t out_mark = output.size();
      for (std::size_t i = 0; i < j; ++i) output.push_back(output[i]);
      explore();
      output.resize(out_mark);
      program.resize(mark);
    }

    // REPEAT_LAST: 4 + gamma(l) + gamma(r).
    for (std::size_t l = 1; l <= output.size(); ++l) {
      if (4 + gamma_length(l) + 1 + 2 > remaining) break;
      for (std::uint64_t r = 1; 4 + gamma_length(l) + gamma_length(r) + 2 <= remaining; ++r) {
        const std::size_t mark = program.size();
        program.push_back(1);
        program.push_back(1);
        program.push_back(1);
        program.push_back(0);
        push_gamma(l);
        push_gamma(r);
        const std::size_t out_mark = output.size();
        const std::size_t start = out_mark - l;
        bool too_long = out_mark + l * r > 4096;
        if (!too_long) {
          for (std::uint64_t rep = 0; rep < r; ++rep)
            for (std::size_t i = 0; i < l; ++i) output.push_back(output[start + i]);
          explore();
        }
        output.resize(out_mark);
        program.resize(mark);
      }
    }

    // SAMPLE_RANK: 4 + gamma(D) + D + gamma(w) + w. Enumerate description
    // payloads and ranks; invalid descriptions are skipped by the machine,
    // so run the machine itself on the candidate program.
    for (int D = 1; 4 + gamma_length(D) + D + 1 + 1 + 2 <= remaining; ++D) {
      const std::size_t mark = program.size();
      program.push_back(1);
      program.push_back(1);
      program.push_back(1);
      program.push_back(1);
      push_gamma(static_cast<std::uint64_t>(D));
      const std::size_t payload_at = program.size();
      for (int i = 0; i < D; ++i) program.push_back(0);
      for (std::uint64_t payload = 0; payload < (1ull << D); ++payload) {
        for (int i = 0; i < D; ++i)
          program[payload_at + i] = static_cast<int>((payload >> (D - 1 - i)) & 1);
        for (int w = 1; 4 + gamma_length(D) + D + gamma_length(w) + w + 2 <= remaining; ++w) {
          for (std::uint64_t rank_bits = 0; rank_bits < (1ull << w); ++rank_bits) {
            const std::size_t mark2 = program.size();
            push_gamma(static_cast<std::uint64_t>(w));
            for (int i = 0; i < w; ++i)
              program.push_back(static_cast<int>((rank_bits >> (w - 1 - i)) & 1));
            // Tail must be a valid single-instruction suffix; delegate to
            // the machine with HALT appended.
            program.push_back(0);
            program.push_back(0);
            std::vector<int> out;
            std::uint64_t steps = 0;
            if (machine.run_into(program, out, steps) &&
                out.size() <= static_cast<std::size_t>(max_out)) {
              std::uint32_t value = 0;
              for (int b : out) value = (value << 1) | static_cast<std::uint32_t>(b);
              const std::uint32_t key = (static_cast<std::uint32_t>(out.size()) << 24) | value;
              const std::uint8_t len = static_cast<std::uint8_t>(program.size());
              auto [it, inserted] = table.try_emplace(key, len);
              if (!inserted && len < it->second) it->second = len;
            }
            program.resize(mark2);
          }
        }
      }
      program.resize(mark);
    }
  }
};

}  // namespace

std::unordered_map<std::uint32_t, std::uint8_t> syntactic_k_table(int length_cap, int max_output_len) {
  SyntacticSearch search;
  search.cap = length_cap;
  search.max_out = max_output_len;
  search.explore();
  return search.table;
}

// --------------------------------------------------------------------------
// Coding theorem
// --------------------------------------------------------------------------

CodingProgram coding_encoder(const Circuit& circuit, const BitString& x) {
  const FiniteDistribution dist = output_distribution(circuit);
  const double px = dist.prob(x);
  if (px <= 0.0) throw std::invalid_argument("coding_encoder: p_x = 0");

  // Rank of x in the support sorted by decreasing probability, ties
  // lexicographic. This must match the machine's SAMPLE_RANK order exactly.
  std::vector<std::size_t> order(dist.support_size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dist.probs()[a] != dist.probs()[b]) return dist.probs()[a] > dist.probs()[b];
    return dist.support()[a] < dist.support()[b];
  });
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (dist.support()[order[i]] == x) {
      rank = i;
      break;
    }
  }

  const std::vector<int> desc = encode_circuit_bits(circuit);

  CodingProgram prog;
  prog.desc_len = static_cast<int>(desc.size());
  prog.rank = rank;
  prog.rank_width = 1;
  while ((rank >> prog.rank_width) != 0) ++prog.rank_width;

  BitWriter w;
  w.push_bits(0b1111, 4);
  w.push_gamma(static_cast<std::uint64_t>(desc.size()));
  for (int b : desc) w.push_bit(b);
  w.push_gamma(static_cast<std::uint64_t>(prog.rank_width));
  w.push_bits(rank, prog.rank_width);
  w.push_bits(0b00, 2);
  prog.bits = w.bits();
  return prog;
}

std::string program_to_hex(const std::vector<int>& bits) {
  static const char* digits = "0123456789abcdef";
  std::string hex;
  int nibble = 0, filled = 0;
  for (int b : bits) {
    nibble = (nibble << 1) | (b & 1);
    if (++filled == 4) {
      hex += digits[nibble];
      nibble = 0;
      filled = 0;
    }
  }
  if (filled > 0) hex += digits[nibble << (4 - filled)];
  return std::to_string(bits.size()) + ":" + hex;
}

std::vector<int> program_from_hex(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("program hex: missing length prefix");
  const std::size_t len = std::stoull(text.substr(0, colon));
  const std::string hex = text.substr(colon + 1);
  if (hex.size() != (len + 3) / 4) throw std::invalid_argument("program hex: length mismatch");
  std::vector<int> bits;
  bits.reserve(len);
  for (char ch : hex) {
    int v;
    if (ch >= '0' && ch <= '9') v = ch - '0';
    else if (ch >= 'a' && ch <= 'f') v = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') v = ch - 'A' + 10;
    else throw std::invalid_argument("program hex: bad digit");
    for (int i = 3; i >= 0; --i)
      if (bits.size() < len) bits.push_back((v >> i) & 1);
  }
  // Padding bits past the stated length must be zero.
  const std::size_t used = bits.size();
  if (used != len) throw std::invalid_argument("program hex: truncated");
  const std::size_t tail = len % 4 == 0 ? 0 : 4 - len % 4;
  if (tail > 0) {
    const int last = hex.back() >= 'a' ? hex.back() - 'a' + 10
                     : hex.back() >= 'A' ? hex.back() - 'A' + 10
                                         : hex.back() - '0';
    if ((last & ((1 << tail) - 1)) != 0) throw std::invalid_argument("program hex: nonzero padding");
  }
  return bits;
}

bool CodingReport::all_passed() const {
  for (const CodingCheck& c : checks)
    if (!c.output_matches || !c.within_bound) return false;
  return true;
}

CodingReport verify_coding_theorem(const KolmogorovOracle& oracle, const Circuit& circuit) {
  const FiniteDistribution dist = output_distribution(circuit);
  CodingReport report;
  const double logn = std::log2(std::max(2, circuit.n_qubits));
  for (std::size_t i = 0; i < dist.support_size(); ++i) {
    const BitString& x = dist.support()[i];
    CodingProgram prog = coding_encoder(circuit, x);
    report.desc_len = prog.desc_len;

    CodingCheck check;
    check.x = x;
    check.p_x = dist.probs()[i];
    check.program_len = prog.bits.size();
    check.length_bound = -std::log2(check.p_x) + prog.desc_len + kCodingOverhead * logn;

    ToyMachine::RunResult run = oracle.machine().run(prog.bits);
    check.output_matches = run.valid && run.output.size() == static_cast<std::size_t>(x.size());
    if (check.output_matches) {
      for (int b = 0; b < x.size(); ++b)
        if (run.output[b] != x.bit(b)) {
          check.output_matches = false;
          break;
        }
    }
    check.within_bound = static_cast<double>(check.program_len) <= check.length_bound;
    check.oracle_k = oracle.k(x);
    if (check.oracle_k && static_cast<std::size_t>(*check.oracle_k) > check.program_len) {
      // The oracle found no shorter program than ours, yet ours is valid:
      // impossible unless the enumeration missed it.
      check.within_bound = false;
    }
    report.checks.push_back(std::move(check));
  }
  return report;
}

// --------------------------------------------------------------------------
// GapK
// --------------------------------------------------------------------------

std::optional<GapKAnswer> gapk_promise_truth(const KolmogorovOracle& oracle, const GapKInstance& inst) {
  if (inst.s1 >= inst.s2) throw std::invalid_argument("gapk: need s1 < s2");
  auto k = oracle.k(inst.x);
  if (!k) {
    // K > cap: a NO instance whenever the cap already reaches s2.
    if (oracle.length_cap() >= inst.s2 - 1) return GapKAnswer::No;
    return std::nullopt;
  }
  if (*k <= inst.s1) return GapKAnswer::Yes;
  if (*k >= inst.s2) return GapKAnswer::No;
  return std::nullopt;
}

double gapk_acceptance_threshold(int s, int delta) {
  if (delta % 2 != 0) throw std::invalid_argument("gapk: delta must be even");
  return std::pow(2.0, -s + delta / 2);
}

GapKAnswer gapk_decide_via_estimation(const std::function<double(const BitString&)>& estimate,
                                      const BitString& x, int s, int delta) {
  return estimate(x) >= gapk_acceptance_threshold(s, delta) ? GapKAnswer::Yes : GapKAnswer::No;
}

}  // namespace owp
