#include "owp/puzzle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "owp/inverter.hpp"

namespace owp {

BitString puzzle_hash(const HashFunction& h, const BitString& x, int k) {
  BitString base = eval(h, x);
  if (k <= h.n) {
    if (base.size() != k) throw std::invalid_argument("puzzle_hash: hash width does not match k");
    return base;
  }
  return base.concat(BitString::zeros(k - h.n));
}

PuzzleInstance samp_candidate(const FiniteDistribution& d, SeededRng& rng) {
  const int n = d.n();
  PuzzleInstance p;
  p.k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * n)));
  p.h = sample_hash(n, effective_k(n, p.k), rng);
  p.key = d.sample(rng);
  p.y = puzzle_hash(p.h, p.key, p.k);
  return p;
}

namespace {

const char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<std::uint8_t>& data) {
  std::string out;
  std::size_t i = 0;
  while (i + 2 < data.size()) {
    std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += kB64Alphabet[(v >> 6) & 63];
    out += kB64Alphabet[v & 63];
    i += 3;
  }
  if (i + 1 == data.size()) {
    std::uint32_t v = data[i] << 16;
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == data.size()) {
    std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += kB64Alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) throw std::invalid_argument("base64: bad length");
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    std::uint32_t v = 0;
    for (int j = 0; j < 4; ++j) {
      char c = text[i + j];
      if (c == '=') {
        ++pad;
        v <<= 6;
      } else {
        int x = value_of(c);
        if (x < 0 || pad > 0) throw std::invalid_argument("base64: bad character");
        v = (v << 6) | static_cast<std::uint32_t>(x);
      }
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

}  // namespace

std::string puzzle_to_json(const PuzzleInstance& p) {
  nlohmann::json j;
  j["k"] = p.k;
  j["h"] = base64_encode(serialize_hash(p.h));
  j["y"] = p.y.to_string();
  return j.dump();
}

PuzzleInstance puzzle_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  PuzzleInstance p;
  p.k = j.at("k").get<int>();
  p.h = deserialize_hash(base64_decode(j.at("h").get<std::string>()));
  p.y = BitString::from_string(j.at("y").get<std::string>());
  if (p.y.size() != p.k) throw std::invalid_argument("puzzle json: y length does not match k");
  if (p.h.k != effective_k(p.h.n, p.k)) throw std::invalid_argument("puzzle json: hash width mismatch");
  return p;
}

namespace {

constexpr std::uint64_t kExactBudget = 1ull << 26;

double hoeffding_radius(std::uint64_t trials) {
  // 99% two-sided band for a mean of [0,1] samples.
  return trials == 0 ? 1.0 : std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(trials)));
}

bool exact_mode_feasible(const FiniteDistribution& d, const DistributionalInverter& inverter) {
  const int n = d.n();
  if (!d.exact() || 3 * n > 40) return false;
  const std::uint64_t family = 1ull << (3 * n);
  const std::uint64_t tuples = family * d.support_size() * static_cast<std::uint64_t>(2 * n);
  if (tuples > kExactBudget) return false;
  // Probe that the oracle can state its law.
  SeededRng probe(0xB0B5);
  HashFunction h = sample_hash(n, 1, probe);
  return inverter.output_distribution(1, h, puzzle_hash(h, d.support().front(), 1)).has_value();
}

SecurityReport run_exact(const FiniteDistribution& d, const DistributionalInverter& inverter) {
  const int n = d.n();
  const std::uint32_t q = 1u << n;
  const std::uint64_t family = 1ull << (3 * n);
  const auto& support = d.support();
  const auto& probs = d.exact_probs();

  Rational total = 0;  // sum over (k,h,y) of sum_x' |P - Ptilde| conditional masses
  std::vector<std::uint32_t> full_vals(support.size());

  for (int k = 1; k <= 2 * n; ++k) {
    const int keff = effective_k(n, k);
    HashFunction h;
    h.n = n;
    h.k = keff;
    for (std::uint32_t a = 0; a < q; ++a)
      for (std::uint32_t b = 0; b < q; ++b)
        for (std::uint32_t c = 0; c < q; ++c) {
          h.a = a;
          h.b = b;
          h.c = c;
          for (std::size_t i = 0; i < support.size(); ++i)
            full_vals[i] = eval_full(h, support[i]) >> (n - keff);

          // Group support indices by hash value.
          std::map<std::uint32_t, std::vector<std::size_t>> groups;
          for (std::size_t i = 0; i < support.size(); ++i) groups[full_vals[i]].push_back(i);

          for (const auto& [yv, members] : groups) {
            Rational q_y = 0;
            for (std::size_t i : members) q_y += probs[i];
            BitString y = puzzle_hash(h, support[members.front()], k);
            auto law = inverter.output_distribution(k, h, y);
            if (!law) throw std::logic_error("exact security mode: oracle withdrew its law");
            if (!law->exact())
              throw std::logic_error("exact security mode: oracle law must be exact");

            // Merge |p_x' 1[h(x')=y] - q_y * law(x')| over both supports.
            Rational term = 0;
            std::size_t gi = 0, li = 0;
            const auto& lsup = law->support();
            const auto& lprob = law->exact_probs();
            while (gi < members.size() || li < lsup.size()) {
              if (li >= lsup.size() ||
                  (gi < members.size() && support[members[gi]] < lsup[li])) {
                term += probs[members[gi]];
                ++gi;
              } else if (gi >= members.size() || lsup[li] < support[members[gi]]) {
                term += q_y * lprob[li];
                ++li;
              } else {
                Rational diff = probs[members[gi]] - q_y * lprob[li];
                term += diff < 0 ? -diff : diff;
                ++gi;
                ++li;
              }
            }
            total += term;
          }
        }
  }

  SecurityReport report;
  report.mode = SecurityMode::Exact;
  report.sd_exact = total / (Rational(2) * (2 * n) * family);
  report.sd = static_cast<double>(*report.sd_exact);
  report.trials = 0;
  report.confidence_radius = 0.0;
  return report;
}

SecurityReport run_conditional_mc(const FiniteDistribution& d, const DistributionalInverter& inverter,
                                  std::uint64_t trials, SeededRng& rng) {
  const int n = d.n();
  double acc = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * n)));
    HashFunction h = sample_hash(n, effective_k(n, k), rng);
    BitString x = d.sample(rng);
    BitString y = puzzle_hash(h, x, k);
    auto post = preimage_posterior(d, k, h, y);
    auto law = inverter.output_distribution(k, h, y);
    if (!post || !law) throw std::logic_error("conditional MC: missing law");
    acc += statistical_distance(*post, *law);
  }
  SecurityReport report;
  report.mode = SecurityMode::ConditionalMonteCarlo;
  report.sd = acc / static_cast<double>(trials);
  report.trials = trials;
  report.confidence_radius = hoeffding_radius(trials);
  return report;
}

SecurityReport run_histogram(const FiniteDistribution& d, const DistributionalInverter& inverter,
                             std::uint64_t trials, SeededRng& rng) {
  auto tuple_key = [](int k, const HashFunction& h, const BitString& y, const BitString& x) {
    std::ostringstream os;
    os << k << ':' << h.a << ',' << h.b << ',' << h.c << ':' << y.to_string() << ':' << x.to_string();
    return os.str();
  };
  std::unordered_map<std::string, double> honest, inverted;
  const double w = 1.0 / static_cast<double>(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    PuzzleInstance p = samp_candidate(d, rng);
    honest[tuple_key(p.k, p.h, p.y, p.key)] += w;
    BitString guess = inverter.invert(p.k, p.h, p.y, rng);
    inverted[tuple_key(p.k, p.h, p.y, guess)] += w;
  }
  double total = 0.0;
  for (const auto& [key, mass] : honest) {
    auto it = inverted.find(key);
    total += std::abs(mass - (it == inverted.end() ? 0.0 : it->second));
  }
  for (const auto& [key, mass] : inverted)
    if (honest.find(key) == honest.end()) total += mass;
  SecurityReport report;
  report.mode = SecurityMode::Histogram;
  report.sd = total / 2.0;
  report.trials = trials;
  report.confidence_radius = hoeffding_radius(trials);
  return report;
}

}  // namespace

SecurityReport distributional_security_with_mode(const FiniteDistribution& d,
                                                 const DistributionalInverter& inverter,
                                                 std::uint64_t trials, SeededRng& rng, SecurityMode mode) {
  switch (mode) {
    case SecurityMode::Exact: return run_exact(d, inverter);
    case SecurityMode::ConditionalMonteCarlo: return run_conditional_mc(d, inverter, trials, rng);
    case SecurityMode::Histogram: return run_histogram(d, inverter, trials, rng);
  }
  throw std::logic_error("distributional_security_with_mode: bad mode");
}

SecurityReport distributional_security(const FiniteDistribution& d, const DistributionalInverter& inverter,
                                       std::uint64_t trials, SeededRng& rng) {
  if (trials < 1) throw std::invalid_argument("distributional_security: trials >= 1 required");
  if (exact_mode_feasible(d, inverter)) return run_exact(d, inverter);
  SeededRng probe(0xB0B5);
  HashFunction h = sample_hash(d.n(), 1, probe);
  if (inverter.output_distribution(1, h, puzzle_hash(h, d.support().front(), 1)))
    return run_conditional_mc(d, inverter, trials, rng);
  return run_histogram(d, inverter, trials, rng);
}

Verifier equality_verifier() {
  return [](const BitString& key, const PuzzleInstance& p) { return key == p.key; };
}

Verifier hash_consistency_verifier() {
  return [](const BitString& key, const PuzzleInstance& p) {
    return key.size() == p.h.n && puzzle_hash(p.h, key, p.k) == p.y;
  };
}

GameResult owpuzz_security_game(const FiniteDistribution& d, const Verifier& ver, const Adversary& adversary,
                                std::uint64_t trials, SeededRng& rng) {
  if (trials < 1) throw std::invalid_argument("owpuzz_security_game: trials >= 1 required");
  GameResult result;
  result.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    PuzzleInstance full = samp_candidate(d, rng);
    PuzzleInstance stripped = full;
    stripped.key = BitString();
    BitString guess = adversary(stripped, rng);
    if (ver(guess, full)) ++result.successes;
  }
  result.success_rate = static_cast<double>(result.successes) / static_cast<double>(trials);
  return result;
}

}  // namespace owp
