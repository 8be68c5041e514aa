#include "owp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace owp {

namespace {

void check_n(int n) {
  if (n < 1 || n > FiniteDistribution::kMaxBits)
    throw std::invalid_argument("FiniteDistribution: n out of range [1,24]");
}

}  // namespace

FiniteDistribution FiniteDistribution::from_float(int n,
                                                  std::vector<std::pair<BitString, double>> entries) {
  check_n(n);
  std::map<BitString, double> merged;
  double sum = 0.0;
  for (auto& [x, p] : entries) {
    if (x.size() != n) throw std::invalid_argument("FiniteDistribution: support element length mismatch");
    if (p < 0.0) throw std::invalid_argument("FiniteDistribution: negative probability");
    if (p > 0.0) merged[x] += p;
    sum += p;
  }
  if (merged.empty()) throw std::invalid_argument("FiniteDistribution: empty support");
  if (std::abs(sum - 1.0) > kNormTolerance)
    throw std::invalid_argument("FiniteDistribution: probabilities sum to " + std::to_string(sum));

  FiniteDistribution d;
  d.n_ = n;
  d.exact_ = false;
  for (auto& [x, p] : merged) {
    d.support_.push_back(x);
    d.probs_.push_back(p);
  }
  d.finalize_cdf();
  return d;
}

FiniteDistribution FiniteDistribution::from_exact(int n,
                                                  std::vector<std::pair<BitString, Rational>> entries) {
  check_n(n);
  std::map<BitString, Rational> merged;
  Rational sum = 0;
  for (auto& [x, p] : entries) {
    if (x.size() != n) throw std::invalid_argument("FiniteDistribution: support element length mismatch");
    if (p < 0) throw std::invalid_argument("FiniteDistribution: negative probability");
    if (p > 0) merged[x] += p;
    sum += p;
  }
  if (merged.empty()) throw std::invalid_argument("FiniteDistribution: empty support");
  if (sum != 1) throw std::invalid_argument("FiniteDistribution: exact probabilities must sum to 1");

  FiniteDistribution d;
  d.n_ = n;
  d.exact_ = true;
  for (auto& [x, p] : merged) {
    d.support_.push_back(x);
    d.exact_probs_.push_back(p);
    d.probs_.push_back(static_cast<double>(p));
  }
  d.finalize_cdf();
  return d;
}

FiniteDistribution FiniteDistribution::uniform(int n) {
  check_n(n);
  const std::uint32_t size = 1u << n;
  if (size <= kExactSupportLimit) {
    std::vector<std::pair<BitString, Rational>> entries;
    entries.reserve(size);
    const Rational p(1, size);
    for (std::uint32_t v = 0; v < size; ++v) entries.emplace_back(BitString(v, n), p);
    return from_exact(n, std::move(entries));
  }
  std::vector<std::pair<BitString, double>> entries;
  entries.reserve(size);
  const double p = 1.0 / static_cast<double>(size);
  for (std::uint32_t v = 0; v < size; ++v) entries.emplace_back(BitString(v, n), p);
  return from_float(n, std::move(entries));
}

FiniteDistribution FiniteDistribution::point_mass(const BitString& x) {
  return from_exact(x.size(), {{x, Rational(1)}});
}

void FiniteDistribution::finalize_cdf() {
  cdf_.resize(probs_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    acc += probs_[i];
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;
}

std::optional<std::size_t> FiniteDistribution::support_index(const BitString& x) const {
  if (x.size() != n_) throw std::invalid_argument("FiniteDistribution: query length mismatch");
  auto it = std::lower_bound(support_.begin(), support_.end(), x);
  if (it == support_.end() || *it != x) return std::nullopt;
  return static_cast<std::size_t>(it - support_.begin());
}

double FiniteDistribution::prob(const BitString& x) const {
  auto idx = support_index(x);
  return idx ? probs_[*idx] : 0.0;
}

Rational FiniteDistribution::prob_exact(const BitString& x) const {
  if (!exact_) throw std::logic_error("FiniteDistribution: exact mode required");
  auto idx = support_index(x);
  return idx ? exact_probs_[*idx] : Rational(0);
}

BitString FiniteDistribution::sample(SeededRng& rng) const {
  const double u = rng.next_double();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return support_[static_cast<std::size_t>(it - cdf_.begin())];
}

double FiniteDistribution::entropy() const {
  double h = 0.0;
  for (double p : probs_)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

int FiniteDistribution::ceil_neg_log2_prob(const BitString& x) const {
  if (exact_) {
    Rational p = prob_exact(x);
    if (p <= 0) throw std::invalid_argument("ceil_neg_log2_prob: zero probability");
    Rational pow2 = 1;  // 2^m
    for (int m = 0; m <= 2 * kMaxBits + 2; ++m) {
      if (p * pow2 >= 1) return m;
      pow2 *= 2;
    }
    throw std::logic_error("ceil_neg_log2_prob: probability implausibly small");
  }
  double p = prob(x);
  if (p <= 0.0) throw std::invalid_argument("ceil_neg_log2_prob: zero probability");
  double pow2 = 1.0;
  for (int m = 0; m <= 1100; ++m) {
    if (p * pow2 >= 1.0) return m;
    pow2 *= 2.0;
  }
  throw std::logic_error("ceil_neg_log2_prob: probability implausibly small");
}

double statistical_distance(const FiniteDistribution& a, const FiniteDistribution& b) {
  if (a.n() != b.n()) throw std::invalid_argument("statistical_distance: length mismatch");
  double total = 0.0;
  std::size_t i = 0, j = 0;
  const auto &sa = a.support(), &sb = b.support();
  while (i < sa.size() || j < sb.size()) {
    if (j >= sb.size() || (i < sa.size() && sa[i] < sb[j])) {
      total += a.probs()[i];
      ++i;
    } else if (i >= sa.size() || sb[j] < sa[i]) {
      total += b.probs()[j];
      ++j;
    } else {
      total += std::abs(a.probs()[i] - b.probs()[j]);
      ++i;
      ++j;
    }
  }
  return total / 2.0;
}

Rational statistical_distance_exact(const FiniteDistribution& a, const FiniteDistribution& b) {
  if (a.n() != b.n()) throw std::invalid_argument("statistical_distance: length mismatch");
  if (!a.exact() || !b.exact()) throw std::logic_error("statistical_distance_exact: exact mode required");
  Rational total = 0;
  std::size_t i = 0, j = 0;
  const auto &sa = a.support(), &sb = b.support();
  while (i < sa.size() || j < sb.size()) {
    if (j >= sb.size() || (i < sa.size() && sa[i] < sb[j])) {
      total += a.exact_probs()[i];
      ++i;
    } else if (i >= sa.size() || sb[j] < sa[i]) {
      total += b.exact_probs()[j];
      ++j;
    } else {
      Rational diff = a.exact_probs()[i] - b.exact_probs()[j];
      total += diff < 0 ? -diff : diff;
      ++i;
      ++j;
    }
  }
  return total / 2;
}

std::vector<BitString> tail_set(const FiniteDistribution& d, int c) {
  if (c < 1) throw std::invalid_argument("tail_set: c must be >= 1");
  // Pr[p_{x'} <= p_x] is a function of p_x only; compute cumulative mass by
  // ascending probability and keep the x whose cumulative rank mass stays
  // at or below n^-c.
  std::vector<std::size_t> order(d.support_size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<BitString> result;
  if (d.exact()) {
    const auto& p = d.exact_probs();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return p[i] < p[j]; });
    Rational threshold(1);
    for (int i = 0; i < c; ++i) threshold /= d.n();
    // cumulative[i] = Pr[p_{x'} <= p at rank i], ties grouped.
    Rational acc = 0;
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      Rational group = 0;
      while (j < order.size() && p[order[j]] == p[order[i]]) group += p[order[j++]];
      acc += group;
      if (acc <= threshold)
        for (std::size_t k = i; k < j; ++k) result.push_back(d.support()[order[k]]);
      i = j;
    }
  } else {
    const auto& p = d.probs();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return p[i] < p[j]; });
    const double threshold = std::pow(static_cast<double>(d.n()), -c);
    double acc = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      double group = 0.0;
      while (j < order.size() && p[order[j]] == p[order[i]]) group += p[order[j++]];
      acc += group;
      if (acc <= threshold)
        for (std::size_t k = i; k < j; ++k) result.push_back(d.support()[order[k]]);
      i = j;
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

double mass_of(const FiniteDistribution& d, const std::vector<BitString>& xs) {
  double m = 0.0;
  for (const auto& x : xs) m += d.prob(x);
  return m;
}

namespace {

Rational rational_from_fraction_string(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 >= text.size())
    throw std::invalid_argument("distribution json: bad fraction " + text);
  using boost::multiprecision::cpp_int;
  const cpp_int num(text.substr(0, slash));
  const cpp_int den(text.substr(slash + 1));
  if (den <= 0) throw std::invalid_argument("distribution json: nonpositive denominator in " + text);
  return Rational(num, den);
}

}  // namespace

FiniteDistribution distribution_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const int n = j.at("n").get<int>();
  const auto& probs = j.at("probs");

  bool exact = false;
  for (const auto& [key, value] : probs.items()) {
    (void)key;
    if (value.is_string()) exact = true;
  }

  if (exact) {
    std::vector<std::pair<BitString, Rational>> entries;
    for (const auto& [key, value] : probs.items()) {
      Rational p = value.is_string() ? rational_from_fraction_string(value.get<std::string>())
                                     : Rational(value.get<double>());
      entries.emplace_back(BitString::from_string(key), p);
    }
    return FiniteDistribution::from_exact(n, std::move(entries));
  }

  std::vector<std::pair<BitString, double>> entries;
  for (const auto& [key, value] : probs.items())
    entries.emplace_back(BitString::from_string(key), value.get<double>());
  return FiniteDistribution::from_float(n, std::move(entries));
}

std::string distribution_to_json(const FiniteDistribution& d) {
  nlohmann::json probs = nlohmann::json::object();
  if (d.exact()) {
    for (std::size_t i = 0; i < d.support_size(); ++i) {
      std::ostringstream os;
      os << boost::multiprecision::numerator(d.exact_probs()[i]) << '/'
         << boost::multiprecision::denominator(d.exact_probs()[i]);
      probs[d.support()[i].to_string()] = os.str();
    }
  } else {
    for (std::size_t i = 0; i < d.support_size(); ++i)
      probs[d.support()[i].to_string()] = d.probs()[i];
  }
  nlohmann::json j;
  j["n"] = d.n();
  j["probs"] = probs;
  return j.dump(2);
}

FiniteDistribution load_distribution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open distribution file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return distribution_from_json(ss.str());
}

}  // namespace owp
