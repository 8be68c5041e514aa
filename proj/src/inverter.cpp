#include "owp/inverter.hpp"

#include <stdexcept>

namespace owp {

std::optional<FiniteDistribution> preimage_posterior(const FiniteDistribution& d, int k,
                                                     const HashFunction& h, const BitString& y) {
  if (y.size() != k) throw std::invalid_argument("preimage_posterior: y length must equal k");
  if (h.n != d.n()) throw std::invalid_argument("preimage_posterior: hash width mismatch");

  if (d.exact()) {
    std::vector<std::pair<BitString, Rational>> kept;
    Rational mass = 0;
    for (std::size_t i = 0; i < d.support_size(); ++i) {
      if (puzzle_hash(h, d.support()[i], k) == y) {
        kept.emplace_back(d.support()[i], d.exact_probs()[i]);
        mass += d.exact_probs()[i];
      }
    }
    if (kept.empty()) return std::nullopt;
    for (auto& [x, p] : kept) p /= mass;
    return FiniteDistribution::from_exact(d.n(), std::move(kept));
  }

  std::vector<std::pair<BitString, double>> kept;
  double mass = 0.0;
  for (std::size_t i = 0; i < d.support_size(); ++i) {
    if (puzzle_hash(h, d.support()[i], k) == y) {
      kept.emplace_back(d.support()[i], d.probs()[i]);
      mass += d.probs()[i];
    }
  }
  if (kept.empty()) return std::nullopt;
  for (auto& [x, p] : kept) p /= mass;
  return FiniteDistribution::from_float(d.n(), std::move(kept));
}

ExactInverter::ExactInverter(FiniteDistribution d) : d_(std::move(d)) {
  support_squares_.reserve(d_.support_size());
  for (const BitString& x : d_.support())
    support_squares_.push_back(gf2::mul(x.value(), x.value(), d_.n()));
}

BitString ExactInverter::invert(int k, const HashFunction& h, const BitString& y, SeededRng& rng) const {
  if (y.size() != k) throw std::invalid_argument("invert: y length must equal k");
  if (h.n != d_.n()) throw std::invalid_argument("invert: hash width mismatch");
  // Single pass: collect preimage masses, then inverse-CDF over them.
  // The y value is compared at the hash's own width; padding bits past it
  // are zero by construction.
  const int shift = h.n - h.k;
  const std::uint32_t y_val = y.value() >> (k - h.k);
  if (k > h.k && (y.value() & ((1u << (k - h.k)) - 1)) != 0) return BitString::zeros(d_.n());

  std::vector<std::size_t> members;
  double mass = 0.0;
  for (std::size_t i = 0; i < d_.support_size(); ++i) {
    const std::uint32_t hv =
        (gf2::mul(h.a, support_squares_[i], h.n) ^ gf2::mul(h.b, d_.support()[i].value(), h.n) ^ h.c) >>
        shift;
    if (hv == y_val) {
      members.push_back(i);
      mass += d_.probs()[i];
    }
  }
  if (members.empty() || mass <= 0.0) return BitString::zeros(d_.n());
  double u = rng.next_double() * mass;
  double acc = 0.0;
  for (std::size_t i : members) {
    acc += d_.probs()[i];
    if (u < acc) return d_.support()[i];
  }
  return d_.support()[members.back()];
}

std::optional<FiniteDistribution> ExactInverter::output_distribution(int k, const HashFunction& h,
                                                                     const BitString& y) const {
  auto post = preimage_posterior(d_, k, h, y);
  if (post) return post;
  // invert() answers 0^n on empty preimages, so that is the actual law.
  return FiniteDistribution::point_mass(BitString::zeros(d_.n()));
}

namespace {

FiniteDistribution mix_laws(const FiniteDistribution& a, const FiniteDistribution& b, double w_a) {
  if (a.n() != b.n()) throw std::invalid_argument("mix_laws: length mismatch");
  if (a.exact() && b.exact()) {
    const Rational w(w_a);
    std::vector<std::pair<BitString, Rational>> entries;
    for (std::size_t i = 0; i < a.support_size(); ++i)
      entries.emplace_back(a.support()[i], w * a.exact_probs()[i]);
    for (std::size_t i = 0; i < b.support_size(); ++i)
      entries.emplace_back(b.support()[i], (1 - w) * b.exact_probs()[i]);
    return FiniteDistribution::from_exact(a.n(), std::move(entries));
  }
  std::vector<std::pair<BitString, double>> entries;
  for (std::size_t i = 0; i < a.support_size(); ++i)
    entries.emplace_back(a.support()[i], w_a * a.probs()[i]);
  for (std::size_t i = 0; i < b.support_size(); ++i)
    entries.emplace_back(b.support()[i], (1.0 - w_a) * b.probs()[i]);
  return FiniteDistribution::from_float(a.n(), std::move(entries));
}

}  // namespace

NoisyInverter::NoisyInverter(std::shared_ptr<const ExactInverter> inner, double gamma, FiniteDistribution decoy)
    : inner_(std::move(inner)), gamma_(gamma), decoy_(std::move(decoy)) {
  if (!inner_) throw std::invalid_argument("NoisyInverter: null inner inverter");
  if (gamma_ < 0.0 || gamma_ > 1.0) throw std::invalid_argument("NoisyInverter: gamma in [0,1] required");
  if (decoy_.n() != inner_->distribution().n())
    throw std::invalid_argument("NoisyInverter: decoy length mismatch");
}

NoisyInverter NoisyInverter::with_uniform_decoy(std::shared_ptr<const ExactInverter> inner, double gamma) {
  const int n = inner->distribution().n();
  return NoisyInverter(std::move(inner), gamma, FiniteDistribution::uniform(n));
}

BitString NoisyInverter::invert(int k, const HashFunction& h, const BitString& y, SeededRng& rng) const {
  if (rng.next_double() < gamma_) return decoy_.sample(rng);
  return inner_->invert(k, h, y, rng);
}

std::optional<FiniteDistribution> NoisyInverter::output_distribution(int k, const HashFunction& h,
                                                                     const BitString& y) const {
  auto inner_law = inner_->output_distribution(k, h, y);
  if (!inner_law) return std::nullopt;
  if (gamma_ == 0.0) return inner_law;
  if (gamma_ == 1.0) return decoy_;
  return mix_laws(decoy_, *inner_law, gamma_);
}

}  // namespace owp
