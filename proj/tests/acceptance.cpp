// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <vector>

#include "owp/breaker.hpp"
#include "owp/estimator.hpp"
#include "owp/experiment.hpp"
#include "owp/inverter.hpp"
#include "owp/kolmo.hpp"
#include "owp/puzzle.hpp"

using namespace owp;

namespace {

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  std::function<bool(std::string&)> run;
};

FiniteDistribution skew3() {
  return FiniteDistribution::from_exact(3, {{BitString::from_string("000"), Rational(1, 2)},
                                            {BitString::from_string("010"), Rational(1, 4)},
                                            {BitString::from_string("101"), Rational(1, 8)},
                                            {BitString::from_string("111"), Rational(1, 8)}});
}

FiniteDistribution skew4() {
  return FiniteDistribution::from_exact(4, {{BitString::from_string("0000"), Rational(1, 2)},
                                            {BitString::from_string("0001"), Rational(1, 4)},
                                            {BitString::from_string("0110"), Rational(1, 8)},
                                            {BitString::from_string("1010"), Rational(1, 16)},
                                            {BitString::from_string("1100"), Rational(1, 32)},
                                            {BitString::from_string("1111"), Rational(1, 32)}});
}

FiniteDistribution skew5() {
  return FiniteDistribution::from_exact(5, {{BitString::from_string("00000"), Rational(1, 2)},
                                            {BitString::from_string("00111"), Rational(1, 4)},
                                            {BitString::from_string("10011"), Rational(1, 8)},
                                            {BitString::from_string("11110"), Rational(1, 8)}});
}

FiniteDistribution load_fixture_distribution(const std::string& name) {
  return load_distribution(std::string(OWP_FIXTURES_DIR) + "/" + name);
}

// Criterion 1: Monte Carlo and exhaustive-family evaluation of
// Pr[P_{k,x} -> x] against the closed form.
bool criterion_closed_form(std::string& detail) {
  const std::vector<FiniteDistribution> dists = {FiniteDistribution::uniform(3), skew3(), skew4(),
                                                 skew5()};
  SeededRng rng(0xC1);
  int cells = 0;
  double worst_mc_gap = 0.0;
  for (const auto& d : dists) {
    for (int k = 1; k <= d.n(); ++k) {
      for (const auto& x : d.support()) {
        const Rational closed = p_kx_hit_probability_exact(d, k, x);
        if (p_kx_hit_probability_exhaustive(d, k, x) != closed) {
          detail = "exhaustive evaluation differs from the closed form at n=" +
                   std::to_string(d.n()) + " k=" + std::to_string(k) + " x=" + x.to_string();
          return false;
        }
        ConditionedPreimageDistribution p(d, k, x);
        int hits = 0;
        const int trials = 10000;
        SeededRng cell = rng.substream(cells);
        for (int i = 0; i < trials; ++i)
          if (p.sample_joint(cell) == x) ++hits;
        const double gap = std::abs(hits / static_cast<double>(trials) - static_cast<double>(closed));
        worst_mc_gap = std::max(worst_mc_gap, gap);
        if (gap > 0.02) {
          detail = "Monte Carlo off the closed form by " + fmt_double(gap);
          return false;
        }
        ++cells;
      }
    }
  }
  detail = std::to_string(cells) + " cells, worst MC gap " + fmt_double(worst_mc_gap) +
           ", exhaustive == closed form exactly";
  return true;
}

// Criterion 2: estimator guarantee on uniform {0,1}^8.
bool criterion_estimator_guarantee(std::string& detail) {
  ExperimentConfig cfg;
  cfg.seed = 0xC2;
  cfg.n = 8;
  cfg.c = 4;
  cfg.t = 1024;
  cfg.samples = 200;
  EstimateSweepResult result = run_estimate_sweep(cfg);
  detail = "within-bounds fraction " + fmt_double(result.success_fraction) + " vs target " +
           fmt_double(result.target);
  return result.success_fraction >= 0.875;
}

// Criterion 3: exhaustive 3-wise independence and exact pairwise collision
// rates.
bool criterion_independence(std::string& detail) {
  std::uint64_t tuples = 0;
  for (int n = 1; n <= 4; ++n)
    for (int k = 1; k <= n; ++k)
      for (int t : {2, 3}) {
        if (t == 3 && (1ull << (3 * n)) < (1ull << (3 * k))) continue;
        if (t == 3 && n < 3) continue;  // needs three distinct inputs
        if (t == 2 && n < 2) continue;
        IndependenceReport report = verify_t_wise_independence(n, k, t);
        tuples += report.tuples_checked;
        if (!report.passed()) {
          detail = std::to_string(report.violations.size()) + " violations at n=" + std::to_string(n) +
                   " k=" + std::to_string(k) + " t=" + std::to_string(t);
          return false;
        }
      }
  for (int n = 2; n <= 4; ++n)
    for (int k = 1; k <= n; ++k)
      for (std::uint32_t x = 0; x < (1u << n); ++x)
        for (std::uint32_t xp = x + 1; xp < (1u << n); ++xp)
          if (exact_collision_rate(n, k, BitString(x, n), BitString(xp, n)) != Rational(1, 1 << k)) {
            detail = "pairwise collision rate differs from 2^-k";
            return false;
          }
  detail = std::to_string(tuples) + " input tuples checked, zero violations; collision rate 2^-k exact";
  return true;
}

// Criterion 4: the collision-mass concentration lemmas on uniform and
// skewed fixtures at n in {4, 8}.
bool criterion_concentration(std::string& detail) {
  const int trials = 10000;
  SeededRng rng(0xC4);
  int checks = 0;

  struct Fixture {
    FiniteDistribution d;
    std::vector<int> cheb_k;
  };
  std::vector<Fixture> fixtures;
  fixtures.push_back({FiniteDistribution::uniform(4), {1, 2}});
  fixtures.push_back({load_fixture_distribution("skewed_n4.json"), {1, 2}});
  fixtures.push_back({FiniteDistribution::uniform(8), {2, 4}});
  fixtures.push_back({load_fixture_distribution("skewed_n8.json"), {2, 4}});

  for (auto& fixture : fixtures) {
    for (int k : fixture.cheb_k) {
      BoundCheckReport report = verify_lemma_chebtrick(fixture.d, k, trials, rng);
      ++checks;
      if (!report.passed()) {
        detail = "chebtrick failed at n=" + std::to_string(fixture.d.n()) + " k=" + std::to_string(k);
        return false;
      }
    }
    // Least probable support string maximizes m.
    std::size_t lo = 0;
    for (std::size_t i = 1; i < fixture.d.support_size(); ++i)
      if (fixture.d.probs()[i] < fixture.d.probs()[lo]) lo = i;
    BoundCheckReport fs =
        verify_lemma_firstlem_secondlem(fixture.d, fixture.d.support()[lo], 1, trials, rng);
    ++checks;
    if (!fs.passed()) {
      detail = "firstlem/secondlem failed at n=" + std::to_string(fixture.d.n());
      return false;
    }
  }
  detail = std::to_string(checks) + " lemma reports, all within bound + 3 sigma";
  return true;
}

// Criterion 5: the counting lemma plus the cross-enumerator check.
bool criterion_counting(std::string& detail) {
  KolmogorovOracle oracle(14, 12);
  for (int n = 1; n <= 12; ++n)
    for (int t = 0; t <= 14; ++t) {
      const std::uint64_t count = oracle.count_low_k(n, t);
      if (count > (1ull << (t + 1)) - 1) {
        detail = "counting bound violated at n=" + std::to_string(n) + " t=" + std::to_string(t);
        return false;
      }
    }
  const auto cross = syntactic_k_table(14, 12);
  std::uint64_t entries = 0;
  for (int n = 0; n <= 12; ++n)
    for (std::uint32_t v = 0; v < (1u << n); ++v) {
      const BitString x(v, n);
      auto a = oracle.k(x);
      auto it = cross.find(pack_output_key(x));
      const bool b_has = it != cross.end();
      if (a.has_value() != b_has || (a.has_value() && *a != static_cast<int>(it->second))) {
        detail = "enumerators disagree at " + x.to_string();
        return false;
      }
      if (a) ++entries;
    }
  detail = "counts within 2^{t+1}-1 for n <= 12, t <= 14; enumerators agree on " +
           std::to_string(entries) + " strings";
  return true;
}

// Criterion 6: coding theorem on the five fixture circuits.
bool criterion_coding(std::string& detail) {
  KolmogorovOracle oracle(12, 12);
  const auto circuits = builtin_fixture_circuits();
  int strings = 0;
  for (const Circuit& circuit : circuits) {
    CodingReport report = verify_coding_theorem(oracle, circuit);
    strings += static_cast<int>(report.checks.size());
    if (!report.all_passed()) {
      detail = "coding bound or output failed on a circuit with " +
               std::to_string(report.checks.size()) + " support strings";
      return false;
    }
  }
  detail = std::to_string(strings) + " support strings across 5 circuits, 100% emit x within bound";
  return true;
}

// Criterion 7: GapK decider error with an epsilon-faulty estimation oracle.
bool criterion_gapk_error(std::string& detail) {
  KolmogorovOracle oracle(22, 12);
  const int m = 12;
  const int s = 23;
  const int delta = 6;
  const double alpha = gapk_acceptance_threshold(s, delta);

  const auto yes_strings = oracle.low_k_strings(m, s - delta);
  if (yes_strings.size() != 2) {
    detail = "expected exactly {0^12, 1^12} at K <= 17, found " + std::to_string(yes_strings.size());
    return false;
  }
  // Mid strings: inside the cap but above s - delta (promise gap).
  const auto within_cap = oracle.low_k_strings(m, 22);
  std::vector<BitString> mids;
  for (const auto& x : within_cap)
    if (oracle.k(x).value() > s - delta) mids.push_back(x);
  if (mids.size() < 2) {
    detail = "not enough gap strings for the ensemble";
    return false;
  }
  // NO strings: beyond the cap, hence K >= 23 = s.
  std::vector<BitString> nos;
  for (std::uint32_t v = 0xA53; nos.size() < 2; v += 0x2F1)
    if (!oracle.k(BitString(v & 0xFFF, m))) nos.push_back(BitString(v & 0xFFF, m));

  const Rational tiny(1, 1 << 21);
  std::vector<std::pair<BitString, Rational>> entries = {
      {yes_strings[0], Rational(1, 2)},        // correct YES
      {yes_strings[1], tiny},                  // YES with p < alpha: decided NO
      {mids[0], Rational(1, 4)},               // outside the promise
      {mids[1], Rational(1, 8)},               // outside the promise
      {nos[0], Rational(1, 16)},               // NO with p >= alpha: decided YES
      {nos[1], Rational(1, 16) - tiny},
  };
  auto ensemble = FiniteDistribution::from_exact(m, entries);
  const double structural_error = 1.0 / 8 + std::pow(2.0, -21);

  for (double eps : {0.0, 0.05}) {
    SeededRng rng(0xC7 + static_cast<int>(eps * 100));
    const int samples = 20000;
    int wrong = 0, in_promise = 0;
    for (int i = 0; i < samples; ++i) {
      const BitString x = ensemble.sample(rng);
      GapKInstance inst{x, s - delta, s};
      auto truth = gapk_promise_truth(oracle, inst);
      if (!truth) continue;
      ++in_promise;
      auto faulty = [&](const BitString& q) {
        const double p = ensemble.prob(q);
        if (rng.next_double() < eps) return p >= alpha ? alpha / 2 : 2 * alpha;
        return p;
      };
      const GapKAnswer answer = gapk_decide_via_estimation(faulty, x, s, delta);
      const bool answered_yes = answer == GapKAnswer::Yes;
      if (answered_yes != (*truth == GapKAnswer::Yes)) ++wrong;
    }
    const double error = static_cast<double>(wrong) / samples;
    const double budget = eps + 0.25 + three_sigma(samples);
    if (error > budget) {
      detail = "error " + fmt_double(error) + " above budget " + fmt_double(budget) +
               " at eps=" + fmt_double(eps);
      return false;
    }
    if (eps == 0.0) {
      detail = "structural error " + fmt_double(error) + " (construction predicts " +
               fmt_double(structural_error) + ") <= 2^-2";
    }
  }
  detail += "; faulty-oracle run within eps + 2^-2 + 3 sigma";
  return true;
}

// Criterion 8: distinguisher acceptance thresholds on the shipped fixture.
bool criterion_distinguisher(std::string& detail) {
  ExperimentConfig cfg;
  cfg.seed = 0xC8;
  cfg.n = 4;
  cfg.c = 2;
  cfg.k_cap = 18;
  cfg.sampler_file = std::string(OWP_FIXTURES_DIR) + "/sampler_m10_t2.json";
  DistinguishResult result = run_distinguish(cfg);
  const DistinguisherReport& r = result.report;
  detail = "accept(D(nu*)) = " + fmt_double(r.accept_good) + " >= " + fmt_double(r.threshold_good) +
           ", accept(U_m) = " + fmt_double(r.accept_uniform) + " <= " + fmt_double(r.threshold_uniform) +
           (r.thresholds.formula_feasible ? "" : " [formula threshold window empty; calibrated s1=" +
                                                   std::to_string(r.thresholds.used_s1) + "]");
  return r.passed() && r.exact_mode && r.entropy_gap_ok && r.constraint_ok;
}

// Criterion 9: exact-inverter soundness and the noisy wrapper.
bool criterion_inverter_soundness(std::string& detail) {
  {
    auto d = FiniteDistribution::uniform(3);
    ExactInverter inv(d);
    SeededRng rng(0xC9);
    SecurityReport r = distributional_security(d, inv, 1, rng);
    if (r.mode != SecurityMode::Exact || !r.sd_exact || *r.sd_exact != 0) {
      detail = "uniform n=3 exact distance not identically zero";
      return false;
    }
  }
  {
    auto d = skew4();
    ExactInverter inv(d);
    SeededRng rng(0xC9);
    SecurityReport r = distributional_security(d, inv, 1, rng);
    if (r.mode != SecurityMode::Exact || *r.sd_exact != 0) {
      detail = "skewed n=4 exact distance not identically zero";
      return false;
    }
  }
  {
    auto d = skew5();
    ExactInverter inv(d);
    SeededRng rng(0xC9);
    SecurityReport r = distributional_security(d, inv, 1, rng);
    if (r.mode != SecurityMode::Exact || *r.sd_exact != 0) {
      detail = "sparse n=5 exact distance not identically zero";
      return false;
    }
  }

  // Hole distribution with a point decoy in the hole: reported distance
  // must land within 0.02 of the injected rate.
  std::vector<std::pair<BitString, Rational>> entries;
  for (std::uint32_t v = 0; v < 7; ++v) entries.emplace_back(BitString(v, 3), Rational(1, 7));
  auto d = FiniteDistribution::from_exact(3, entries);
  auto inner = std::make_shared<ExactInverter>(d);
  for (double gamma : {0.05, 0.1, 0.3}) {
    NoisyInverter noisy(inner, gamma, FiniteDistribution::point_mass(BitString::from_string("111")));
    SeededRng rng(0xC9);
    SecurityReport r = distributional_security(d, noisy, 1, rng);
    if (std::abs(r.sd - gamma) > 0.02) {
      detail = "noisy wrapper reported " + fmt_double(r.sd) + " for gamma " + fmt_double(gamma);
      return false;
    }
  }
  detail = "joint distance exactly 0 at n=3,4,5; noisy wrapper reports gamma to within 0.02";
  return true;
}

// Criterion 10: byte-identical reruns, independent of worker count.
bool criterion_determinism(std::string& detail) {
  ExperimentConfig cfg;
  cfg.seed = 0xCA;
  cfg.n = 4;
  cfg.c = 4;
  cfg.t = 128;
  cfg.samples = 32;

  cfg.workers = 1;
  EstimateSweepResult serial = run_estimate_sweep(cfg);
  cfg.workers = 4;
  EstimateSweepResult parallel = run_estimate_sweep(cfg);
  EstimateSweepResult repeat = run_estimate_sweep(cfg);
  if (serial.csv != parallel.csv || serial.summary_json != parallel.summary_json) {
    detail = "estimate sweep differs across worker counts";
    return false;
  }
  if (repeat.csv != parallel.csv) {
    detail = "estimate sweep differs across reruns";
    return false;
  }

  ExperimentConfig dcfg;
  dcfg.seed = 0xCB;
  dcfg.n = 4;
  dcfg.c = 2;
  dcfg.k_cap = 18;
  DistinguishResult a = run_distinguish(dcfg);
  DistinguishResult b = run_distinguish(dcfg);
  if (a.json != b.json || a.csv != b.csv) {
    detail = "distinguisher outputs differ across reruns";
    return false;
  }
  detail = "estimate sweep and distinguisher outputs byte-identical across reruns and worker counts";
  return true;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "closed-form equivalence of Pr[P_{k,x} -> x]", 30.0, criterion_closed_form},
      {2, "estimator guarantee p_x <= A(x) <= 4n^{2c} p_x", 120.0, criterion_estimator_guarantee},
      {3, "exhaustive 3-wise independence", 60.0, criterion_independence},
      {4, "collision-mass concentration lemmas", 120.0, criterion_concentration},
      {5, "counting lemma + enumerator cross-check", 300.0, criterion_counting},
      {6, "coding theorem on fixture circuits", 60.0, criterion_coding},
      {7, "GapK decider error budget", 60.0, criterion_gapk_error},
      {8, "distinguisher acceptance thresholds", 120.0, criterion_distinguisher},
      {9, "exact-inverter soundness", 60.0, criterion_inverter_soundness},
      {10, "deterministic result files", 60.0, criterion_determinism},
  };

  int failures = 0;
  for (auto& criterion : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
            .count() /
        1000.0;
    if (seconds > criterion.time_limit_s) {
      ok = false;
      detail += " [exceeded " + fmt_double(criterion.time_limit_s) + "s runtime limit]";
    }
    if (!ok) ++failures;
    std::printf("%s criterion %2d (%.1fs): %s — %s\n", ok ? "PASS" : "FAIL", criterion.id, seconds,
                criterion.name.c_str(), detail.c_str());
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
