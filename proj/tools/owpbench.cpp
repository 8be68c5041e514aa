#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "owp/experiment.hpp"
#include "owp/hashing.hpp"
#include "owp/inverter.hpp"

namespace {

owp::ExperimentConfig make_config(const std::string& config_path, std::optional<std::uint64_t> seed,
                                  std::optional<std::string> out_dir, std::optional<int> trials) {
  owp::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = owp::load_config(config_path);
  owp::apply_env_overrides(cfg);
  if (seed) cfg.seed = *seed;
  if (out_dir) cfg.out_dir = *out_dir;
  if (trials) cfg.t = *trials;
  owp::validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-way puzzle / probability estimation / GapK workbench"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> trials;
  app.add_option("--config", config_path, "experiment config JSON");
  app.add_option("--seed", seed, "seed override");
  app.add_option("--out", out_dir, "output directory override");
  app.add_option("--trials", trials, "trial count override");

  auto* estimate = app.add_subcommand("estimate", "run the probability-estimation sweep");

  std::string only;
  auto* verify = app.add_subcommand("verify-lemmas", "run the lemma verification suite");
  verify->add_option("--only", only, "restrict to one lemma");

  auto* distinguish = app.add_subcommand("distinguish", "run the GapK distinguisher experiment");

  std::string gapk_x;
  auto* gapk = app.add_subcommand("gapk", "decide GapK via a probability-estimation oracle");
  gapk->add_option("--x", gapk_x, "input bit string")->required();

  int ht_n = 4, ht_k = 2, ht_t = 3;
  auto* hash_test = app.add_subcommand("hash-test", "exhaustive t-wise independence check");
  hash_test->add_option("--n", ht_n, "input width");
  hash_test->add_option("--k", ht_k, "output width");
  hash_test->add_option("--t", ht_t, "independence order (2 or 3)");

  auto* kolmo = app.add_subcommand("kolmo", "toy-machine Kolmogorov complexity tools");
  kolmo->require_subcommand(1);
  std::string kof_x;
  auto* k_of = kolmo->add_subcommand("k-of", "exact K of a bit string");
  k_of->add_option("bitstring", kof_x, "the string")->required();
  int cl_n = 8, cl_t = 10;
  auto* count_low = kolmo->add_subcommand("count-low-k", "count n-bit strings with K <= t");
  count_low->add_option("--n", cl_n, "string length")->required();
  count_low->add_option("--t", cl_t, "complexity threshold")->required();
  std::string enc_circuit, enc_x;
  auto* encode = kolmo->add_subcommand("encode", "build the coding-theorem program for x");
  encode->add_option("--dist", enc_circuit, "sampler description (circuit JSON)")->required();
  encode->add_option("--x", enc_x, "target string")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    owp::ExperimentConfig cfg = make_config(config_path, seed, out_dir, trials);

    if (*estimate) return owp::cmd_estimate(cfg);
    if (*verify) return owp::cmd_verify_lemmas(cfg, only);
    if (*distinguish) return owp::cmd_distinguish(cfg);

    if (*gapk) {
      const owp::FiniteDistribution d = owp::config_distribution(cfg);
      const owp::BitString x = owp::BitString::from_string(gapk_x);
      auto estimate_fn = [&d](const owp::BitString& q) { return d.prob(q); };
      const auto answer = owp::gapk_decide_via_estimation(estimate_fn, x, cfg.s, cfg.delta);
      std::cout << (answer == owp::GapKAnswer::Yes ? "YES" : "NO") << " (threshold "
                << owp::fmt_double(owp::gapk_acceptance_threshold(cfg.s, cfg.delta)) << ", estimate "
                << owp::fmt_double(d.prob(x)) << ")\n";
      return 0;
    }

    if (*hash_test) {
      const owp::IndependenceReport report = owp::verify_t_wise_independence(ht_n, ht_k, ht_t);
      std::cout << (report.passed() ? "PASS" : "FAIL") << " " << ht_t << "-wise independence n=" << ht_n
                << " k=" << ht_k << ": " << report.tuples_checked << " tuples, "
                << report.violations.size() << " violations\n";
      return report.passed() ? 0 : 1;
    }

    if (*k_of) {
      const owp::BitString x = owp::BitString::from_string(kof_x);
      owp::KolmogorovOracle oracle(cfg.k_cap);
      auto k = oracle.k(x);
      if (k)
        std::cout << "K(" << kof_x << ") = " << *k << "\n";
      else
        std::cout << "K(" << kof_x << ") > " << cfg.k_cap << " (enumeration cap)\n";
      return 0;
    }
    if (*count_low) {
      owp::KolmogorovOracle oracle(cfg.k_cap);
      const std::uint64_t count = oracle.count_low_k(cl_n, cl_t);
      std::cout << count << "\n";
      return 0;
    }
    if (*encode) {
      const owp::Circuit circuit = owp::load_circuit(enc_circuit);
      const owp::BitString x = owp::BitString::from_string(enc_x);
      const owp::CodingProgram prog = owp::coding_encoder(circuit, x);
      std::cout << "program_bits=" << prog.bits.size() << " desc_bits=" << prog.desc_len
                << " rank=" << prog.rank << "\n";
      std::cout << owp::program_to_hex(prog.bits) << "\n";
      return 0;
    }
  } catch (const owp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
