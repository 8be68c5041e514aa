#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "owp/breaker.hpp"
#include "owp/distribution.hpp"
#include "owp/estimator.hpp"
#include "owp/kolmo.hpp"
#include "owp/qsim.hpp"

namespace owp {

// Config validation failures carry the offending field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int n = 8;
  int c = 2;        // security exponent
  int d_exp = 1;    // Claim-close exponent
  int t = kDefaultTrialCount;  // per-k trial count / lemma hash samples
  int s = 23;       // GapK threshold
  int delta = 6;    // GapK gap (even)
  double gamma = 0.0;  // noisy-inverter corruption rate
  int samples = 200;   // sampled x count for sweeps
  int k_cap = 18;      // program enumeration cap
  std::string variant = "final";  // estimator guarantee: final | pairwise
  std::string oracle = "exact";   // distinguisher oracle: exact | random
  std::string distribution_file;  // empty: uniform over {0,1}^n
  std::string circuit_file;
  std::string sampler_file;
  std::string out_dir = "out";
  int workers = 0;  // 0: hardware concurrency
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);
void validate_config(const ExperimentConfig& cfg);
// Applies OWP_SEED / OWP_OUT environment overrides.
void apply_env_overrides(ExperimentConfig& cfg);
// FNV-1a over the canonical config serialization; joins outputs to configs.
std::uint64_t config_hash(const ExperimentConfig& cfg);

FiniteDistribution config_distribution(const ExperimentConfig& cfg);

// The five shipped fixture circuits (<= 8 qubits) used by the coding
// checks and available to the CLI when no circuit file is given.
std::vector<Circuit> builtin_fixture_circuits();
// The shipped entropy-gap sampler (m=10, t=2, GHZ-10 at the good advice).
AdvisedSampler builtin_fixture_sampler();

// Deterministic double formatting for result files.
std::string fmt_double(double v);

std::string bound_check_report_to_json(const BoundCheckReport& report);
std::string distinguisher_report_to_json(const DistinguisherReport& report);

// --------------------------------------------------------------------------
// Subcommand backends; pure result structs so tests can assert byte
// equality without touching the filesystem.
// --------------------------------------------------------------------------

struct EstimateSweepResult {
  std::string csv;
  std::string summary_json;
  double success_fraction = 0.0;
  double target = 0.0;
  bool passed = false;
};

EstimateSweepResult run_estimate_sweep(const ExperimentConfig& cfg);

struct LemmaSuiteResult {
  std::vector<BoundCheckReport> reports;
  std::vector<std::string> skipped;  // lemmas without inputs at this config
  bool all_passed = true;
  bool any_premise_failed = false;
};

LemmaSuiteResult run_lemma_suite(const ExperimentConfig& cfg, const std::string& only = "");

struct DistinguishResult {
  DistinguisherReport report;
  std::string json;
  std::string csv;
};

DistinguishResult run_distinguish(const ExperimentConfig& cfg);

// Command entry points; write files under cfg.out_dir, print one-line
// summaries, and return the process exit code (0 pass / premise-skip,
// 1 bound failure, 2 usage or config error).
int cmd_estimate(const ExperimentConfig& cfg);
int cmd_verify_lemmas(const ExperimentConfig& cfg, const std::string& only);
int cmd_distinguish(const ExperimentConfig& cfg);

}  // namespace owp
