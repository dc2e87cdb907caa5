#pragma once

// The smoothness test H0: id(f) <= mu0 against H1: id(f) >= mu0 + 1 on an
// enriched sample: closed-form rejection threshold, the equivalent
// index-form rule, and replicate studies of size and power.

#include "besov/densities.hpp"
#include "besov/estimator.hpp"
#include "besov/wavelet.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace besov {

enum class ConstantMode { Psi1, VCorrection };

ConstantMode parse_constant_mode(const std::string& name);
std::string to_string(ConstantMode mode);

struct TestConfig {
  int mu0 = 0;
  double alpha = 0.05;
  std::optional<double> z_alpha;  // overrides the quantile of alpha
  double pi = 0.5;
  int tau = 3;
  double delta1_class = 0.5;
  // Default: VCorrection when mu0 = 0, Psi1 otherwise.
  std::optional<ConstantMode> constant_mode;
  ResolutionRule rule = ResolutionRule::QuarterLog;
  int explicit_j = 0;

  [[nodiscard]] double z() const;
  [[nodiscard]] ConstantMode mode() const;
  // ConfigError on inconsistent fields or mu0 > moment_degree.
  void validate(int moment_degree) const;
};

// Every factor entering the threshold.
struct ThresholdTerms {
  double z_alpha = 0.0;
  double delta1_class = 0.0;
  ConstantMode mode = ConstantMode::VCorrection;
  double k_const = 0.0;    // constant actually used
  double psi1 = 0.0;
  double v_j = 0.0;        // sqrt(inf F_psi + 1/j)
  double f_psi_inf = 0.0;
  double xi_at = 0.0;      // xi_tau(1.25)
  int tau = 0;
  double pi = 0.0;
  int mu0 = 0;
  double mu0_factorial = 1.0;
  std::size_t n = 0;       // enriched sample size
  int j = 0;
  double variance_term = 0.0;  // negative for alpha < 1/2
  double bias_term = 0.0;
  double threshold = 0.0;
};

ThresholdTerms threshold_terms(const TestConfig& config, const WaveletConstants& constants,
                               std::size_t n, int j);
double threshold(const TestConfig& config, const WaveletConstants& constants, std::size_t n, int j);

// -log2(threshold)/(2j) - 1/2 (+infinity when threshold <= 0).
double index_cutoff(double threshold, int j);

struct TestOutcome {
  double l_nj = 0.0;
  double id_hat = 0.0;
  double threshold = 0.0;
  double index_cutoff = 0.0;
  bool reject = false;        // l_nj <= threshold
  bool reject_index = false;  // id_hat >= index_cutoff
  int j = 0;
  std::size_t n = 0;
};

TestOutcome decide(double l_nj, const ThresholdTerms& terms);

// ---------------------------------------------------------------------------

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
  std::size_t infinite = 0;  // +infinity sentinels, not binned

  [[nodiscard]] double edge(std::size_t i) const noexcept;
};

Histogram make_histogram(const std::vector<double>& values, std::size_t bins);

struct ReplicateRow {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::uint64_t enrich_seed = 0;
  std::size_t n = 0;  // sample size the statistics were computed on
  double e_nj = 0.0;
  double l_nj = 0.0;
  double id_hat_E = 0.0;
  double id_hat_L = 0.0;
};

struct ReplicateSpec {
  std::size_t n_raw = 0;
  double pi = 0.0;  // 0: no enrichment
  int tau = 3;
  int j = 1;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  std::uint64_t arm = 0;  // separates seed streams of different densities
  int threads = 1;
};

// Replicate r draws with seed derive_seed(seed, r, 2 arm) and enriches with
// derive_seed(seed, r, 2 arm + 1). Independent of the thread count.
std::vector<ReplicateRow> run_replicates(const PiecewisePolyDensity& density, const WaveletSystem& system,
                                         const ReplicateSpec& spec);

struct ArmSummary {
  std::string density;
  std::vector<ReplicateRow> rows;
  std::vector<TestOutcome> outcomes;
  std::size_t rejections = 0;
  double rejection_rate = 0.0;
  bool rules_agree = true;
  Histogram id_histogram;
};

struct StudySummary {
  TestConfig config;
  ThresholdTerms terms;
  std::size_t n_raw = 0;
  std::size_t n_enriched = 0;
  int j = 0;
  ArmSummary null_arm;
  ArmSummary alt_arm;
  double size = 0.0;   // rejection rate under the null density
  double power = 0.0;  // rejection rate under the alternative
};

StudySummary power_study(const PiecewisePolyDensity& f_null, const PiecewisePolyDensity& f_alt,
                         const WaveletSystem& system, const TestConfig& config, std::size_t n,
                         std::size_t replicates, std::uint64_t master_seed, int threads = 1,
                         std::optional<int> j_override = std::nullopt);

struct MeanSpread {
  double mean = 0.0;  // +infinity if any value is infinite
  double sd = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  std::size_t infinite = 0;
  double finite_mean = 0.0;  // mean over finite values only
};

MeanSpread summarize(std::vector<double> values);

}  // namespace besov
