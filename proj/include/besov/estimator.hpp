#pragma once

// Empirical detail energies E_{n,j} (plug-in) and L_{n,j} (U-statistic) in
// O(n S) time, the index estimate and resolution-level rules.

#include "besov/wavelet.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace besov {

// Per-k sums of psi_{jk}(X_i) over a dense offset-indexed k range and the
// diagonal sum_i G_j(X_i, X_i).
struct BinnedCoefficients {
  int j = 0;
  long k_first = 0;
  std::vector<double> sums;
  double diag = 0.0;
  std::size_t n = 0;

  [[nodiscard]] long k_last() const noexcept { return k_first + static_cast<long>(sums.size()) - 1; }
  [[nodiscard]] double at(long k) const noexcept {
    return (k < k_first || k > k_last()) ? 0.0 : sums[static_cast<std::size_t>(k - k_first)];
  }
  // keys whose accumulated sum is nonzero
  [[nodiscard]] std::vector<long> keys() const;
};

// Single pass over the sample. The sample is split into fixed-size chunks,
// accumulated independently and merged in chunk order, so the result does
// not depend on `threads`.
BinnedCoefficients bin(std::span<const double> sample, const WaveletSystem& system, int j,
                       int threads = 1);

// sum_k (sums_k / n)^2
double e_nj(const BinnedCoefficients& b);
// n/(n-1) E - diag/(n(n-1)); ConfigError when n < 2.
double l_nj(const BinnedCoefficients& b);

// -log2(energy)/(2j) - 1/2, +infinity for energy <= 0.
double id_estimate(double energy, int j);

struct EnergyEstimate {
  int j = 0;
  std::size_t n = 0;
  double e_nj = 0.0;
  double l_nj = 0.0;
  double id_hat_E = 0.0;
  double id_hat_L = 0.0;
};

EnergyEstimate estimate_energy(std::span<const double> sample, const WaveletSystem& system, int j,
                               int threads = 1);

enum class ResolutionRule { Consistency2d1, Test2d3, QuarterLog, Explicit };

// consistency_2d1: floor(log2 n/(2d+1)); test_2d3: floor(log2 n/(2d+3));
// quarter_log: floor(log2 n/4); explicit: explicit_j. ConfigError if < 1.
int resolution(std::size_t n, ResolutionRule rule, int moment_degree, int explicit_j = 0);
ResolutionRule parse_resolution_rule(const std::string& name);
std::string to_string(ResolutionRule rule);

}  // namespace besov
