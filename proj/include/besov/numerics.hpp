#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace besov {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  void merge(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Gauss-Legendre rule mapped to [0, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Smallest tabulated rule that integrates polynomials of degree `degree`
// exactly. Rules are cached; the reference stays valid for program lifetime.
const QuadratureRule& gauss_rule_for_degree(int degree);

// Exact integer factorial in double precision (n <= 170).
double factorial(int n);

// SplitMix64 finaliser; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

// Seed for (master, replicate, stream); distinct triples give unrelated seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate,
                          std::uint64_t stream) noexcept;

// Uniform double in [0, 1) from 53 random bits.
inline double bits_to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Standard normal CDF and lower-tail quantile.
double normal_cdf(double z);
double normal_quantile(double p);

// One-sample Kolmogorov-Smirnov statistic sup|F_n - F| for a continuous CDF.
// `sorted` must be ascending.
template <typename Cdf>
double ks_statistic(std::span<const double> sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - f,
                             f - static_cast<double>(i) / n));
  }
  return d;
}

// Empirical quantile with linear interpolation between order statistics.
// `sorted` must be ascending and nonempty.
double empirical_quantile(std::span<const double> sorted, double p);

}  // namespace besov
