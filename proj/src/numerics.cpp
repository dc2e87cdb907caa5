#include "besov/numerics.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <array>

namespace besov {
namespace {

template <unsigned N>
QuadratureRule make_rule() {
  using Gauss = boost::math::quadrature::gauss<double, N>;
  const auto& abscissa = Gauss::abscissa();
  const auto& weights = Gauss::weights();
  QuadratureRule rule;
  // Boost stores the nonnegative half of the symmetric rule on [-1, 1].
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    const double x = abscissa[i];
    const double w = weights[i];
    rule.nodes.push_back(0.5 * (1.0 + x));
    rule.weights.push_back(0.5 * w);
    if (x != 0.0) {
      rule.nodes.push_back(0.5 * (1.0 - x));
      rule.weights.push_back(0.5 * w);
    }
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_rule_for_degree(int degree) {
  static const std::array<QuadratureRule, 8> rules = {
      make_rule<2>(), make_rule<3>(), make_rule<4>(), make_rule<5>(),
      make_rule<6>(), make_rule<7>(), make_rule<8>(), make_rule<10>()};
  static constexpr std::array<int, 8> points = {2, 3, 4, 5, 6, 7, 8, 10};
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (2 * points[i] - 1 >= degree) return rules[i];
  }
  return rules.back();
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate,
                          std::uint64_t stream) noexcept {
  return mix_seed(mix_seed(mix_seed(master) ^ replicate) ^ (stream * 0xD1B54A32D192ED03ULL));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double empirical_quantile(std::span<const double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace besov
