#include "besov/errors.hpp"
#include "besov/estimator.hpp"
#include "besov/projection.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace besov;
using Catch::Approx;

namespace {

const WaveletSystem& db(int order) {
  static std::vector<std::optional<WaveletSystem>> cache(21);
  auto& w = cache[static_cast<std::size_t>(order)];
  if (!w) w = WaveletSystem::create(order);
  return *w;
}

struct Brute {
  double e = 0.0;
  double l = 0.0;
};

// dense-k definitions: E = sum_k (mean psi_jk)^2, L = mean over i != l of G_j(X_i, X_l)
Brute brute_force(const std::vector<double>& xs, const WaveletSystem& ws, int j) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  const long k0 = static_cast<long>(std::floor(std::ldexp(*lo, j))) - ws.support() - 1;
  const long k1 = static_cast<long>(std::ceil(std::ldexp(*hi, j))) + 1;
  const auto width = static_cast<std::size_t>(k1 - k0 + 1);
  const std::size_t n = xs.size();
  std::vector<double> v(n * width);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < width; ++k) v[i * width + k] = ws.psi_jk(j, k0 + static_cast<long>(k), xs[i]);
  Brute b;
  for (std::size_t k = 0; k < width; ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += v[i * width + k];
    m /= static_cast<double>(n);
    b.e += m * m;
  }
  double pairs = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = i + 1; l < n; ++l) {
      double g = 0.0;
      for (std::size_t k = 0; k < width; ++k) g += v[i * width + k] * v[l * width + k];
      pairs += g;
    }
  b.l = 2.0 * pairs / (static_cast<double>(n) * static_cast<double>(n - 1));
  return b;
}

}  // namespace

TEST_CASE("statistics equal their pairwise definitions") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> names = {"f0", "f1", "parabola", "xi3", "step"};
  const std::vector<int> orders = {2, 4, 8};
  for (int c = 0; c < 20; ++c) {
    const auto& name = names[rng() % names.size()];
    const int order = orders[rng() % orders.size()];
    const int j = 1 + static_cast<int>(rng() % 6);
    const std::size_t n = 2 + rng() % 1999;
    const auto s = sample(builtin(name), n, rng());
    const auto& ws = db(order);
    const auto e = estimate_energy(s.values, ws, j);
    const auto b = brute_force(s.values, ws, j);
    INFO(name << " order " << order << " j " << j << " n " << n);
    CHECK(e.e_nj == Approx(b.e).margin(1e-10));
    CHECK(e.l_nj == Approx(b.l).margin(1e-10));
  }
}

TEST_CASE("two points") {
  const auto& ws = db(4);
  const std::vector<double> xs = {0.3, 0.41};
  const int j = 3;
  double g = 0.0;
  for (long k = -10; k <= 10; ++k) g += ws.psi_jk(j, k, xs[0]) * ws.psi_jk(j, k, xs[1]);
  CHECK(estimate_energy(xs, ws, j).l_nj == Approx(g).margin(1e-12));
  CHECK_THROWS_AS(estimate_energy(std::vector<double>{0.5}, ws, j), ConfigError);
}

TEST_CASE("binning invariants") {
  const auto& ws = db(8);
  const auto& c = ws.constants();
  const int j = 4;
  const auto one = bin(std::vector<double>{0.377}, ws, j);
  CHECK(one.keys().size() <= static_cast<std::size_t>(ws.support() + 1));
  const auto s = sample(builtin(BuiltinDensity::F0), 10000, 2);
  const auto b = bin(s.values, ws, j);
  CHECK(b.diag <= 10000 * c.psi0 * c.psi2 * std::ldexp(1.0, j));
  CHECK(b.diag > 0);
  CHECK(b.n == 10000);
  CHECK(b.at(b.k_first - 1) == 0.0);
  CHECK(b.at(b.k_last() + 1) == 0.0);
  CHECK_THROWS_AS(bin(std::vector<double>{0.1, NAN}, ws, j), ConfigError);
}

TEST_CASE("unbiasedness of L") {
  struct Case {
    PiecewisePolyDensity f;
    int j;
  };
  const auto& ws = db(8);
  const std::vector<Case> cases = {
      {builtin(BuiltinDensity::F0), 2},
      {builtin(BuiltinDensity::F1), 1},
      {mixture(builtin(BuiltinDensity::Parabola), builtin(BuiltinDensity::Xi, 4), 0.5), 2}};
  for (const auto& cs : cases) {
    const double truth = coefficients(cs.f, ws, cs.j).energy();
    const int reps = 300;
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto s = sample(cs.f, 2048, 1000 + static_cast<std::uint64_t>(r));
      const double l = estimate_energy(s.values, ws, cs.j).l_nj;
      sum += l;
      sum2 += l * l;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sum2 / reps - mean * mean) / (reps - 1));
    INFO(cs.f.label() << " j " << cs.j << " mean " << mean << " truth " << truth << " se " << se);
    CHECK(std::abs(mean - truth) <= 3 * se);
  }
}

TEST_CASE("permutation, sign and thread-count invariance") {
  const auto& ws = db(8);
  const auto s = enrich(sample(builtin(BuiltinDensity::F1), 100000, 4), builtin(BuiltinDensity::Xi, 3), 0.5, 5);
  const int j = 5;
  const auto ref = estimate_energy(s.values, ws, j, 1);

  auto shuffled = s.values;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(99));
  const auto p = estimate_energy(shuffled, ws, j);
  CHECK(p.e_nj == Approx(ref.e_nj).margin(1e-12));
  CHECK(p.l_nj == Approx(ref.l_nj).margin(1e-12));

  const WaveletSystem neg(ws.filter(), ws.table().negated());
  const auto q = estimate_energy(s.values, neg, j);
  CHECK(q.e_nj == Approx(ref.e_nj).margin(1e-15));
  CHECK(q.l_nj == Approx(ref.l_nj).margin(1e-15));

  for (int t : {2, 3, 8}) {
    const auto m = estimate_energy(s.values, ws, j, t);
    CHECK(m.e_nj == ref.e_nj);
    CHECK(m.l_nj == ref.l_nj);
  }
  const auto b1 = bin(s.values, ws, j, 1);
  const auto b4 = bin(s.values, ws, j, 4);
  CHECK(b1.sums == b4.sums);
  CHECK(b1.diag == b4.diag);
}

TEST_CASE("index estimate") {
  for (int j : {1, 4, 7})
    for (int m : {0, 1, 3}) CHECK(id_estimate(std::exp2(-j * (2 * m + 1)), j) == Approx(m).margin(1e-12));
  CHECK(std::isinf(id_estimate(0.0, 5)));
  CHECK(std::isinf(id_estimate(-1e-9, 5)));
  CHECK(id_estimate(-1e-9, 5) > 0);
  CHECK_THROWS_AS(id_estimate(0.1, 0), ConfigError);
}

TEST_CASE("resolution rules") {
  CHECK(resolution(std::size_t{1} << 16, ResolutionRule::QuarterLog, 7) == 4);
  CHECK(resolution(std::size_t{1} << 20, ResolutionRule::QuarterLog, 7) == 5);
  CHECK(resolution(std::size_t{1} << 24, ResolutionRule::QuarterLog, 7) == 6);
  CHECK(resolution((std::size_t{1} << 20) - 1, ResolutionRule::QuarterLog, 7) == 4);
  CHECK(resolution(std::size_t{1} << 21, ResolutionRule::QuarterLog, 7) == 5);
  CHECK(resolution(std::size_t{1} << 15, ResolutionRule::Consistency2d1, 1) == 5);
  CHECK(resolution(std::size_t{1} << 20, ResolutionRule::Test2d3, 1) == 4);
  CHECK(resolution(100, ResolutionRule::Explicit, 7, 9) == 9);
  CHECK_THROWS_AS(resolution(1000, ResolutionRule::Consistency2d1, 7), ConfigError);
  CHECK_THROWS_AS(resolution(1, ResolutionRule::QuarterLog, 7), ConfigError);
  CHECK_THROWS_AS(resolution(100, ResolutionRule::Explicit, 7, 0), ConfigError);
  CHECK(parse_resolution_rule("test_2d3") == ResolutionRule::Test2d3);
  CHECK(to_string(ResolutionRule::QuarterLog) == "quarter_log");
  CHECK_THROWS_AS(parse_resolution_rule("log"), ConfigError);
}
