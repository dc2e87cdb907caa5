#include "besov/errors.hpp"
#include "besov/numerics.hpp"
#include "besov/projection.hpp"
#include "besov/smoothtest.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace besov;
using Catch::Approx;

namespace {

const WaveletSystem& db8() {
  static const WaveletSystem ws = WaveletSystem::create(8);
  return ws;
}

WaveletConstants rounded_constants() {
  WaveletConstants c = db8().constants();
  c.f_psi_inf = 0.02;
  return c;
}

TestConfig section7() {
  TestConfig c;
  c.z_alpha = -1.65;
  return c;
}

}  // namespace

TEST_CASE("threshold follows the two-term recipe") {
  const auto cfg = section7();
  const std::size_t n = std::size_t{1} << 21;
  const auto t = threshold_terms(cfg, rounded_constants(), n, 5);
  const double v = std::sqrt(0.02 + 1.0 / 5);
  const double xi = builtin(BuiltinDensity::Xi, 3)(1.25);
  const double var = -1.65 * 0.5 * v * std::sqrt(0.5 * xi / 2) * 0.5 / (std::sqrt(double(n)) * std::exp2(2.5));
  const double bias = std::pow(0.5 * v * 0.5, 2) * std::exp2(-5);
  CHECK(t.variance_term == Approx(var).epsilon(1e-14));
  CHECK(t.bias_term == Approx(bias).epsilon(1e-14));
  CHECK(t.threshold == Approx(var + bias).epsilon(1e-14));
  CHECK(t.variance_term < 0);
  CHECK(t.k_const == Approx(v));
  CHECK(t.mode == ConstantMode::VCorrection);
  // rounded xi3(1.25) = 0.007 moves the threshold very little
  const double var_rounded = var * std::sqrt(0.007 / xi);
  CHECK(t.threshold == Approx(var_rounded + bias).epsilon(1e-4));
}

TEST_CASE("threshold limits and monotonicity") {
  const auto wc = db8().constants();
  TestConfig half;
  half.alpha = 0.5;
  const auto t = threshold_terms(half, wc, 1000, 4);
  CHECK(t.z_alpha == Approx(0.0).margin(1e-15));
  CHECK(t.threshold == Approx(t.bias_term).epsilon(1e-12));

  TestConfig cfg;
  double prev = -1e300;
  for (std::size_t n = 1000; n < (std::size_t{1} << 40); n *= 16) {
    const auto u = threshold_terms(cfg, wc, n, 5);
    CHECK(u.threshold > prev);
    CHECK(u.threshold < u.bias_term);
    prev = u.threshold;
  }
  CHECK(prev == Approx(threshold_terms(cfg, wc, 1000, 5).bias_term).epsilon(1e-3));

  for (int j = 2; j < 10; ++j) {
    const auto a = threshold_terms(cfg, wc, 1 << 20, j);
    const auto b = threshold_terms(cfg, wc, 1 << 20, j + 1);
    CHECK(b.bias_term < a.bias_term);
  }
  double last = 1e300;
  for (double alpha : {0.4, 0.2, 0.05, 0.01, 0.001}) {
    cfg.alpha = alpha;
    const double thr = threshold(cfg, wc, 1 << 16, 4);
    CHECK(thr < last);
    last = thr;
  }
}

TEST_CASE("constant modes") {
  const auto wc = db8().constants();
  TestConfig cfg;
  cfg.mu0 = 2;
  const auto t = threshold_terms(cfg, wc, 1 << 20, 5);
  CHECK(t.mode == ConstantMode::Psi1);
  CHECK(t.k_const == wc.psi1);
  CHECK(t.mu0_factorial == 2.0);
  cfg.constant_mode = ConstantMode::VCorrection;
  CHECK(threshold_terms(cfg, wc, 1 << 20, 5).k_const == Approx(v_correction(5, wc.f_psi_inf)));
  CHECK(parse_constant_mode("psi1") == ConstantMode::Psi1);
  CHECK(to_string(ConstantMode::VCorrection) == "v_correction");
  CHECK_THROWS_AS(parse_constant_mode("psi"), ConfigError);
}

TEST_CASE("configuration errors") {
  const auto wc = db8().constants();
  TestConfig cfg;
  cfg.mu0 = 8;
  CHECK_THROWS_AS(threshold(cfg, wc, 1 << 20, 5), ConfigError);
  cfg.mu0 = 7;
  CHECK_NOTHROW(threshold(cfg, wc, 1 << 20, 5));
  cfg = TestConfig{};
  cfg.pi = 1.0;
  CHECK_THROWS_AS(threshold(cfg, wc, 1 << 20, 5), ConfigError);
  cfg = TestConfig{};
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(threshold(cfg, wc, 1 << 20, 5), ConfigError);
  cfg = TestConfig{};
  cfg.delta1_class = 0.0;
  CHECK_THROWS_AS(threshold(cfg, wc, 1 << 20, 5), ConfigError);
  CHECK_THROWS_AS(threshold(TestConfig{}, wc, 1, 5), ConfigError);
  CHECK_THROWS_AS(threshold(TestConfig{}, wc, 100, 0), ConfigError);
}

TEST_CASE("decisions") {
  const auto t = threshold_terms(section7(), db8().constants(), std::size_t{1} << 21, 5);
  CHECK(decide(t.threshold, t).reject);
  CHECK(decide(-1e-6, t).reject);
  CHECK(decide(0.0, t).reject);
  CHECK_FALSE(decide(std::nextafter(t.threshold, 1.0), t).reject);
  CHECK(decide(t.threshold, t).index_cutoff == Approx(-std::log2(t.threshold) / 10 - 0.5));

  // both forms of the rule agree away from the boundary
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-6.0, -1.0);
  for (int i = 0; i < 2000; ++i) {
    const double l = (i % 10 == 0 ? -1.0 : 1.0) * std::pow(10.0, u(rng));
    const auto o = decide(l, t);
    CHECK(o.reject == o.reject_index);
  }
}

TEST_CASE("replicates are reproducible and thread independent") {
  ReplicateSpec spec;
  spec.n_raw = 3000;
  spec.pi = 0.5;
  spec.tau = 3;
  spec.j = 3;
  spec.reps = 6;
  spec.seed = 17;
  const auto f1 = builtin(BuiltinDensity::F1);
  const auto a = run_replicates(f1, db8(), spec);
  spec.threads = 3;
  const auto b = run_replicates(f1, db8(), spec);
  REQUIRE(a.size() == 6);
  for (std::size_t r = 0; r < a.size(); ++r) {
    CHECK(a[r].l_nj == b[r].l_nj);
    CHECK(a[r].n == 6000);
    CHECK(a[r].seed == derive_seed(17, r, 0));
    CHECK(a[r].enrich_seed == derive_seed(17, r, 1));
  }
  spec.arm = 1;
  CHECK(run_replicates(f1, db8(), spec)[0].l_nj != a[0].l_nj);
}

TEST_CASE("power study bookkeeping") {
  TestConfig cfg;
  const auto s = power_study(builtin(BuiltinDensity::F0), builtin(BuiltinDensity::F1), db8(), cfg, 4096, 8, 5, 2);
  CHECK(s.n_enriched == 8192);
  CHECK(s.j == 3);
  CHECK(s.terms.n == 8192);
  CHECK(s.null_arm.rows.size() == 8);
  CHECK(s.alt_arm.outcomes.size() == 8);
  CHECK(s.size == double(s.null_arm.rejections) / 8);
  CHECK(s.null_arm.rules_agree);
  CHECK(s.alt_arm.rules_agree);
  std::size_t binned = s.alt_arm.id_histogram.infinite;
  for (auto c : s.alt_arm.id_histogram.counts) binned += c;
  CHECK(binned == 8);
  CHECK(power_study(builtin(BuiltinDensity::F0), builtin(BuiltinDensity::F1), db8(), cfg, 4096, 8, 5, 1).alt_arm.rows[3].l_nj ==
        s.alt_arm.rows[3].l_nj);
}

TEST_CASE("berry-esseen bound holds for the standardized statistic") {
  const auto& ws = db8();
  const auto f = builtin(BuiltinDensity::F1);
  const auto xi = builtin(BuiltinDensity::Xi, 3);
  const auto mix = mixture(f, xi, 0.5);
  const int j = 2;
  const std::size_t n_raw = 2048, n = 4096;
  const auto v = variance_terms(mix, ws, j);
  const double st = std::sqrt(v.sigma_tilde_sq);
  ReplicateSpec spec;
  spec.n_raw = n_raw;
  spec.pi = 0.5;
  spec.j = j;
  spec.reps = 300;
  spec.seed = 8;
  std::vector<double> z;
  for (const auto& r : run_replicates(f, ws, spec)) z.push_back(std::sqrt(double(n)) * (r.l_nj - v.qj_energy) / (2 * st));
  std::sort(z.begin(), z.end());
  const double d = ks_statistic(std::span<const double>(z), normal_cdf);
  const double bound = 6.1 * *v.g_abs_cube / (std::sqrt(double(n)) * st * st * st) +
                       (1 + std::sqrt(2.0)) * std::sqrt(v.sigma_sq) / (std::sqrt(2.0 * (n - 1)) * st);
  INFO("ks " << d << " bound " << bound);
  // sampling noise of the empirical cdf is added to the bound
  CHECK(d <= bound + 1.63 / std::sqrt(300.0));
}

TEST_CASE("gaussian calibration of the test form") {
  const auto& ws = db8();
  const auto mix = mixture(builtin(BuiltinDensity::F0), builtin(BuiltinDensity::Xi, 3), 0.5);
  const auto wc = ws.constants();
  for (int j : {3, 4, 5}) {
    const auto v = variance_terms(mix, ws, j, false);
    const double st = std::sqrt(v.sigma_tilde_sq);
    const std::size_t n = std::size_t{1} << (4 * j);
    const double z = normal_quantile(0.05);
    const double bound = std::pow(0.5 * wc.psi1 * 0.5, 2) * std::exp2(-j);
    const double thr = 2 * st * z / std::sqrt(double(n)) + bound;
    for (double scale : {1.0, 1.5, 4.0, 100.0}) {
      const double energy = bound * scale;
      const double p = normal_cdf((thr - energy) / (2 * st / std::sqrt(double(n))));
      CHECK(p <= 0.05 + 1e-12);
    }
    CHECK(v.qj_energy >= bound);
  }
}

TEST_CASE("histograms and summaries") {
  const auto h = make_histogram({0.0, 1.0, 0.5, INFINITY, 0.25}, 4);
  CHECK(h.infinite == 1);
  CHECK(h.lo == 0.0);
  CHECK(h.hi == 1.0);
  CHECK(h.counts == std::vector<std::size_t>{1, 1, 1, 1});
  CHECK(h.edge(2) == 0.5);
  CHECK_THROWS_AS(make_histogram({1.0}, 0), ConfigError);
  const auto flat = make_histogram({2.0, 2.0}, 3);
  CHECK(flat.counts[0] + flat.counts[1] + flat.counts[2] == 2);

  const auto m = summarize({1.0, 2.0, 3.0, INFINITY});
  CHECK(std::isinf(m.mean));
  CHECK(m.finite_mean == Approx(2.0));
  CHECK(m.sd == Approx(1.0));
  CHECK(m.infinite == 1);
  const auto k = summarize({1.0, 3.0});
  CHECK(k.mean == Approx(2.0));
  CHECK(k.q025 == Approx(1.05));
  CHECK_THROWS_AS(summarize({}), ConfigError);
}
