#include "besov/errors.hpp"
#include "besov/numerics.hpp"
#include "besov/projection.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace besov;
using Catch::Approx;

namespace {

const WaveletSystem& db(int order) {
  static std::vector<std::optional<WaveletSystem>> cache(21);
  auto& w = cache[static_cast<std::size_t>(order)];
  if (!w) w = WaveletSystem::create(order);
  return *w;
}

// int (p^(q))^2 over the support, exact
double derivative_l2_sq(const PiecewisePolyDensity& f, int q) {
  double s = 0.0;
  const auto& bp = f.breakpoints();
  for (std::size_t i = 0; i < f.pieces().size(); ++i) {
    Polynomial p = f.pieces()[i];
    for (int r = 0; r < q; ++r) p = p.derivative();
    const Polynomial a = (p * p).antiderivative();
    s += a(bp[i + 1]) - a(bp[i]);
  }
  return s;
}

}  // namespace

TEST_CASE("haar closed forms") {
  const auto haar = WaveletSystem::create(1);
  const auto step = builtin(BuiltinDensity::Step);
  const auto c = coefficients(step, haar, 0);
  // the interpolated table smears each jump over one cell
  const double h = haar.table().spacing();
  CHECK(c.at(0) == Approx(0.0).margin(h));
  CHECK(qj_norm(c, haar, 2.0) == Approx(0.0).margin(h));

  // an identically zero psi sees nothing
  const auto& t = haar.table();
  const WaveletSystem blind(build_filter(1),
                            DyadicTable(1, t.level(), std::vector<double>(t.phi().begin(), t.phi().end()),
                                        std::vector<double>(t.psi().size(), 0.0)));
  CHECK(coefficients(step, blind, 2).energy() == 0.0);
  CHECK_THROWS_AS(regularity_ratio(step, blind, 2), DegenerateError);

  // f = 2x on [0,1]: beta_00 = -1/2, Q_0 f = -psi/2
  const PiecewisePolyDensity lin({0.0, 1.0}, {Polynomial({0.0, 2.0})}, "lin");
  const auto v = variance_terms(lin, haar, 0);
  const double tol = 1e-3;
  CHECK(coefficients(lin, haar, 0).at(0) == Approx(-0.5).margin(tol));
  CHECK(v.qj_energy == Approx(0.25).margin(tol));
  CHECK(v.delta_j == Approx(0.25).margin(tol));
  CHECK(v.sigma_tilde_sq == Approx(0.1875).margin(tol));
  CHECK(v.second_moment == Approx(1.0).margin(tol));
  CHECK(v.sigma_sq == Approx(0.9375).margin(tol));
}

TEST_CASE("coefficient support range") {
  const auto& ws = db(8);
  const auto c = coefficients(builtin(BuiltinDensity::F1), ws, 5);
  CHECK(c.energy() > 0);
  CHECK(c.beta.size() <= 32 + 16);
  CHECK(c.k_first >= -15);
  CHECK(c.k_last() <= 32);
}

TEST_CASE("coefficients agree with direct quadrature") {
  const auto& ws = db(4);
  const auto f = builtin(BuiltinDensity::F0);
  const int j = 3;
  const auto c = coefficients(f, ws, j);
  // fine midpoint rule on the table grid of psi_jk
  for (long k : {-5L, -2L, 0L, 3L, 7L}) {
    const double h = std::ldexp(1.0, -(j + 16));
    double s = 0.0;
    for (double x = std::ldexp(static_cast<double>(k), -j) + h / 2;
         x < std::ldexp(static_cast<double>(k + ws.support()), -j); x += h)
      s += f(x) * ws.psi_jk(j, k, x) * h;
    CHECK(c.at(k) == Approx(s).margin(1e-6));
  }
}

TEST_CASE("parseval") {
  for (int order : {2, 4, 8}) {
    const auto& ws = db(order);
    const auto& oracle = oracle_for(ws, 12);
    for (const char* name : {"f0", "f1", "parabola", "step", "xi3", "xi4"}) {
      const auto f = builtin(std::string(name));
      for (int j : {0, 2, 5, 8}) {
        const auto c = oracle.coefficients(f, j);
        const auto g = oracle.grid_integrals(c, nullptr, 2.0);
        INFO(name << " order " << order << " j " << j);
        CHECK(g.l2_sq == Approx(c.energy()).epsilon(1e-6));
      }
    }
  }
  const auto& oracle = oracle_for(db(8), 12);
  for (const char* name : {"f0", "parabola"}) {
    const auto c = oracle.coefficients(builtin(std::string(name)), 10);
    CHECK(oracle.grid_integrals(c, nullptr, 2.0).l2_sq == Approx(c.energy()).epsilon(1e-6));
  }
}

TEST_CASE("norms") {
  const auto& ws = db(8);
  const auto c = coefficients(builtin(BuiltinDensity::F1), ws, 4);
  CHECK(qj_norm(c, ws, 2.0) == Approx(std::sqrt(c.energy())));
  CHECK(qj_norm(c, ws, 1.0) > 0.0);
  CHECK_THROWS_AS(qj_norm(c, ws, 0.5), ConfigError);
  CoefficientVector zero{4, 0, std::vector<double>(10, 0.0)};
  CHECK(qj_norm(zero, ws, 2.0) == 0.0);
  CHECK(qj_norm(zero, ws, 3.0) == 0.0);
  CHECK(qj_eval(zero, ws, 0.3) == 0.0);
  // Q_j f(x) agrees with the band sum at a few points
  for (double x : {0.1, 0.5, 0.93}) {
    double s = 0.0;
    for (long k = c.k_first; k <= c.k_last(); ++k) s += c.at(k) * ws.psi_jk(4, k, x);
    CHECK(qj_eval(c, ws, x) == Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("decay slopes follow the index") {
  const auto& ws = db(8);
  const std::vector<std::pair<std::string, double>> cases = {{"f0", 0.5}, {"f1", 1.5}, {"parabola", 1.5}};
  for (const auto& [name, rate] : cases) {
    const auto rows = decay_table(builtin(name), ws, 7, 12);
    INFO(name);
    CHECK(decay_slope(rows) == Approx(-rate).margin(0.1));
    // r_j - m = C / j with a fitted C
    double num = 0.0, den = 0.0;
    for (const auto& r : rows) {
      num += (r.r_j - (rate - 0.5)) / r.j;
      den += 1.0 / (r.j * r.j);
    }
    const double c = num / den;
    for (const auto& r : rows) CHECK(std::abs(r.r_j - (rate - 0.5) - c / r.j) <= 0.02);
  }
  CHECK_THROWS_AS(decay_table(builtin(BuiltinDensity::F1), ws, 0, 3), ConfigError);
}

TEST_CASE("two-sided energy bounds with a fitted correction") {
  const auto& ws = db(8);
  const auto& wc = ws.constants();
  for (const char* name : {"f0", "f1"}) {
    const auto f = builtin(std::string(name));
    const auto prof = defect_profile(f);
    const int m = *prof.index_m;
    // least squares: ||Q_j f|| = a 2^{-j(m+1/2)} + c 2^{-j(m+1)}, j in [8,12]
    double s11 = 0, s12 = 0, s22 = 0, t1 = 0, t2 = 0;
    std::vector<double> norms;
    for (int j = 8; j <= 12; ++j) {
      const double y = std::sqrt(coefficients(f, ws, j).energy());
      const double u = std::exp2(-j * (m + 0.5)), v = std::exp2(-j * (m + 1.0));
      s11 += u * u; s12 += u * v; s22 += v * v; t1 += u * y; t2 += v * y;
      norms.push_back(y);
    }
    const double det = s11 * s22 - s12 * s12;
    const double a = (t1 * s22 - t2 * s12) / det;
    const double c = (s11 * t2 - s12 * t1) / det;
    const double lower = wc.psi1 / factorial(m) * prof.delta1_class;
    const double upper = wc.psi2 * std::pow(wc.support_len, wc.moment_degree + 2) * prof.n_defects *
                         prof.delta2_class / factorial(m + 1);
    INFO(name << " a=" << a << " c=" << c);
    for (int j = 8; j <= 12; ++j) {
      const double y = norms[static_cast<std::size_t>(j - 8)];
      const double o = std::abs(c) * std::exp2(-j * (m + 1.0));
      CHECK(y >= lower * std::exp2(-j * (m + 0.5)) - o);
      CHECK(y <= upper * std::exp2(-j * (m + 0.5)) + o);
    }
    CHECK(a > lower);
    CHECK(a < upper);
  }
}

TEST_CASE("variance of the kernel scales like 2^j") {
  const auto& ws = db(8);
  for (const char* name : {"f0", "f1", "parabola"}) {
    const auto f = builtin(std::string(name));
    double lo = 1e300, hi = 0.0;
    for (int j = 4; j <= 10; ++j) {
      const auto v = variance_terms(f, ws, j, false);
      CHECK(v.sigma_sq > 0);
      CHECK(v.sigma_tilde_sq >= 0);
      CHECK(v.sigma_tilde_sq == Approx(v.delta_j - v.qj_energy * v.qj_energy).margin(1e-15));
      const double r = std::ldexp(v.sigma_sq, -j) / f.l2_norm_sq();
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    INFO(name << " bracket [" << lo << ", " << hi << "]");
    CHECK(hi / lo <= 4.0);
  }
}

TEST_CASE("gram and grid routes agree") {
  const auto& ws = db(8);
  const auto& oracle = oracle_for(ws, 12);
  const auto f = mixture(builtin(BuiltinDensity::Parabola), builtin(BuiltinDensity::Xi, 4), 0.5);
  for (int j : {3, 6}) {
    const auto v = oracle.variance_terms(f, j, true);
    const auto c = oracle.coefficients(f, j);
    const auto g = oracle.grid_integrals(c, &f, 3.0);
    CHECK(g.weighted_sq == Approx(v.delta_j).epsilon(1e-9));
    REQUIRE(v.abs_cube);
    CHECK(*v.abs_cube == Approx(g.abs_cube).epsilon(1e-12));
    // third absolute moment bounded through the cube integral
    CHECK(*v.g_abs_cube <= 2 * std::pow(2.0, 3.0) * (f(0.0) + 1) * (*v.abs_cube + std::pow(v.qj_energy, 3)));
  }
}

TEST_CASE("smooth density with more regularity than the wavelet") {
  const auto& ws = db(2);
  const auto xi = builtin(BuiltinDensity::Xi, 3);
  const double b = ws.constants().moment_b;
  const double limit = std::abs(b) / 2.0 * std::sqrt(derivative_l2_sq(xi, 2));
  for (int j : {8, 10}) {
    const double v = std::ldexp(std::sqrt(coefficients(xi, ws, j).energy()), 2 * j);
    CHECK(v == Approx(limit).epsilon(0.05));
  }
}

TEST_CASE("regularity ratio") {
  const auto& ws = db(8);
  const auto para = builtin(BuiltinDensity::Parabola);
  const double r6 = regularity_ratio(para, ws, 6);
  const double r10 = regularity_ratio(para, ws, 10);
  CHECK(r6 / r10 >= 8.0);
  const auto xi = builtin(BuiltinDensity::Xi, 4);
  const auto mix = mixture(para, xi, 0.5);
  for (int j = 6; j <= 10; ++j) CHECK(regularity_ratio(mix, ws, j) >= 0.5 * xi(1.25) / 2);
  // f1 + xi3 is at least (pi xi3(1.25)) near every point the projection lives on
  const auto xi3 = builtin(BuiltinDensity::Xi, 3);
  const auto m3 = mixture(builtin(BuiltinDensity::F1), xi3, 0.5);
  CHECK(regularity_ratio(m3, ws, 8) >= 0.5 * xi3(1.25) / 2);
}
