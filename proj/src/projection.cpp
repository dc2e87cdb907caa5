#include "besov/projection.hpp"

#include "besov/errors.hpp"
#include "besov/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>

namespace besov {
namespace {

constexpr int kMaxLevel = 30;
constexpr int kMinTableDegree = 12;

// Visits Gauss nodes on [a, b] with weight times psi(t) (lag < 0) or
// psi(t) psi(t - lag) (lag >= 0). `degree` is the polynomial degree carried
// by fn on top of the psi factors.
template <typename Fn>
void for_each_node(const DyadicTable& tb, int lag, double a, double b, int degree, Fn&& fn) {
  a = std::max(a, lag > 0 ? static_cast<double>(lag) : 0.0);
  b = std::min(b, static_cast<double>(tb.support()));
  if (!(b > a)) return;
  const auto& rule = gauss_rule_for_degree(degree + (lag >= 0 ? 2 : 1));
  const double h = tb.spacing();
  const double inv_h = 1.0 / h;
  const long shift = lag > 0 ? static_cast<long>(lag) * tb.points_per_unit() : 0;
  const long m0 = static_cast<long>(std::floor(a * inv_h));
  const long m1 = std::min(static_cast<long>(std::ceil(b * inv_h)), tb.cells());
  for (long m = m0; m < m1; ++m) {
    const double x0 = static_cast<double>(m) * h;
    const double lo = std::max(a, x0);
    const double hi = std::min(b, x0 + h);
    if (!(hi > lo)) continue;
    const double p0 = tb.psi_grid(m);
    const double dp = tb.psi_grid(m + 1) - p0;
    const double q0 = lag >= 0 ? tb.psi_grid(m - shift) : 1.0;
    const double dq = lag >= 0 ? tb.psi_grid(m + 1 - shift) - q0 : 0.0;
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      const double t = lo + (hi - lo) * rule.nodes[g];
      const double s = (t - x0) * inv_h;
      fn(t, rule.weights[g] * (hi - lo) * (p0 + dp * s) * (q0 + dq * s));
    }
  }
}

double poly_integral(const DyadicTable& tb, int lag, double a, double b,
                     const std::vector<double>& coeffs, double center) {
  CompensatedSum sum;
  for_each_node(tb, lag, a, b, static_cast<int>(coeffs.size()) - 1, [&](double t, double w) {
    const double z = t - center;
    double poly = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) poly = poly * z + *it;
    sum += w * poly;
  });
  return sum.value();
}

void moment_row(const DyadicTable& tb, int lag, double a, double b, double center, int degree,
                double* out) {
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(degree) + 1);
  for_each_node(tb, lag, a, b, degree, [&](double t, double w) {
    const double z = t - center;
    double zq = 1.0;
    for (auto& s : acc) {
      s += w * zq;
      zq *= z;
    }
  });
  for (std::size_t q = 0; q < acc.size(); ++q) out[q] = acc[q].value();
}

// Polynomial pieces of t -> f((t + k) / 2^j) on the unit cells of [0, S],
// in powers of (t - S/2).
class PieceExpander {
 public:
  struct CellPiece {
    int cell;
    double lo, hi;
    bool whole;
    const std::vector<double>* coeffs;
  };

  PieceExpander(const PiecewisePolyDensity& f, int j, int support)
      : f_(f), scale_(std::ldexp(1.0, j)), support_(support),
        cache_(f.pieces().size()), ready_(f.pieces().size(), false) {}

  const std::vector<CellPiece>& cells(long k) {
    std::fill(ready_.begin(), ready_.end(), false);
    center_ = (static_cast<double>(k) + 0.5 * support_) / scale_;
    out_.clear();
    const auto& bps = f_.breakpoints();
    const double kd = static_cast<double>(k);
    for (int i = 0; i < support_; ++i) {
      const double x0 = (i + kd) / scale_;
      const double x1 = (i + 1 + kd) / scale_;
      if (x1 <= bps.front() || x0 >= bps.back()) continue;
      bounds_.assign(1, static_cast<double>(i));
      for (auto it = std::upper_bound(bps.begin(), bps.end(), x0); it != bps.end() && *it < x1; ++it)
        bounds_.push_back(*it * scale_ - kd);
      bounds_.push_back(static_cast<double>(i + 1));
      const bool whole = bounds_.size() == 2;
      for (std::size_t s = 0; s + 1 < bounds_.size(); ++s) {
        const double xm = (0.5 * (bounds_[s] + bounds_[s + 1]) + kd) / scale_;
        if (xm < bps.front() || xm >= bps.back()) continue;
        const auto piece =
            static_cast<std::size_t>(std::upper_bound(bps.begin(), bps.end(), xm) - bps.begin()) - 1;
        out_.push_back({i, bounds_[s], bounds_[s + 1], whole, &coeffs(piece)});
      }
    }
    return out_;
  }

 private:
  const std::vector<double>& coeffs(std::size_t piece) {
    if (!ready_[piece]) {
      auto c = f_.pieces()[piece].taylor(center_);
      double s = 1.0;
      for (auto& v : c) {
        v *= s;
        s /= scale_;
      }
      cache_[piece] = std::move(c);
      ready_[piece] = true;
    }
    return cache_[piece];
  }

  const PiecewisePolyDensity& f_;
  double scale_;
  int support_;
  double center_ = 0.0;
  std::vector<std::vector<double>> cache_;
  std::vector<bool> ready_;
  std::vector<double> bounds_;
  std::vector<CellPiece> out_;
};

void k_range(const PiecewisePolyDensity& f, int j, int support, long& first, long& last) {
  const double scale = std::ldexp(1.0, j);
  first = static_cast<long>(std::floor(scale * f.support_lo() - support)) + 1;
  last = static_cast<long>(std::ceil(scale * f.support_hi())) - 1;
}

// int_0^1 |a + (b - a) s|^p ds
double linear_abs_pow(double a, double b, double p) {
  const double d = b - a;
  const double big = std::max(std::abs(a), std::abs(b));
  if (big == 0.0) return 0.0;
  if (std::abs(d) <= 1e-3 * big) {
    const auto& rule = gauss_rule_for_degree(5);
    double s = 0.0;
    for (std::size_t g = 0; g < rule.nodes.size(); ++g)
      s += rule.weights[g] * std::pow(std::abs(a + d * rule.nodes[g]), p);
    return s;
  }
  const double pa = std::pow(std::abs(a), p + 1.0);
  const double pb = std::pow(std::abs(b), p + 1.0);
  if (a * b >= 0.0) return std::abs(pb - pa) / ((p + 1.0) * std::abs(d));
  return (pa + pb) / ((p + 1.0) * std::abs(d));
}

}  // namespace

double CoefficientVector::energy() const noexcept {
  CompensatedSum s;
  for (double b : beta) s += b * b;
  return s.value();
}

double BandGram::at(long k, int l) const noexcept {
  if (l < 0) {
    k += l;
    l = -l;
  }
  if (l >= width || k < k_first || k - k_first >= rows()) return 0.0;
  return values[static_cast<std::size_t>((k - k_first) * width + l)];
}

ProjectionOracle::ProjectionOracle(WaveletSystem system, int max_degree)
    : system_(std::move(system)), max_degree_(max_degree) {
  if (max_degree < 0) throw ConfigError("oracle degree must be nonnegative");
  const auto& tb = system_.table();
  const int s = tb.support();
  const auto d1 = static_cast<std::size_t>(max_degree) + 1;
  const double center = 0.5 * s;
  moments_.assign(static_cast<std::size_t>(s) * d1, 0.0);
  lag_moments_.assign(static_cast<std::size_t>(s) * static_cast<std::size_t>(s) * d1, 0.0);
  for (int i = 0; i < s; ++i)
    moment_row(tb, -1, i, i + 1, center, max_degree, &moments_[static_cast<std::size_t>(i) * d1]);
  for (int l = 0; l < s; ++l)
    for (int i = l; i < s; ++i)
      moment_row(tb, l, i, i + 1, center, max_degree,
                 &lag_moments_[(static_cast<std::size_t>(l) * static_cast<std::size_t>(s) +
                                static_cast<std::size_t>(i)) * d1]);
}

void ProjectionOracle::check(const PiecewisePolyDensity& f, int j) const {
  if (j < 0 || j > kMaxLevel) throw ConfigError("resolution level must lie in [0, 30]");
  if (f.max_degree() > max_degree_)
    throw ConfigError("density degree " + std::to_string(f.max_degree()) +
                      " exceeds the oracle tables (" + std::to_string(max_degree_) + ")");
}

CoefficientVector ProjectionOracle::coefficients(const PiecewisePolyDensity& f, int j) const {
  check(f, j);
  const auto& tb = system_.table();
  const int s = tb.support();
  const auto d1 = static_cast<std::size_t>(max_degree_) + 1;
  CoefficientVector out;
  out.j = j;
  long last = 0;
  k_range(f, j, s, out.k_first, last);
  out.beta.assign(static_cast<std::size_t>(std::max(0L, last - out.k_first + 1)), 0.0);
  const double amp = std::ldexp(1.0, -j) * std::sqrt(std::ldexp(1.0, j));  // 2^{-j/2}
  PieceExpander expand(f, j, s);
  for (long k = out.k_first; k <= last; ++k) {
    CompensatedSum sum;
    for (const auto& cp : expand.cells(k)) {
      const auto& c = *cp.coeffs;
      if (cp.whole) {
        const double* mu = &moments_[static_cast<std::size_t>(cp.cell) * d1];
        for (std::size_t q = 0; q < c.size(); ++q) sum += c[q] * mu[q];
      } else {
        sum += poly_integral(tb, -1, cp.lo, cp.hi, c, 0.5 * s);
      }
    }
    out.beta[static_cast<std::size_t>(k - out.k_first)] = amp * sum.value();
  }
  return out;
}

BandGram ProjectionOracle::gram(const PiecewisePolyDensity& f, int j) const {
  check(f, j);
  const auto& tb = system_.table();
  const int s = tb.support();
  const auto d1 = static_cast<std::size_t>(max_degree_) + 1;
  BandGram out;
  out.j = j;
  out.width = s;
  long last = 0;
  k_range(f, j, s, out.k_first, last);
  const long rows = std::max(0L, last - out.k_first + 1);
  out.values.assign(static_cast<std::size_t>(rows * s), 0.0);
  PieceExpander expand(f, j, s);
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(s));
  for (long k = out.k_first; k <= last; ++k) {
    std::fill(acc.begin(), acc.end(), CompensatedSum{});
    for (const auto& cp : expand.cells(k)) {
      const auto& c = *cp.coeffs;
      for (int l = 0; l <= cp.cell; ++l) {
        if (cp.whole) {
          const double* nu = &lag_moments_[(static_cast<std::size_t>(l) * static_cast<std::size_t>(s) +
                                            static_cast<std::size_t>(cp.cell)) * d1];
          double v = 0.0;
          for (std::size_t q = 0; q < c.size(); ++q) v += c[q] * nu[q];
          acc[static_cast<std::size_t>(l)] += v;
        } else {
          acc[static_cast<std::size_t>(l)] += poly_integral(tb, l, cp.lo, cp.hi, c, 0.5 * s);
        }
      }
    }
    for (int l = 0; l < s; ++l)
      out.values[static_cast<std::size_t>((k - out.k_first) * s + l)] = acc[static_cast<std::size_t>(l)].value();
  }
  return out;
}

VarianceTerms ProjectionOracle::variance_terms(const PiecewisePolyDensity& f, int j,
                                               bool third_moments) const {
  const CoefficientVector c = coefficients(f, j);
  const BandGram g = gram(f, j);
  VarianceTerms v;
  v.j = j;
  v.qj_energy = c.energy();
  CompensatedSum second, delta;
  for (long r = 0; r < g.rows(); ++r) {
    const long k = g.k_first + r;
    const double bk = c.at(k);
    for (int l = 0; l < g.width; ++l) {
      const double a = g.values[static_cast<std::size_t>(r * g.width + l)];
      const double mult = l == 0 ? 1.0 : 2.0;
      second += mult * a * a;
      delta += mult * bk * c.at(k + l) * a;
    }
  }
  v.second_moment = second.value();
  v.delta_j = delta.value();
  const double e2 = v.qj_energy * v.qj_energy;
  v.sigma_tilde_sq = v.delta_j - e2;
  v.sigma_sq = v.second_moment - e2;
  if (third_moments) {
    const GridIntegrals gi = grid_integrals(c, &f, 3.0);
    v.abs_cube = gi.abs_cube;
    v.g_abs_cube = gi.g_abs_cube;
  }
  return v;
}

GridIntegrals ProjectionOracle::grid_integrals(const CoefficientVector& c, const PiecewisePolyDensity* f,
                                               double p) const {
  if (p < 1.0) throw ConfigError("norm exponent p must be >= 1");
  const auto& tb = system_.table();
  const int s = tb.support();
  const long unit = tb.points_per_unit();
  const int j = c.j;
  const double amp = std::sqrt(std::ldexp(1.0, j));
  const double dx = std::ldexp(1.0, -(j + tb.level()));
  const auto psi = tb.psi();
  const double energy = c.energy();

  GridIntegrals out;
  out.p = p;
  if (c.beta.empty()) return out;

  CompensatedSum l2, absp, wsq, cube, gcube;
  const QuadratureRule* rule = nullptr;
  const std::vector<double>* bps = nullptr;
  std::size_t piece = 0;
  if (f != nullptr) {
    rule = &gauss_rule_for_degree(f->max_degree() + 3);
    bps = &f->breakpoints();
  }

  // f-weighted parts on [x0, x1] where Q_j f = v0 + (v1 - v0) (x - x0) / dx
  auto weighted = [&](double x0, double x1, double v0, double v1, const Polynomial& poly) {
    auto val = [&](double x) { return v0 + (v1 - v0) * (x - x0) / dx; };
    auto gauss = [&](double lo, double hi, auto&& integrand) {
      double acc = 0.0;
      for (std::size_t g = 0; g < rule->nodes.size(); ++g) {
        const double x = lo + (hi - lo) * rule->nodes[g];
        acc += rule->weights[g] * integrand(x);
      }
      return acc * (hi - lo);
    };
    wsq += gauss(x0, x1, [&](double x) {
      const double v = val(x);
      return v * v * poly(x);
    });
    auto cubic = [&](double x) {
      const double v = val(x) - energy;
      return std::abs(v * v * v) * poly(x);
    };
    const double ga = val(x0) - energy;
    const double gb = val(x1) - energy;
    if (ga * gb < 0.0) {
      const double root = x0 + (x1 - x0) * ga / (ga - gb);
      gcube += gauss(x0, root, cubic) + gauss(root, x1, cubic);
    } else {
      gcube += gauss(x0, x1, cubic);
    }
  };

  std::vector<double> nodes(static_cast<std::size_t>(unit) + 1);
  const long m_first = c.k_first;
  const long m_last = c.k_last() + s - 1;
  for (long m = m_first; m <= m_last; ++m) {
    const long k_lo = std::max(c.k_first, m - s + 1);
    const long k_hi = std::min(c.k_last(), m);
    for (long r = 0; r <= unit; ++r) {
      double v = 0.0;
      for (long k = k_lo; k <= k_hi; ++k)
        v += c.beta[static_cast<std::size_t>(k - c.k_first)] * psi[static_cast<std::size_t>((m - k) * unit + r)];
      nodes[static_cast<std::size_t>(r)] = amp * v;
    }
    for (long r = 0; r < unit; ++r) {
      const double v0 = nodes[static_cast<std::size_t>(r)];
      const double v1 = nodes[static_cast<std::size_t>(r) + 1];
      l2 += (v0 * v0 + v0 * v1 + v1 * v1) / 3.0 * dx;
      absp += linear_abs_pow(v0, v1, p) * dx;
      if (f == nullptr) continue;
      cube += linear_abs_pow(v0, v1, 3.0) * dx;
      const double x0 = std::ldexp(static_cast<double>(m * unit + r), -(j + tb.level()));
      const double x1 = x0 + dx;
      if (x1 <= bps->front() || x0 >= bps->back()) continue;
      while (piece + 2 < bps->size() && (*bps)[piece + 1] <= x0) ++piece;
      // split at breakpoints strictly inside the cell
      double lo = std::max(x0, bps->front());
      double vlo = v0 + (v1 - v0) * (lo - x0) / dx;
      std::size_t pc = piece;
      while (lo < x1 && pc + 1 < bps->size()) {
        const double hi = std::min(x1, (*bps)[pc + 1]);
        const double vhi = v0 + (v1 - v0) * (hi - x0) / dx;
        if (hi > lo) weighted(lo, hi, vlo, vhi, f->pieces()[pc]);
        lo = hi;
        vlo = vhi;
        ++pc;
      }
    }
  }
  out.l2_sq = l2.value();
  out.abs_p = absp.value();
  out.weighted_sq = wsq.value();
  out.abs_cube = cube.value();
  out.g_abs_cube = gcube.value();
  return out;
}

const ProjectionOracle& oracle_for(const WaveletSystem& system, int max_degree) {
  static std::mutex mu;
  static std::vector<std::unique_ptr<ProjectionOracle>> cache;
  std::lock_guard<std::mutex> lock(mu);
  for (const auto& o : cache) {
    if (o->system().table().psi().data() == system.table().psi().data() && o->max_degree() >= max_degree)
      return *o;
  }
  cache.push_back(std::make_unique<ProjectionOracle>(system, std::max(max_degree, kMinTableDegree)));
  return *cache.back();
}

CoefficientVector coefficients(const PiecewisePolyDensity& f, const WaveletSystem& system, int j) {
  return oracle_for(system, f.max_degree()).coefficients(f, j);
}

double qj_eval(const CoefficientVector& c, const WaveletSystem& system, double x) {
  const double u = std::ldexp(x, c.j);
  const long lo = std::max(c.k_first, static_cast<long>(std::ceil(u - system.support())));
  const long hi = std::min(c.k_last(), static_cast<long>(std::floor(u)));
  double v = 0.0;
  for (long k = lo; k <= hi; ++k) v += c.at(k) * system.psi_jk(c.j, k, x);
  return v;
}

double qj_norm(const CoefficientVector& c, const WaveletSystem& system, double p) {
  if (!(p >= 1.0)) throw ConfigError("norm exponent p must be >= 1");
  if (p == 2.0) return std::sqrt(c.energy());
  const auto gi = oracle_for(system, 0).grid_integrals(c, nullptr, p);
  return std::pow(gi.abs_p, 1.0 / p);
}

VarianceTerms variance_terms(const PiecewisePolyDensity& f, const WaveletSystem& system, int j,
                             bool third_moments) {
  return oracle_for(system, f.max_degree()).variance_terms(f, j, third_moments);
}

double regularity_ratio(const PiecewisePolyDensity& f, const WaveletSystem& system, int j) {
  const VarianceTerms v = variance_terms(f, system, j, false);
  if (!(v.qj_energy > 0.0))
    throw DegenerateError("projection energy is zero at level " + std::to_string(j) +
                          "; regularity ratio undefined");
  return v.delta_j / v.qj_energy;
}

std::vector<DecayRow> decay_table(const PiecewisePolyDensity& f, const WaveletSystem& system,
                                  int j_min, int j_max) {
  if (j_min < 1 || j_max < j_min) throw ConfigError("decay needs 1 <= j_min <= j_max");
  const auto& oracle = oracle_for(system, f.max_degree());
  std::vector<DecayRow> rows;
  for (int j = j_min; j <= j_max; ++j) {
    const VarianceTerms v = oracle.variance_terms(f, j, false);
    DecayRow row;
    row.j = j;
    row.qj_norm_2 = std::sqrt(v.qj_energy);
    row.r_j = -std::log2(row.qj_norm_2) / j - 0.5;
    row.delta_j = v.delta_j;
    row.sigma_sq = v.sigma_sq;
    row.sigma_tilde_sq = v.sigma_tilde_sq;
    row.regularity_ratio =
        v.qj_energy > 0.0 ? v.delta_j / v.qj_energy : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  return rows;
}

double decay_slope(const std::vector<DecayRow>& rows) {
  if (rows.size() < 2) throw ConfigError("slope needs at least two levels");
  double sx = 0.0, sy = 0.0;
  for (const auto& r : rows) {
    sx += r.j;
    sy += std::log2(r.qj_norm_2);
  }
  const double n = static_cast<double>(rows.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& r : rows) {
    sxy += (r.j - mx) * (std::log2(r.qj_norm_2) - my);
    sxx += (r.j - mx) * (r.j - mx);
  }
  return sxy / sxx;
}

}  // namespace besov
