#include "besov/densities.hpp"

#include "besov/errors.hpp"
#include "besov/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <regex>
#include <sstream>

namespace besov {
namespace {

constexpr double kMassTol = 1e-10;
constexpr double kSupportBound = 1.5;
// relative size below which a derivative jump counts as zero
constexpr double kJumpTol = 1e-9;

double horner(const std::vector<double>& c, double x) noexcept {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<double>(i);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
  std::vector<double> a(coeffs_.size() + 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) a[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
  return Polynomial(std::move(a));
}

std::vector<double> Polynomial::taylor(double x0) const {
  // repeated synthetic division
  std::vector<double> c = coeffs_;
  if (c.empty()) return {0.0};
  const std::size_t n = c.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = n - 1; i > k; --i) c[i - 1] += x0 * c[i];
  }
  return c;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
  return Polynomial(std::move(c));
}

Polynomial operator*(double s, const Polynomial& p) {
  std::vector<double> c = p.coeffs_;
  for (auto& v : c) v *= s;
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.coeffs_.empty() || b.coeffs_.empty()) return Polynomial({0.0});
  std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[i + k] += a.coeffs_[i] * b.coeffs_[k];
  return Polynomial(std::move(c));
}

// ---------------------------------------------------------------------------

PiecewisePolyDensity::PiecewisePolyDensity(std::vector<double> breakpoints,
                                           std::vector<Polynomial> pieces, std::string label,
                                           std::optional<int> tau)
    : breakpoints_(std::move(breakpoints)),
      pieces_(std::move(pieces)),
      label_(std::move(label)),
      tau_(tau) {
  if (breakpoints_.size() < 2) throw ConfigError("density needs at least two breakpoints");
  if (pieces_.size() + 1 != breakpoints_.size())
    throw ConfigError("density: expected " + std::to_string(breakpoints_.size() - 1) +
                      " pieces, got " + std::to_string(pieces_.size()));
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (!std::isfinite(breakpoints_[i])) throw ConfigError("density: non-finite breakpoint");
    if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1]))
      throw ConfigError("density: breakpoints must be strictly increasing");
  }
  if (breakpoints_.front() < -kSupportBound - 1e-12 || breakpoints_.back() > kSupportBound + 1e-12)
    throw ConfigError("density: support must lie inside [-1.5, 1.5]");

  cumulative_.assign(1, 0.0);
  CompensatedSum mass;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    for (double c : p.coeffs())
      if (!std::isfinite(c)) throw ConfigError("density: non-finite coefficient");
    const double a = breakpoints_[i];
    const double b = breakpoints_[i + 1];
    // Nonnegativity on a fine grid including both ends of the piece.
    constexpr int kChecks = 256;
    double scale = 0.0;
    for (int s = 0; s <= kChecks; ++s) scale = std::max(scale, std::abs(p(a + (b - a) * s / kChecks)));
    for (int s = 0; s <= kChecks; ++s) {
      const double v = p(a + (b - a) * s / kChecks);
      if (v < -1e-12 * std::max(1.0, scale))
        throw ConfigError("density '" + label_ + "' is negative near x = " +
                          std::to_string(a + (b - a) * s / kChecks));
    }
    const Polynomial anti = p.antiderivative();
    const double base = anti(a);
    antiderivatives_.push_back(anti + Polynomial({-base}));
    mass.add(anti(b) - base);
    cumulative_.push_back(mass.value());
  }
  if (std::abs(mass.value() - 1.0) > kMassTol)
    throw ConfigError("density '" + label_ + "' has total mass " + std::to_string(mass.value()));
}

std::size_t PiecewisePolyDensity::piece_of(double x) const noexcept {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double PiecewisePolyDensity::operator()(double x) const noexcept {
  if (!(x >= breakpoints_.front()) || x >= breakpoints_.back()) return 0.0;
  return std::max(pieces_[piece_of(x)](x), 0.0);
}

double PiecewisePolyDensity::cdf(double x) const noexcept {
  if (!(x > breakpoints_.front())) return 0.0;
  if (x >= breakpoints_.back()) return 1.0;
  const std::size_t i = piece_of(x);
  return std::clamp(cumulative_[i] + antiderivatives_[i](x), 0.0, 1.0);
}

int PiecewisePolyDensity::max_degree() const noexcept {
  int d = 0;
  for (const auto& p : pieces_) d = std::max(d, p.degree());
  return d;
}

double PiecewisePolyDensity::mass() const noexcept { return cumulative_.back(); }

double PiecewisePolyDensity::l2_norm_sq() const {
  CompensatedSum s;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Polynomial anti = (pieces_[i] * pieces_[i]).antiderivative();
    s.add(anti(breakpoints_[i + 1]) - anti(breakpoints_[i]));
  }
  return s.value();
}

// ---------------------------------------------------------------------------

double xi_normalizer(int tau) {
  if (tau < 0) throw ConfigError("tau must be nonnegative");
  const double ft = factorial(tau + 1);
  return factorial(2 * tau + 3) / (ft * ft) * std::pow(3.0, -(2 * tau + 3));
}

PiecewisePolyDensity builtin(BuiltinDensity name, int tau) {
  switch (name) {
    case BuiltinDensity::F0:
      return PiecewisePolyDensity({0.0, 1.0}, {Polynomial({0.5, 3.0, -3.0})}, "f0");
    case BuiltinDensity::F1:
      return PiecewisePolyDensity({0.0, 1.0}, {Polynomial({0.0, 6.0, -6.0})}, "f1");
    case BuiltinDensity::Parabola:
      return PiecewisePolyDensity({-1.0, 1.0}, {Polynomial({0.75, 0.0, -0.75})}, "parabola");
    case BuiltinDensity::Step:
      return PiecewisePolyDensity({0.0, 1.0}, {Polynomial({1.0})}, "step");
    case BuiltinDensity::Xi: {
      if (tau < 1 || tau > 20) throw ConfigError("xi needs tau in [1, 20], got " + std::to_string(tau));
      // c (2.25 - x^2)^{tau+1}
      const int p = tau + 1;
      std::vector<double> c(static_cast<std::size_t>(2 * p + 1), 0.0);
      const double norm = xi_normalizer(tau);
      for (int i = 0; i <= p; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        c[static_cast<std::size_t>(2 * i)] = norm * sign * binomial(p, i) * std::pow(2.25, p - i);
      }
      return PiecewisePolyDensity({-kSupportBound, kSupportBound}, {Polynomial(std::move(c))},
                                  "xi" + std::to_string(tau), tau);
    }
  }
  throw ConfigError("unknown builtin density");
}

PiecewisePolyDensity builtin(const std::string& name) {
  if (name == "f0") return builtin(BuiltinDensity::F0);
  if (name == "f1") return builtin(BuiltinDensity::F1);
  if (name == "parabola") return builtin(BuiltinDensity::Parabola);
  if (name == "step") return builtin(BuiltinDensity::Step);
  static const std::regex xi_re(R"(xi[:(]?(\d+)\)?)");
  std::smatch m;
  if (std::regex_match(name, m, xi_re)) return builtin(BuiltinDensity::Xi, std::stoi(m[1].str()));
  throw ConfigError("unknown density '" + name + "' (expected f0, f1, parabola, step or xi<tau>)");
}

PiecewisePolyDensity mixture(const PiecewisePolyDensity& f, const PiecewisePolyDensity& xi, double pi) {
  if (!(pi >= 0.0 && pi < 1.0)) throw ConfigError("mixing weight must lie in [0, 1)");
  std::vector<double> bps = f.breakpoints();
  bps.insert(bps.end(), xi.breakpoints().begin(), xi.breakpoints().end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  auto piece_at = [](const PiecewisePolyDensity& d, double mid) -> Polynomial {
    const auto& b = d.breakpoints();
    if (mid < b.front() || mid >= b.back()) return Polynomial({0.0});
    const auto i = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), mid) - b.begin()) - 1;
    return d.pieces()[i];
  };
  std::vector<Polynomial> pieces;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const double mid = 0.5 * (bps[i] + bps[i + 1]);
    pieces.push_back((1.0 - pi) * piece_at(f, mid) + pi * piece_at(xi, mid));
  }
  std::ostringstream label;
  label << f.label();
  if (pi > 0.0) label << "+" << xi.label() << "@" << pi;
  return PiecewisePolyDensity(std::move(bps), std::move(pieces), label.str());
}

double eval_mixture(const PiecewisePolyDensity& f, const PiecewisePolyDensity& xi, double pi, double x) {
  return (1.0 - pi) * f(x) + pi * xi(x);
}

// ---------------------------------------------------------------------------

namespace {

DefectProfile summarize(std::vector<BreakpointDefect> all) {
  DefectProfile prof;
  prof.breakpoints = std::move(all);
  for (const auto& b : prof.breakpoints)
    if (!prof.index_m || b.order < *prof.index_m) prof.index_m = b.order;
  if (!prof.index_m) return prof;
  prof.delta1_class = std::numeric_limits<double>::infinity();
  for (const auto& b : prof.breakpoints) {
    if (b.order != *prof.index_m) continue;
    prof.defects.push_back(b);
    prof.delta1_class = std::min(prof.delta1_class, b.jump);
    prof.delta2_class = std::max(prof.delta2_class, b.jump);
  }
  prof.n_defects = static_cast<int>(prof.defects.size());
  return prof;
}

}  // namespace

DefectProfile DefectProfile::restricted(double lo, double hi) const {
  std::vector<BreakpointDefect> kept;
  for (const auto& b : breakpoints)
    if (b.location >= lo && b.location <= hi) kept.push_back(b);
  return summarize(std::move(kept));
}

DefectProfile defect_profile(const PiecewisePolyDensity& density) {
  const auto& bps = density.breakpoints();
  const auto& pieces = density.pieces();
  const int maxdeg = density.max_degree();
  std::vector<BreakpointDefect> all;
  for (std::size_t i = 0; i < bps.size(); ++i) {
    const double d = bps[i];
    // derivative values from the left and right
    std::vector<double> left = (i == 0) ? std::vector<double>{} : pieces[i - 1].taylor(d);
    std::vector<double> right = (i + 1 == bps.size()) ? std::vector<double>{} : pieces[i].taylor(d);
    double scale = 1.0;
    for (double v : left) scale = std::max(scale, std::abs(v));
    for (double v : right) scale = std::max(scale, std::abs(v));
    for (int q = 0; q <= maxdeg; ++q) {
      const auto uq = static_cast<std::size_t>(q);
      const double l = uq < left.size() ? left[uq] : 0.0;
      const double r = uq < right.size() ? right[uq] : 0.0;
      // Taylor coefficient times q! is the q-th derivative
      const double jump = std::abs(l - r) * factorial(q);
      if (std::abs(l - r) > kJumpTol * scale) {
        all.push_back({d, q, jump});
        break;
      }
    }
  }
  return summarize(std::move(all));
}

// ---------------------------------------------------------------------------

InverseCdfSampler::InverseCdfSampler(const PiecewisePolyDensity& density) {
  const auto& bps = density.breakpoints();
  CompensatedSum before;
  for (std::size_t i = 0; i < density.pieces().size(); ++i) {
    Piece p;
    p.lo = bps[i];
    p.hi = bps[i + 1];
    p.density = density.pieces()[i].taylor(p.lo);
    p.cdf.assign(p.density.size() + 1, 0.0);
    for (std::size_t q = 0; q < p.density.size(); ++q) p.cdf[q + 1] = p.density[q] / static_cast<double>(q + 1);
    p.mass = horner(p.cdf, p.hi - p.lo);
    p.mass_before = before.value();
    before.add(p.mass);
    starts_.push_back(p.mass_before);
    pieces_.push_back(std::move(p));
  }
  total_ = before.value();
}

double InverseCdfSampler::invert(double u) const noexcept {
  const double target_total = u * total_;
  auto it = std::upper_bound(starts_.begin(), starts_.end(), target_total);
  std::size_t i = static_cast<std::size_t>(it - starts_.begin());
  i = i == 0 ? 0 : i - 1;
  while (i > 0 && pieces_[i].mass <= 0.0) --i;
  const Piece& p = pieces_[i];
  const double target = std::clamp(target_total - p.mass_before, 0.0, p.mass);
  double lo = 0.0;
  double hi = p.hi - p.lo;
  double x = p.mass > 0.0 ? hi * target / p.mass : 0.0;
  // Newton with bisection fallback on the bracket [lo, hi].
  for (int iter = 0; iter < 200; ++iter) {
    const double g = horner(p.cdf, x) - target;
    if (std::abs(g) <= 1e-14) break;
    if (g < 0.0) lo = x; else hi = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(p.lo) + hi)) break;
    const double d = horner(p.density, x);
    double next = d > 0.0 ? x - g / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return p.lo + x;
}

void InverseCdfSampler::draw(std::span<double> out, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  for (double& v : out) v = invert(bits_to_unit(rng()));
}

Sample sample(const PiecewisePolyDensity& density, std::size_t n, std::uint64_t seed,
              std::uint64_t replicate) {
  if (n == 0) throw ConfigError("sample size must be at least 1");
  Sample s;
  s.values.resize(n);
  InverseCdfSampler(density).draw(s.values, seed);
  s.provenance.density = density.label();
  s.provenance.n_raw = n;
  s.provenance.seed = seed;
  s.provenance.replicate = replicate;
  return s;
}

std::size_t enrichment_size(std::size_t n, double pi) {
  if (!(pi >= 0.0 && pi < 1.0)) throw ConfigError("mixing weight must lie in [0, 1)");
  return static_cast<std::size_t>(std::llround(pi * static_cast<double>(n) / (1.0 - pi)));
}

Sample enrich(const Sample& raw, const PiecewisePolyDensity& xi, double pi, std::uint64_t seed) {
  if (!(pi > 0.0 && pi < 1.0)) throw ConfigError("enrichment fraction must lie in (0, 1)");
  if (raw.values.empty()) throw ConfigError("cannot enrich an empty sample");
  const std::size_t extra = enrichment_size(raw.values.size(), pi);
  Sample s;
  s.values.reserve(raw.values.size() + extra);
  s.values = raw.values;
  s.values.resize(raw.values.size() + extra);
  InverseCdfSampler(xi).draw(std::span<double>(s.values).subspan(raw.values.size()),
                             derive_seed(seed, 0, 1));
  std::mt19937_64 rng(derive_seed(seed, 0, 2));
  std::shuffle(s.values.begin(), s.values.end(), rng);
  s.provenance = raw.provenance;
  s.provenance.pi = pi;
  s.provenance.tau = xi.tau();
  s.provenance.enrich_seed = seed;
  return s;
}

// ---------------------------------------------------------------------------

std::string provenance_line(const Provenance& p) {
  std::ostringstream os;
  os << "# density=" << p.density << " n_raw=" << p.n_raw << " seed=" << p.seed
     << " replicate=" << p.replicate;
  if (p.enrich_seed) {
    os << " pi=" << std::setprecision(17) << p.pi;
    if (p.tau) os << " tau=" << *p.tau;
    os << " enrich_seed=" << *p.enrich_seed;
  }
  return os.str();
}

void write_sample(std::ostream& os, const Sample& s) {
  os << provenance_line(s.provenance) << '\n';
  os << std::setprecision(17);
  for (double v : s.values) os << v << '\n';
}

Sample read_sample(std::istream& is) {
  Sample s;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string kv;
      while (ls >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (key == "density") s.provenance.density = val;
        else if (key == "n_raw") s.provenance.n_raw = std::stoull(val);
        else if (key == "seed") s.provenance.seed = std::stoull(val);
        else if (key == "replicate") s.provenance.replicate = std::stoull(val);
        else if (key == "pi") s.provenance.pi = std::stod(val);
        else if (key == "tau") s.provenance.tau = std::stoi(val);
        else if (key == "enrich_seed") s.provenance.enrich_seed = std::stoull(val);
      }
      continue;
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(line, &used);
      s.values.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("sample file: cannot parse '" + line + "'");
    }
  }
  return s;
}

PiecewisePolyDensity parse_density(std::istream& is) {
  std::string label = "custom";
  std::vector<double> bps;
  std::vector<Polynomial> pieces;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto colon = line.find(':');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (colon == std::string::npos)
      throw ConfigError("density file line " + std::to_string(lineno) + ": expected 'key: values'");
    std::string key = line.substr(0, colon);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    std::istringstream rest(line.substr(colon + 1));
    if (key == "label") {
      rest >> label;
      continue;
    }
    std::vector<double> nums;
    std::string tok;
    while (rest >> tok) {
      try {
        nums.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("density file line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
    }
    if (key == "breakpoints") bps = std::move(nums);
    else if (key == "piece") {
      if (nums.empty()) throw ConfigError("density file line " + std::to_string(lineno) + ": empty piece");
      pieces.emplace_back(std::move(nums));
    } else {
      throw ConfigError("density file line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return PiecewisePolyDensity(std::move(bps), std::move(pieces), label);
}

PiecewisePolyDensity load_density(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open density file " + path.string());
  return parse_density(in);
}

void write_density(std::ostream& os, const PiecewisePolyDensity& d) {
  os << "label: " << d.label() << '\n' << std::setprecision(17) << "breakpoints:";
  for (double b : d.breakpoints()) os << ' ' << b;
  os << '\n';
  for (const auto& p : d.pieces()) {
    os << "piece:";
    for (double c : p.coeffs()) os << ' ' << c;
    os << '\n';
  }
}

}  // namespace besov
