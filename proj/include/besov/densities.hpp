#pragma once

// Piecewise-polynomial densities with exact CDFs and derivative jumps,
// reproducible inverse-CDF sampling and the enrichment (mixing) procedure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace besov {

// Dense polynomial, coefficients in increasing powers of x.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  [[nodiscard]] double operator()(double x) const noexcept {
    double r = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * x + *it;
    return r;
  }
  [[nodiscard]] int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  [[nodiscard]] const std::vector<double>& coeffs() const noexcept { return coeffs_; }

  [[nodiscard]] Polynomial derivative() const;
  // Antiderivative vanishing at 0.
  [[nodiscard]] Polynomial antiderivative() const;
  // Coefficients of the same polynomial in powers of (x - x0).
  [[nodiscard]] std::vector<double> taylor(double x0) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& p);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  std::vector<double> coeffs_;
};

// Density given by polynomial pieces on [a_i, a_{i+1}), zero outside
// [a_0, a_last]. Construction validates nonnegativity, unit mass (1e-10) and
// support inside [-1.5, 1.5].
class PiecewisePolyDensity {
 public:
  PiecewisePolyDensity(std::vector<double> breakpoints, std::vector<Polynomial> pieces,
                       std::string label, std::optional<int> tau = std::nullopt);

  [[nodiscard]] double operator()(double x) const noexcept;
  [[nodiscard]] double cdf(double x) const noexcept;

  [[nodiscard]] const std::string& label() const noexcept { return label_; }
  [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  [[nodiscard]] const std::vector<Polynomial>& pieces() const noexcept { return pieces_; }
  [[nodiscard]] double support_lo() const noexcept { return breakpoints_.front(); }
  [[nodiscard]] double support_hi() const noexcept { return breakpoints_.back(); }
  [[nodiscard]] int max_degree() const noexcept;
  // Smoothness parameter when this is an enrichment density xi_tau.
  [[nodiscard]] std::optional<int> tau() const noexcept { return tau_; }

  // Exact integrals from polynomial antiderivatives.
  [[nodiscard]] double mass() const noexcept;
  [[nodiscard]] double l2_norm_sq() const;

 private:
  [[nodiscard]] std::size_t piece_of(double x) const noexcept;

  std::vector<double> breakpoints_;
  std::vector<Polynomial> pieces_;
  std::vector<Polynomial> antiderivatives_;  // vanish at the left end of their piece
  std::vector<double> cumulative_;           // cdf at each breakpoint
  std::string label_;
  std::optional<int> tau_;
};

enum class BuiltinDensity { F0, F1, Parabola, Xi, Step };

// f0 = 1_[0,1](1/2 + 3x(1-x)), f1 = 1_[0,1] 6x(1-x), parabola = max(3/4(1-x^2), 0),
// step = 1_[0,1], xi = c_tau (1.5-x)^{tau+1} (1.5+x)^{tau+1} on [-1.5, 1.5].
PiecewisePolyDensity builtin(BuiltinDensity name, int tau = 0);
// Accepts f0, f1, parabola, step, xi<tau> (e.g. "xi4"), "xi(4)" or "xi:4".
PiecewisePolyDensity builtin(const std::string& name);

// c_tau = (2 tau + 3)! / ((tau + 1)!)^2 * 3^{-(2 tau + 3)}.
double xi_normalizer(int tau);

// (1 - pi) f + pi xi as a single piecewise-polynomial density.
PiecewisePolyDensity mixture(const PiecewisePolyDensity& f, const PiecewisePolyDensity& xi, double pi);
double eval_mixture(const PiecewisePolyDensity& f, const PiecewisePolyDensity& xi, double pi, double x);

struct BreakpointDefect {
  double location = 0.0;
  int order = 0;      // lowest derivative order with a nonzero jump
  double jump = 0.0;  // |f^(order)(d-) - f^(order)(d+)|
};

struct DefectProfile {
  std::optional<int> index_m;               // id(f); empty when f has no defect
  std::vector<BreakpointDefect> defects;     // breakpoints of order index_m
  std::vector<BreakpointDefect> breakpoints; // every breakpoint with a finite order
  double delta1_class = 0.0;                 // min jump over `defects`
  double delta2_class = 0.0;                 // max jump over `defects`
  int n_defects = 0;

  // Profile recomputed from the breakpoints inside [lo, hi].
  [[nodiscard]] DefectProfile restricted(double lo, double hi) const;
};

DefectProfile defect_profile(const PiecewisePolyDensity& density);

struct Provenance {
  std::string density;
  std::size_t n_raw = 0;
  double pi = 0.0;                  // 0 when not enriched
  std::optional<int> tau;           // enrichment smoothness
  std::uint64_t seed = 0;           // raw sampling seed
  std::optional<std::uint64_t> enrich_seed;
  std::uint64_t replicate = 0;
};

struct Sample {
  std::vector<double> values;
  Provenance provenance;
};

// Inverse-CDF sampler; holds per-piece antiderivatives.
class InverseCdfSampler {
 public:
  explicit InverseCdfSampler(const PiecewisePolyDensity& density);
  // Solves F(x) = u, u in [0, 1).
  [[nodiscard]] double invert(double u) const noexcept;
  void draw(std::span<double> out, std::uint64_t seed) const;

 private:
  struct Piece {
    double lo, hi, mass_before, mass;
    std::vector<double> density;  // powers of (x - lo)
    std::vector<double> cdf;      // powers of (x - lo), zero constant term
  };
  std::vector<Piece> pieces_;
  std::vector<double> starts_;
  double total_;
};

Sample sample(const PiecewisePolyDensity& density, std::size_t n, std::uint64_t seed,
              std::uint64_t replicate = 0);

// Appends round(pi n / (1 - pi)) draws from xi and shuffles deterministically.
Sample enrich(const Sample& raw, const PiecewisePolyDensity& xi, double pi, std::uint64_t seed);
std::size_t enrichment_size(std::size_t n, double pi);

// Plain text: one '#'-prefixed provenance line, then one value per line.
void write_sample(std::ostream& os, const Sample& s);
Sample read_sample(std::istream& is);
std::string provenance_line(const Provenance& p);

// Structured text density file:
//   label: name
//   breakpoints: a0 a1 ... an
//   piece: c0 c1 ...      (one line per interval, powers of x)
PiecewisePolyDensity parse_density(std::istream& is);
PiecewisePolyDensity load_density(const std::filesystem::path& path);
void write_density(std::ostream& os, const PiecewisePolyDensity& d);

}  // namespace besov
