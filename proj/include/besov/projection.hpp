#pragma once

// Deterministic oracle for the detail projection Q_j f of a piecewise
// polynomial density: coefficients, norms and the variance functionals of
// the energy U-statistic. All integrals are exact for the interpolated psi
// table (piecewise linear psi times polynomial pieces of f).

#include "besov/densities.hpp"
#include "besov/wavelet.hpp"

#include <optional>
#include <vector>

namespace besov {

// beta_{jk} = <psi_{jk}, f> for k = k_first .. k_first + size - 1.
struct CoefficientVector {
  int j = 0;
  long k_first = 0;
  std::vector<double> beta;

  [[nodiscard]] long k_last() const noexcept { return k_first + static_cast<long>(beta.size()) - 1; }
  [[nodiscard]] double at(long k) const noexcept {
    return (k < k_first || k > k_last()) ? 0.0 : beta[static_cast<std::size_t>(k - k_first)];
  }
  // sum_k beta^2 = ||Q_j f||_2^2
  [[nodiscard]] double energy() const noexcept;
};

// Band of A_{k,k+l} = int psi_{jk} psi_{j,k+l} f, 0 <= l < S.
struct BandGram {
  int j = 0;
  long k_first = 0;
  int width = 0;
  std::vector<double> values;  // row-major (k - k_first, l)

  [[nodiscard]] long rows() const noexcept { return width == 0 ? 0 : static_cast<long>(values.size()) / width; }
  [[nodiscard]] double at(long k, int l) const noexcept;
};

struct VarianceTerms {
  int j = 0;
  double qj_energy = 0.0;       // ||Q_j f||_2^2
  double delta_j = 0.0;         // int (Q_j f)^2 f
  double sigma_tilde_sq = 0.0;  // delta_j - qj_energy^2
  double second_moment = 0.0;   // E G_j(X1, X2)^2
  double sigma_sq = 0.0;        // Var G_j(X1, X2)
  std::optional<double> abs_cube;    // int |Q_j f|^3 dx
  std::optional<double> g_abs_cube;  // E |Q_j f(X) - qj_energy|^3
};

// Integrals of the piecewise linear grid representation of Q_j f.
struct GridIntegrals {
  double l2_sq = 0.0;        // int (Q_j f)^2
  double abs_p = 0.0;        // int |Q_j f|^p
  double p = 2.0;
  // Only with a density:
  double weighted_sq = 0.0;  // int (Q_j f)^2 f
  double abs_cube = 0.0;     // int |Q_j f|^3
  double g_abs_cube = 0.0;   // int |Q_j f - E|^3 f, E = sum beta^2
};

class ProjectionOracle {
 public:
  // Cell moments are tabulated for polynomial pieces up to `max_degree`.
  ProjectionOracle(WaveletSystem system, int max_degree);

  [[nodiscard]] const WaveletSystem& system() const noexcept { return system_; }
  [[nodiscard]] int max_degree() const noexcept { return max_degree_; }

  [[nodiscard]] CoefficientVector coefficients(const PiecewisePolyDensity& f, int j) const;
  [[nodiscard]] BandGram gram(const PiecewisePolyDensity& f, int j) const;
  [[nodiscard]] VarianceTerms variance_terms(const PiecewisePolyDensity& f, int j,
                                             bool third_moments = true) const;
  // f may be null; then only l2_sq and abs_p are filled.
  [[nodiscard]] GridIntegrals grid_integrals(const CoefficientVector& c, const PiecewisePolyDensity* f,
                                             double p = 3.0) const;

 private:
  void check(const PiecewisePolyDensity& f, int j) const;

  WaveletSystem system_;
  int max_degree_;
  // moments_[i * (D+1) + q] = int_i^{i+1} (t - S/2)^q psi(t) dt
  std::vector<double> moments_;
  // lag_moments_[(l * S + i) * (D+1) + q] = int_i^{i+1} (t - S/2)^q psi(t) psi(t - l) dt
  std::vector<double> lag_moments_;
};

// Shared oracle for the system with tables of degree >= max_degree.
const ProjectionOracle& oracle_for(const WaveletSystem& system, int max_degree);

CoefficientVector coefficients(const PiecewisePolyDensity& f, const WaveletSystem& system, int j);
// Q_j f(x) = sum_k beta_k psi_{jk}(x)
double qj_eval(const CoefficientVector& c, const WaveletSystem& system, double x);
// ||Q_j f||_p; exact coefficient norm for p = 2, grid quadrature otherwise.
double qj_norm(const CoefficientVector& c, const WaveletSystem& system, double p);
VarianceTerms variance_terms(const PiecewisePolyDensity& f, const WaveletSystem& system, int j,
                             bool third_moments = true);
// delta_j / ||Q_j f||^2; DegenerateError when the energy is zero.
double regularity_ratio(const PiecewisePolyDensity& f, const WaveletSystem& system, int j);

struct DecayRow {
  int j = 0;
  double qj_norm_2 = 0.0;
  double r_j = 0.0;  // -log2 ||Q_j f||_2 / j - 1/2
  double delta_j = 0.0;
  double sigma_sq = 0.0;
  double sigma_tilde_sq = 0.0;
  double regularity_ratio = 0.0;  // NaN when the energy vanishes
};

std::vector<DecayRow> decay_table(const PiecewisePolyDensity& f, const WaveletSystem& system,
                                  int j_min, int j_max);

// Least-squares slope of log2 ||Q_j f||_2 against j.
double decay_slope(const std::vector<DecayRow>& rows);

}  // namespace besov
