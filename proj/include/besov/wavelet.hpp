#pragma once

// Compactly supported Daubechies wavelet systems: filters, dyadic value tables
// of phi and psi obtained by the cascade (refinement) algorithm, and the
// wavelet-dependent constants consumed by the smoothness test.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace besov {

inline constexpr int kMaxDaubechiesOrder = 20;
inline constexpr int kDefaultTableLevel = 14;
inline constexpr int kMinConstantsLevel = 10;
// delta1 = (first zero of psi after 1) - 1 - kDelta1Margin, capped at 1 - margin
inline constexpr double kDelta1Margin = 0x1.0p-10;

struct DaubechiesFilter {
  int order = 0;
  std::vector<double> lowpass;   // h_0 .. h_{2N-1}
  std::vector<double> highpass;  // g_k = (-1)^k h_{2N-1-k}

  // S(r): psi is supported on [0, S(r)].
  [[nodiscard]] int support_len() const noexcept { return 2 * order - 1; }
  // N vanishing moments, i.e. d(r) = N - 1.
  [[nodiscard]] int vanishing_moments() const noexcept { return order; }
  [[nodiscard]] int moment_degree() const noexcept { return order - 1; }
};

// Throws ConfigError unless 1 <= order <= 20.
DaubechiesFilter build_filter(int order);

// phi and psi sampled at m / 2^level for m = 0 .. S * 2^level.
// Values between grid points are linearly interpolated.
class DyadicTable {
 public:
  DyadicTable(int order, int level, std::vector<double> phi, std::vector<double> psi);

  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] int level() const noexcept { return level_; }
  [[nodiscard]] int support() const noexcept { return support_; }
  [[nodiscard]] long points_per_unit() const noexcept { return long{1} << level_; }
  [[nodiscard]] double spacing() const noexcept { return spacing_; }
  [[nodiscard]] long cells() const noexcept { return static_cast<long>(psi_.size()) - 1; }

  [[nodiscard]] std::span<const double> phi() const noexcept { return phi_; }
  [[nodiscard]] std::span<const double> psi() const noexcept { return psi_; }

  // Grid value psi(m / 2^level); zero outside the table.
  [[nodiscard]] double psi_grid(long m) const noexcept {
    return (m < 0 || m >= static_cast<long>(psi_.size())) ? 0.0 : psi_[static_cast<std::size_t>(m)];
  }

  // Interpolated psi(t); exactly zero outside [0, S].
  [[nodiscard]] double psi_at(double t) const noexcept { return interpolate(psi_, t); }
  [[nodiscard]] double phi_at(double t) const noexcept { return interpolate(phi_, t); }

  // Same wavelet with psi -> -psi (still an orthonormal wavelet).
  [[nodiscard]] DyadicTable negated() const;

 private:
  [[nodiscard]] double interpolate(const std::vector<double>& values, double t) const noexcept {
    if (!(t >= 0.0) || t > static_cast<double>(support_)) return 0.0;
    const double u = t * scale_;
    const auto last = static_cast<long>(values.size()) - 1;
    auto m = static_cast<long>(u);
    if (m >= last) return values[static_cast<std::size_t>(last)];
    const double frac = u - static_cast<double>(m);
    const auto i = static_cast<std::size_t>(m);
    return values[i] + frac * (values[i + 1] - values[i]);
  }

  int order_;
  int level_;
  int support_;
  double spacing_;
  double scale_;
  std::vector<double> phi_;
  std::vector<double> psi_;
};

// Cascade evaluation of phi and psi at dyadic points of spacing 2^-level.
DyadicTable cascade(const DaubechiesFilter& filter, int level);

// psi_{j,k}(x) = 2^{j/2} psi(2^j x - k), interpolated from the table.
double eval_psi_jk(const DyadicTable& table, int j, long k, double x) noexcept;

struct WaveletConstants {
  int support_len = 0;   // S(r)
  int moment_degree = 0; // d(r)
  double psi0 = 0.0;     // sup_x sum_k |psi(x - k)|
  double psi1 = 0.0;     // min_n |int_0^delta1 (delta1 - u)^n psi(u) du|
  double psi2 = 0.0;     // sup |psi|
  double delta1 = 0.0;   // psi != 0 on (0, 1 + delta1]
  double f_psi_inf = 0.0;
  double f_psi_sup = 0.0;
  double moment_b = 0.0; // int s^{d+1} psi(s) ds
};

struct FPsiSamples {
  std::vector<double> u;       // grid on [0, 1)
  std::vector<double> values;  // F_psi(u)
  double inf = 0.0;
  double sup = 0.0;
};

// F_psi(u) = sum_k (int_{u+k}^inf psi)^2. 2^-j F_psi({2^j a}) is the detail
// energy of a unit step at a. Requires grid_points >= 256.
FPsiSamples compute_f_psi(const DyadicTable& table, int grid_points);

// Throws AssumptionViolation if psi vanishes somewhere in (0, 1] on the grid,
// and ConfigError if the table level is below 10.
WaveletConstants compute_constants(const DyadicTable& table, const DaubechiesFilter& filter);

// V_j = sqrt(inf F_psi + 1/j), the finite-level replacement for Psi1.
double v_correction(int j, double f_psi_inf);

// int_a^b psi(t) dt on the interpolated table, and the running integral
// int_0^x psi.
double psi_integral(const DyadicTable& table, double a, double b);

// int_a^b poly(t) psi(t) dt for a polynomial given by its coefficients in
// powers of (t - center). Exact for the interpolated table.
double psi_poly_integral(const DyadicTable& table, double a, double b,
                         std::span<const double> coeffs, double center);

// Filter, table and (when the wavelet satisfies the nonvanishing condition)
// constants. Immutable; copies share the underlying data.
class WaveletSystem {
 public:
  static WaveletSystem create(int order, int level = kDefaultTableLevel);
  WaveletSystem(DaubechiesFilter filter, DyadicTable table);

  [[nodiscard]] const DaubechiesFilter& filter() const noexcept { return data_->filter; }
  [[nodiscard]] const DyadicTable& table() const noexcept { return data_->table; }
  [[nodiscard]] int order() const noexcept { return data_->filter.order; }
  [[nodiscard]] int support() const noexcept { return data_->table.support(); }
  [[nodiscard]] int moment_degree() const noexcept { return data_->filter.moment_degree(); }

  [[nodiscard]] bool has_constants() const noexcept { return data_->constants.has_value(); }
  // Throws AssumptionViolation with the reason when constants are unavailable.
  [[nodiscard]] const WaveletConstants& constants() const;

  [[nodiscard]] double psi_jk(int j, long k, double x) const noexcept {
    return eval_psi_jk(data_->table, j, k, x);
  }

 private:
  struct Data {
    DaubechiesFilter filter;
    DyadicTable table;
    std::optional<WaveletConstants> constants;
    std::string refusal;
  };
  std::shared_ptr<const Data> data_;
};

// Binary table cache. Layout (little-endian): "BSVT", int32 order,
// int32 level, uint64 count, then count phi values and count psi values as
// IEEE-754 doubles.
void save_table(const DyadicTable& table, const std::filesystem::path& path);
DyadicTable load_table(const std::filesystem::path& path);
// Loads db<order>_L<level>.bin from `dir` or builds and stores it.
DyadicTable cached_table(const std::filesystem::path& dir, const DaubechiesFilter& filter, int level);

namespace detail {
std::span<const double> daubechies_lowpass(int order);
}

}  // namespace besov
