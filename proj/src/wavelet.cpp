#include "besov/wavelet.hpp"

#include "besov/errors.hpp"
#include "besov/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <cstring>
#include <fstream>
#include <sstream>

namespace besov {

DaubechiesFilter build_filter(int order) {
  if (order < 1 || order > kMaxDaubechiesOrder) {
    throw ConfigError("Daubechies order must be in 1..20, got " + std::to_string(order));
  }
  DaubechiesFilter f;
  f.order = order;
  const auto h = detail::daubechies_lowpass(order);
  f.lowpass.assign(h.begin(), h.end());
  const std::size_t len = f.lowpass.size();
  f.highpass.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    f.highpass[k] = (k % 2 == 0 ? 1.0 : -1.0) * f.lowpass[len - 1 - k];
  }
  return f;
}

DyadicTable::DyadicTable(int order, int level, std::vector<double> phi, std::vector<double> psi)
    : order_(order),
      level_(level),
      support_(2 * order - 1),
      spacing_(std::ldexp(1.0, -level)),
      scale_(std::ldexp(1.0, level)),
      phi_(std::move(phi)),
      psi_(std::move(psi)) {
  const auto expected = static_cast<std::size_t>(support_) * (std::size_t{1} << level) + 1;
  if (phi_.size() != expected || psi_.size() != expected) {
    throw ConfigError("dyadic table size does not match order/level");
  }
}

DyadicTable DyadicTable::negated() const {
  std::vector<double> psi = psi_;
  for (double& v : psi) v = -v;
  return DyadicTable(order_, level_, phi_, std::move(psi));
}

namespace {

// phi at the integers 0..S-1 (phi(S) = 0): the eigenvector for eigenvalue 1 of
// the two-scale matrix, normalised to sum to one.
std::vector<double> phi_at_integers(const DaubechiesFilter& filter) {
  const int n = filter.support_len();
  const auto& h = filter.lowpass;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int k = 2 * i - j;
      if (k >= 0 && k < static_cast<int>(h.size())) a(i, j) = std::sqrt(2.0) * h[static_cast<std::size_t>(k)];
    }
    a(i, i) -= 1.0;
  }
  a.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a.topRows(n));
  if (n > 1 && lu.rank() != n - 1) {
    std::ostringstream msg;
    msg << "refinement matrix for order " << filter.order << " has eigenvalue-1 rank "
        << lu.rank() << " (expected " << n - 1 << ")";
    throw DegenerateError(msg.str());
  }
  const Eigen::VectorXd v = a.colPivHouseholderQr().solve(rhs);
  const double residual = (a * v - rhs).norm();
  if (!(residual < 1e-10)) {
    throw DegenerateError("refinement eigenproblem residual " + std::to_string(residual));
  }
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = v(i);
  return out;
}

// Values at level `lev` from values at level `lev - 1` via
// f(x) = sqrt(2) sum_k c_k phi(2x - k).
std::vector<double> refine(const std::vector<double>& coarse, std::span<const double> c,
                           int support, int lev) {
  const std::size_t len = static_cast<std::size_t>(support) * (std::size_t{1} << lev) + 1;
  const std::size_t step = std::size_t{1} << (lev - 1);
  std::vector<double> fine(len, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double w = std::sqrt(2.0) * c[k];
    const std::size_t off = k * step;
    for (std::size_t i = 0; i < coarse.size() && off + i < len; ++i) fine[off + i] += w * coarse[i];
  }
  return fine;
}

}  // namespace

DyadicTable cascade(const DaubechiesFilter& filter, int level) {
  if (level < 1) throw ConfigError("table level must be >= 1");
  const int s = filter.support_len();
  std::vector<double> phi = phi_at_integers(filter);
  std::vector<double> prev;
  for (int lev = 1; lev <= level; ++lev) {
    prev = std::move(phi);
    phi = refine(prev, filter.lowpass, s, lev);
  }
  std::vector<double> psi = refine(prev, filter.highpass, s, level);
  return DyadicTable(filter.order, level, std::move(phi), std::move(psi));
}

double eval_psi_jk(const DyadicTable& table, int j, long k, double x) noexcept {
  const double scale = std::ldexp(1.0, j);
  return std::sqrt(scale) * table.psi_at(scale * x - static_cast<double>(k));
}

double psi_integral(const DyadicTable& table, double a, double b) {
  const double s = table.support();
  a = std::max(a, 0.0);
  b = std::min(b, s);
  if (!(b > a)) return 0.0;
  const double h = table.spacing();
  const double inv_h = 1.0 / h;
  const long m0 = static_cast<long>(std::floor(a * inv_h));
  const long m1 = std::min(static_cast<long>(std::ceil(b * inv_h)), table.cells());
  CompensatedSum sum;
  for (long m = m0; m < m1; ++m) {
    const double lo = std::max(a, static_cast<double>(m) * h);
    const double hi = std::min(b, static_cast<double>(m + 1) * h);
    if (hi > lo) sum += 0.5 * (hi - lo) * (table.psi_at(lo) + table.psi_at(hi));
  }
  return sum.value();
}

double psi_poly_integral(const DyadicTable& table, double a, double b,
                         std::span<const double> coeffs, double center) {
  const double s = table.support();
  a = std::max(a, 0.0);
  b = std::min(b, s);
  if (!(b > a) || coeffs.empty()) return 0.0;
  const auto& rule = gauss_rule_for_degree(static_cast<int>(coeffs.size()));
  const double h = table.spacing();
  const double inv_h = 1.0 / h;
  const long m0 = static_cast<long>(std::floor(a * inv_h));
  const long m1 = std::min(static_cast<long>(std::ceil(b * inv_h)), table.cells());
  const auto psi = table.psi();
  CompensatedSum sum;
  for (long m = m0; m < m1; ++m) {
    const double x0 = static_cast<double>(m) * h;
    const double lo = std::max(a, x0);
    const double hi = std::min(b, x0 + h);
    if (!(hi > lo)) continue;
    const double p0 = psi[static_cast<std::size_t>(m)];
    const double dp = psi[static_cast<std::size_t>(m) + 1] - p0;
    double cell = 0.0;
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      const double t = lo + (hi - lo) * rule.nodes[g];
      const double z = t - center;
      double poly = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) poly = poly * z + *it;
      cell += rule.weights[g] * poly * (p0 + dp * (t - x0) * inv_h);
    }
    sum += cell * (hi - lo);
  }
  return sum.value();
}

FPsiSamples compute_f_psi(const DyadicTable& table, int grid_points) {
  if (grid_points < 256) throw ConfigError("F_psi needs at least 256 grid points");
  const auto psi = table.psi();
  const double h = table.spacing();
  // running[m] = int_0^{m h} psi
  std::vector<double> running(psi.size(), 0.0);
  CompensatedSum acc;
  for (std::size_t m = 1; m < psi.size(); ++m) {
    acc += 0.5 * h * (psi[m - 1] + psi[m]);
    running[m] = acc.value();
  }
  const double total = running.back();
  auto tail = [&](double x) {
    if (x <= 0.0) return total;
    if (x >= table.support()) return 0.0;
    const auto m = static_cast<std::size_t>(x / h);
    const double x0 = static_cast<double>(m) * h;
    const double partial = 0.5 * (x - x0) * (psi[m] + table.psi_at(x));
    return total - (running[m] + partial);
  };

  FPsiSamples out;
  out.u.resize(static_cast<std::size_t>(grid_points));
  out.values.resize(static_cast<std::size_t>(grid_points));
  out.inf = std::numeric_limits<double>::infinity();
  out.sup = -out.inf;
  for (int i = 0; i < grid_points; ++i) {
    const double u = static_cast<double>(i) / grid_points;
    double f = 0.0;
    for (int k = 0; k < table.support(); ++k) {
      const double t = tail(u + k);
      f += t * t;
    }
    out.u[static_cast<std::size_t>(i)] = u;
    out.values[static_cast<std::size_t>(i)] = f;
    out.inf = std::min(out.inf, f);
    out.sup = std::max(out.sup, f);
  }
  return out;
}

WaveletConstants compute_constants(const DyadicTable& table, const DaubechiesFilter& filter) {
  if (table.level() < kMinConstantsLevel) {
    throw ConfigError("wavelet constants need a table level >= 10, got " +
                      std::to_string(table.level()));
  }
  const auto psi = table.psi();
  const long unit = table.points_per_unit();
  const double h = table.spacing();
  const int s = table.support();

  // Nonvanishing on (0, 1]: every grid value strictly one sign.
  const double sign0 = psi[1] > 0.0 ? 1.0 : -1.0;
  for (long m = 1; m <= unit; ++m) {
    if (!(psi[static_cast<std::size_t>(m)] * sign0 > 0.0)) {
      std::ostringstream msg;
      msg << "DB" << filter.order << ": psi vanishes or changes sign at x = "
          << static_cast<double>(m) * h
          << " in (0, 1]; the nonvanishing assumption on (0, 1 + delta1] fails";
      throw AssumptionViolation(msg.str());
    }
  }

  WaveletConstants c;
  c.support_len = s;
  c.moment_degree = filter.moment_degree();

  // First zero crossing after x = 1, shrunk by one grid step of the coarsest
  // admissible table so that delta1 (and psi1) do not move with the level.
  double root = static_cast<double>(s);
  for (long m = unit + 1; m < static_cast<long>(psi.size()); ++m) {
    const double v = psi[static_cast<std::size_t>(m)];
    if (!(v * sign0 > 0.0)) {
      const double prev = psi[static_cast<std::size_t>(m - 1)];
      root = (static_cast<double>(m - 1) + prev / (prev - v)) * h;
      break;
    }
  }
  c.delta1 = std::min(root - 1.0, 1.0) - kDelta1Margin;

  for (long m = 0; m < unit; ++m) {
    double sum = 0.0;
    for (int i = 0; i < s; ++i) sum += std::abs(psi[static_cast<std::size_t>(m + i * unit)]);
    c.psi0 = std::max(c.psi0, sum);
  }
  for (double v : psi) c.psi2 = std::max(c.psi2, std::abs(v));

  c.psi1 = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= c.moment_degree; ++n) {
    // (delta1 - u)^n = (-1)^n (u - delta1)^n
    std::vector<double> coeffs(static_cast<std::size_t>(n) + 1, 0.0);
    coeffs.back() = (n % 2 == 0) ? 1.0 : -1.0;
    c.psi1 = std::min(c.psi1, std::abs(psi_poly_integral(table, 0.0, c.delta1, coeffs, c.delta1)));
  }

  // Lower moments vanish, so the first nonzero moment is shift invariant;
  // centring keeps the powers small.
  std::vector<double> top(static_cast<std::size_t>(c.moment_degree) + 2, 0.0);
  top.back() = 1.0;
  c.moment_b = psi_poly_integral(table, 0.0, s, top, 0.5 * s);

  const auto fpsi = compute_f_psi(table, static_cast<int>(unit));
  c.f_psi_inf = fpsi.inf;
  c.f_psi_sup = fpsi.sup;
  return c;
}

double v_correction(int j, double f_psi_inf) {
  if (j < 1) throw ConfigError("V_j needs j >= 1");
  return std::sqrt(f_psi_inf + 1.0 / j);
}

WaveletSystem WaveletSystem::create(int order, int level) {
  auto filter = build_filter(order);
  auto table = cascade(filter, level);
  return WaveletSystem(std::move(filter), std::move(table));
}

WaveletSystem::WaveletSystem(DaubechiesFilter filter, DyadicTable table) {
  auto data = std::make_shared<Data>(Data{std::move(filter), std::move(table), std::nullopt, {}});
  try {
    data->constants = compute_constants(data->table, data->filter);
  } catch (const ConfigError& e) {
    data->refusal = e.what();
  }
  data_ = std::move(data);
}

const WaveletConstants& WaveletSystem::constants() const {
  if (!data_->constants) throw AssumptionViolation(data_->refusal);
  return *data_->constants;
}

namespace {

constexpr std::array<char, 4> kMagic = {'B', 'S', 'V', 'T'};

template <typename T>
void write_le(std::ostream& os, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!is) throw ConfigError("truncated table file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void save_table(const DyadicTable& table, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write table file " + path.string());
  os.write(kMagic.data(), kMagic.size());
  write_le<std::int32_t>(os, table.order());
  write_le<std::int32_t>(os, table.level());
  write_le<std::uint64_t>(os, table.psi().size());
  for (double v : table.phi()) write_le<double>(os, v);
  for (double v : table.psi()) write_le<double>(os, v);
}

DyadicTable load_table(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read table file " + path.string());
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw ConfigError("not a wavelet table file: " + path.string());
  const auto order = read_le<std::int32_t>(is);
  const auto level = read_le<std::int32_t>(is);
  const auto count = read_le<std::uint64_t>(is);
  if (order < 1 || order > kMaxDaubechiesOrder || level < 1 || level > 24) {
    throw ConfigError("corrupt table header in " + path.string());
  }
  std::vector<double> phi(count), psi(count);
  for (auto& v : phi) v = read_le<double>(is);
  for (auto& v : psi) v = read_le<double>(is);
  return DyadicTable(order, level, std::move(phi), std::move(psi));
}

DyadicTable cached_table(const std::filesystem::path& dir, const DaubechiesFilter& filter, int level) {
  const auto path = dir / ("db" + std::to_string(filter.order) + "_L" + std::to_string(level) + ".bin");
  if (std::filesystem::exists(path)) {
    auto table = load_table(path);
    if (table.order() == filter.order && table.level() == level) return table;
  }
  auto table = cascade(filter, level);
  std::filesystem::create_directories(dir);
  save_table(table, path);
  return table;
}

}  // namespace besov
