#include "besov/estimator.hpp"

#include "besov/errors.hpp"
#include "besov/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace besov {
namespace {

constexpr std::size_t kChunk = std::size_t{1} << 16;

struct Accumulator {
  std::vector<CompensatedSum> sums;
  CompensatedSum diag;
};

void accumulate(std::span<const double> xs, const DyadicTable& tb, int j, long k_first,
                Accumulator& acc) {
  const double scale = std::ldexp(1.0, j);
  const double amp = std::sqrt(scale);
  const long unit = tb.points_per_unit();
  const int s = tb.support();
  const auto psi = tb.psi();
  const auto last = static_cast<long>(psi.size()) - 1;
  for (double x : xs) {
    const double u = scale * x;
    const double fl = std::floor(u);
    const auto k_top = static_cast<long>(fl);
    // psi(u - k) for k = k_top - i shares the fractional offset
    const double pos = (u - fl) * static_cast<double>(unit);
    auto m = static_cast<long>(pos);
    double w = pos - static_cast<double>(m);
    if (m >= unit) {
      m = unit - 1;
      w = 1.0;
    }
    for (int i = 0; i < s; ++i) {
      const long idx = m + i * unit;
      if (idx >= last) break;
      const double v0 = psi[static_cast<std::size_t>(idx)];
      const double v = amp * (v0 + w * (psi[static_cast<std::size_t>(idx) + 1] - v0));
      acc.sums[static_cast<std::size_t>(k_top - i - k_first)] += v;
      acc.diag += v * v;
    }
  }
}

}  // namespace

std::vector<long> BinnedCoefficients::keys() const {
  std::vector<long> out;
  for (std::size_t i = 0; i < sums.size(); ++i)
    if (sums[i] != 0.0) out.push_back(k_first + static_cast<long>(i));
  return out;
}

BinnedCoefficients bin(std::span<const double> sample, const WaveletSystem& system, int j, int threads) {
  if (j < 0 || j > 30) throw ConfigError("resolution level must lie in [0, 30]");
  BinnedCoefficients out;
  out.j = j;
  out.n = sample.size();
  if (sample.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
  if (!std::isfinite(*lo_it) || !std::isfinite(*hi_it)) throw ConfigError("sample contains non-finite values");
  const double scale = std::ldexp(1.0, j);
  const int s = system.support();
  out.k_first = static_cast<long>(std::floor(scale * *lo_it)) - s;
  const long k_last = static_cast<long>(std::floor(scale * *hi_it));
  const auto width = static_cast<std::size_t>(k_last - out.k_first + 1);

  const std::size_t chunks = (sample.size() + kChunk - 1) / kChunk;
  std::vector<Accumulator> parts(chunks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      parts[c].sums.assign(width, CompensatedSum{});
      const std::size_t begin = c * kChunk;
      const std::size_t len = std::min(kChunk, sample.size() - begin);
      accumulate(sample.subspan(begin, len), system.table(), j, out.k_first, parts[c]);
    }
  };
  const int nt = std::clamp(threads, 1, static_cast<int>(std::min<std::size_t>(chunks, 256)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<CompensatedSum> total(width);
  CompensatedSum diag;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < width; ++i) total[i].merge(p.sums[i]);
    diag.merge(p.diag);
  }
  out.sums.resize(width);
  for (std::size_t i = 0; i < width; ++i) out.sums[i] = total[i].value();
  out.diag = diag.value();
  return out;
}

double e_nj(const BinnedCoefficients& b) {
  if (b.n == 0) throw ConfigError("E_{n,j} needs n >= 1");
  const double n = static_cast<double>(b.n);
  CompensatedSum s;
  for (double v : b.sums) {
    const double m = v / n;
    s += m * m;
  }
  return s.value();
}

double l_nj(const BinnedCoefficients& b) {
  if (b.n < 2) throw ConfigError("L_{n,j} needs a sample of size >= 2");
  const double n = static_cast<double>(b.n);
  // n/(n-1) E - diag/(n(n-1)) = (sum_k sums_k^2 - diag) / (n(n-1))
  CompensatedSum s;
  for (double v : b.sums) s += v * v;
  s += -b.diag;
  return s.value() / (n * (n - 1.0));
}

double id_estimate(double energy, int j) {
  if (j < 1) throw ConfigError("index estimate needs j >= 1");
  if (!(energy > 0.0)) return std::numeric_limits<double>::infinity();
  return -std::log2(energy) / (2.0 * j) - 0.5;
}

EnergyEstimate estimate_energy(std::span<const double> sample, const WaveletSystem& system, int j,
                               int threads) {
  const BinnedCoefficients b = bin(sample, system, j, threads);
  EnergyEstimate e;
  e.j = j;
  e.n = b.n;
  e.e_nj = e_nj(b);
  e.l_nj = l_nj(b);
  e.id_hat_E = id_estimate(e.e_nj, j);
  e.id_hat_L = id_estimate(e.l_nj, j);
  return e;
}

int resolution(std::size_t n, ResolutionRule rule, int moment_degree, int explicit_j) {
  if (n < 2) throw ConfigError("resolution rule needs n >= 2");
  auto floor_log_ratio = [n](int c) {
    // largest j with 2^{c j} <= n
    int j = 0;
    while (c * (j + 1) < 64 && (std::uint64_t{1} << (c * (j + 1))) <= n) ++j;
    return j;
  };
  int j = 0;
  switch (rule) {
    case ResolutionRule::Consistency2d1: j = floor_log_ratio(2 * moment_degree + 1); break;
    case ResolutionRule::Test2d3: j = floor_log_ratio(2 * moment_degree + 3); break;
    case ResolutionRule::QuarterLog: j = floor_log_ratio(4); break;
    case ResolutionRule::Explicit: j = explicit_j; break;
  }
  if (j < 1)
    throw ConfigError("resolution too coarse: rule " + to_string(rule) + " gives j = " +
                      std::to_string(j) + " for n = " + std::to_string(n));
  return j;
}

ResolutionRule parse_resolution_rule(const std::string& name) {
  if (name == "consistency_2d1") return ResolutionRule::Consistency2d1;
  if (name == "test_2d3") return ResolutionRule::Test2d3;
  if (name == "quarter_log") return ResolutionRule::QuarterLog;
  if (name == "explicit") return ResolutionRule::Explicit;
  throw ConfigError("unknown resolution rule '" + name +
                    "' (expected consistency_2d1, test_2d3, quarter_log or explicit)");
}

std::string to_string(ResolutionRule rule) {
  switch (rule) {
    case ResolutionRule::Consistency2d1: return "consistency_2d1";
    case ResolutionRule::Test2d3: return "test_2d3";
    case ResolutionRule::QuarterLog: return "quarter_log";
    case ResolutionRule::Explicit: return "explicit";
  }
  return "unknown";
}

}  // namespace besov
