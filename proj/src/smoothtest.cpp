#include "besov/smoothtest.hpp"

#include "besov/errors.hpp"
#include "besov/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace besov {

ConstantMode parse_constant_mode(const std::string& name) {
  if (name == "psi1") return ConstantMode::Psi1;
  if (name == "v_correction") return ConstantMode::VCorrection;
  throw ConfigError("unknown constant mode '" + name + "' (expected psi1 or v_correction)");
}

std::string to_string(ConstantMode mode) {
  return mode == ConstantMode::Psi1 ? "psi1" : "v_correction";
}

double TestConfig::z() const { return z_alpha ? *z_alpha : normal_quantile(alpha); }

ConstantMode TestConfig::mode() const {
  if (constant_mode) return *constant_mode;
  return mu0 == 0 ? ConstantMode::VCorrection : ConstantMode::Psi1;
}

void TestConfig::validate(int moment_degree) const {
  if (mu0 < 0) throw ConfigError("mu0 must be nonnegative");
  if (mu0 > moment_degree)
    throw ConfigError("test undefined: mu0 = " + std::to_string(mu0) + " exceeds d(r) = " +
                      std::to_string(moment_degree) + " of this wavelet");
  if (!z_alpha && !(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (z_alpha && !std::isfinite(*z_alpha)) throw ConfigError("z_alpha must be finite");
  if (!(pi > 0.0 && pi < 1.0)) throw ConfigError("enrichment fraction pi must lie in (0, 1)");
  if (tau < 1) throw ConfigError("tau must be >= 1");
  if (!(delta1_class > 0.0)) throw ConfigError("delta1 of the class must be positive");
}

ThresholdTerms threshold_terms(const TestConfig& config, const WaveletConstants& constants,
                               std::size_t n, int j) {
  config.validate(constants.moment_degree);
  if (n < 2) throw ConfigError("threshold needs n >= 2");
  if (j < 1) throw ConfigError("threshold needs j >= 1");
  ThresholdTerms t;
  t.z_alpha = config.z();
  t.delta1_class = config.delta1_class;
  t.mode = config.mode();
  t.psi1 = constants.psi1;
  t.f_psi_inf = constants.f_psi_inf;
  t.v_j = v_correction(j, constants.f_psi_inf);
  t.k_const = t.mode == ConstantMode::Psi1 ? t.psi1 : t.v_j;
  t.tau = config.tau;
  t.xi_at = builtin(BuiltinDensity::Xi, config.tau)(1.25);
  t.pi = config.pi;
  t.mu0 = config.mu0;
  t.mu0_factorial = factorial(config.mu0);
  t.n = n;
  t.j = j;
  const double scale = t.delta1_class * t.k_const * (1.0 - t.pi) / t.mu0_factorial;
  t.variance_term = t.z_alpha * scale * std::sqrt(t.pi * t.xi_at / 2.0) /
                    (std::sqrt(static_cast<double>(n)) * std::exp2(j * (t.mu0 + 0.5)));
  t.bias_term = scale * scale * std::exp2(-j * (2.0 * t.mu0 + 1.0));
  t.threshold = t.variance_term + t.bias_term;
  return t;
}

double threshold(const TestConfig& config, const WaveletConstants& constants, std::size_t n, int j) {
  return threshold_terms(config, constants, n, j).threshold;
}

double index_cutoff(double threshold, int j) { return id_estimate(threshold, j); }

TestOutcome decide(double l_nj, const ThresholdTerms& terms) {
  TestOutcome o;
  o.l_nj = l_nj;
  o.id_hat = id_estimate(l_nj, terms.j);
  o.threshold = terms.threshold;
  o.index_cutoff = index_cutoff(terms.threshold, terms.j);
  o.reject = l_nj <= terms.threshold;
  o.reject_index = o.id_hat >= o.index_cutoff;
  o.j = terms.j;
  o.n = terms.n;
  return o;
}

// ---------------------------------------------------------------------------

double Histogram::edge(std::size_t i) const noexcept {
  if (counts.empty()) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(counts.size());
}

Histogram make_histogram(const std::vector<double>& values, std::size_t bins) {
  Histogram h;
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  h.counts.assign(bins, 0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo <= hi)) {
    h.lo = h.hi = 0.0;
  } else {
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
    h.lo = lo;
    h.hi = hi;
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      ++h.infinite;
      continue;
    }
    auto b = static_cast<std::size_t>((v - h.lo) / (h.hi - h.lo) * static_cast<double>(bins));
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

std::vector<ReplicateRow> run_replicates(const PiecewisePolyDensity& density, const WaveletSystem& system,
                                         const ReplicateSpec& spec) {
  if (spec.reps == 0) throw ConfigError("need at least one replicate");
  if (spec.n_raw == 0) throw ConfigError("sample size must be at least 1");
  std::optional<PiecewisePolyDensity> xi;
  if (spec.pi > 0.0) xi.emplace(builtin(BuiltinDensity::Xi, spec.tau));

  std::vector<ReplicateRow> rows(spec.reps);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < spec.reps; r = next++) {
      ReplicateRow row;
      row.replicate = r;
      row.seed = derive_seed(spec.seed, r, 2 * spec.arm);
      Sample s = sample(density, spec.n_raw, row.seed, r);
      if (xi) {
        row.enrich_seed = derive_seed(spec.seed, r, 2 * spec.arm + 1);
        s = enrich(s, *xi, spec.pi, row.enrich_seed);
      }
      const EnergyEstimate e = estimate_energy(s.values, system, spec.j, 1);
      row.n = e.n;
      row.e_nj = e.e_nj;
      row.l_nj = e.l_nj;
      row.id_hat_E = e.id_hat_E;
      row.id_hat_L = e.id_hat_L;
      rows[r] = row;
    }
  };
  const int nt = std::clamp(spec.threads, 1, static_cast<int>(std::min<std::size_t>(spec.reps, 256)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

StudySummary power_study(const PiecewisePolyDensity& f_null, const PiecewisePolyDensity& f_alt,
                         const WaveletSystem& system, const TestConfig& config, std::size_t n,
                         std::size_t replicates, std::uint64_t master_seed, int threads,
                         std::optional<int> j_override) {
  config.validate(system.moment_degree());
  StudySummary out;
  out.config = config;
  out.n_raw = n;
  out.n_enriched = n + enrichment_size(n, config.pi);
  out.j = j_override ? *j_override
                     : resolution(out.n_enriched, config.rule, system.moment_degree(), config.explicit_j);
  out.terms = threshold_terms(config, system.constants(), out.n_enriched, out.j);

  auto run_arm = [&](const PiecewisePolyDensity& f, std::uint64_t arm) {
    ArmSummary a;
    a.density = f.label();
    ReplicateSpec spec;
    spec.n_raw = n;
    spec.pi = config.pi;
    spec.tau = config.tau;
    spec.j = out.j;
    spec.reps = replicates;
    spec.seed = master_seed;
    spec.arm = arm;
    spec.threads = threads;
    a.rows = run_replicates(f, system, spec);
    std::vector<double> ids;
    for (const auto& r : a.rows) {
      const TestOutcome o = decide(r.l_nj, out.terms);
      if (o.reject) ++a.rejections;
      if (o.threshold > 0.0 && o.reject != o.reject_index) a.rules_agree = false;
      a.outcomes.push_back(o);
      ids.push_back(r.id_hat_L);
    }
    a.rejection_rate = static_cast<double>(a.rejections) / static_cast<double>(replicates);
    a.id_histogram = make_histogram(ids, 20);
    return a;
  };
  out.null_arm = run_arm(f_null, 0);
  out.alt_arm = run_arm(f_alt, 1);
  out.size = out.null_arm.rejection_rate;
  out.power = out.alt_arm.rejection_rate;
  return out;
}

MeanSpread summarize(std::vector<double> values) {
  MeanSpread m;
  if (values.empty()) throw ConfigError("nothing to summarize");
  std::sort(values.begin(), values.end());
  CompensatedSum sum;
  std::size_t finite = 0;
  for (double v : values) {
    if (std::isfinite(v)) {
      sum += v;
      ++finite;
    } else {
      ++m.infinite;
    }
  }
  m.finite_mean = finite > 0 ? sum.value() / static_cast<double>(finite)
                             : std::numeric_limits<double>::quiet_NaN();
  m.mean = m.infinite > 0 ? std::numeric_limits<double>::infinity() : m.finite_mean;
  if (finite > 1) {
    CompensatedSum ss;
    for (double v : values)
      if (std::isfinite(v)) ss += (v - m.finite_mean) * (v - m.finite_mean);
    m.sd = std::sqrt(ss.value() / static_cast<double>(finite - 1));
  }
  m.q025 = empirical_quantile(values, 0.025);
  m.q975 = empirical_quantile(values, 0.975);
  return m;
}

}  // namespace besov
