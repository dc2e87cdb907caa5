// besovtest: batch front end for the smoothness test experiments.
//
// Every command writes <out>/<command>.csv (and a .json summary) whose first
// line is a '#'-prefixed timestamp, followed by a '#' line with the resolved
// configuration. Everything after the timestamp is deterministic.

#include "besov/densities.hpp"
#include "besov/errors.hpp"
#include "besov/estimator.hpp"
#include "besov/numerics.hpp"
#include "besov/projection.hpp"
#include "besov/smoothtest.hpp"
#include "besov/wavelet.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace besov;

namespace {

struct RunConfig {
  std::string command;
  int order = 8;
  int table_level = kDefaultTableLevel;
  std::string density = "f1";
  std::string density_file;
  std::string null_density = "f0";
  std::string alt_density = "f1";
  std::size_t n = std::size_t{1} << 20;
  std::uint64_t seed = 20240601;
  std::size_t reps = 0;  // 0: default by n
  double pi = 0.0;
  int tau = 3;
  int mu0 = 0;
  double alpha = 0.05;
  std::optional<double> z_alpha;
  int j = 0;  // 0: use the resolution rule
  std::string resolution_rule = "quarter_log";
  std::string constant_mode;  // empty: default for mu0
  std::string out = ".";
  int threads = 1;
  int j_min = 3;
  int j_max = 12;
  std::string pi_grid = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  std::string save_sample;
  bool quiet = false;
};

std::size_t default_reps(std::size_t n) {
  if (n <= (std::size_t{1} << 16)) return 200;
  if (n <= (std::size_t{1} << 20)) return 100;
  return 50;
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["order"] = c.order;
  j["table_level"] = c.table_level;
  if (c.command == "test") {
    j["null_density"] = c.null_density;
    j["alt_density"] = c.alt_density;
  } else {
    j["density"] = c.density;
  }
  j["density_file"] = c.density_file;
  if (!c.density_file.empty()) {
    std::ostringstream spec;
    write_density(spec, load_density(c.density_file));
    j["density_spec"] = spec.str();
  }
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["reps"] = c.reps;
  j["pi"] = c.pi;
  j["tau"] = c.tau;
  j["mu0"] = c.mu0;
  j["alpha"] = c.alpha;
  j["z_alpha"] = c.z_alpha ? json(*c.z_alpha) : json(nullptr);
  j["j"] = c.j;
  j["resolution_rule"] = c.resolution_rule;
  j["constant_mode"] = c.constant_mode;
  j["j_min"] = c.j_min;
  j["j_max"] = c.j_max;
  j["pi_grid"] = c.pi_grid;
  j["threads"] = c.threads;
  return j;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const RunConfig& cfg, const std::vector<std::string>& header)
      : os_(path), path_(path) {
    if (!os_) throw ConfigError("cannot write " + path.string());
    os_ << "# generated " << timestamp() << '\n';
    os_ << "# config " << config_json(cfg).dump() << '\n';
    row(header);
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << csv_field(fields[i]);
    os_ << '\n';
  }
  const fs::path& path() const { return path_; }

 private:
  std::ofstream os_;
  fs::path path_;
};

void write_json(const fs::path& path, json body, const RunConfig& cfg) {
  json doc;
  doc["generated"] = timestamp();
  doc["config"] = config_json(cfg);
  for (auto& [k, v] : body.items()) doc[k] = v;
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << doc.dump(2) << '\n';
}

PiecewisePolyDensity resolve_density(const RunConfig& c, const std::string& name) {
  if (!c.density_file.empty() && name == c.density) return load_density(c.density_file);
  return builtin(name);
}

WaveletSystem make_system(const RunConfig& c) {
  if (c.table_level < 10 || c.table_level > 20) throw ConfigError("table level must lie in [10, 20]");
  return WaveletSystem::create(c.order, c.table_level);
}

TestConfig test_config(const RunConfig& c) {
  TestConfig t;
  t.mu0 = c.mu0;
  t.alpha = c.alpha;
  t.z_alpha = c.z_alpha;
  t.pi = c.pi;
  t.tau = c.tau;
  if (!c.constant_mode.empty()) t.constant_mode = parse_constant_mode(c.constant_mode);
  t.rule = parse_resolution_rule(c.resolution_rule);
  if (c.j > 0) {
    t.rule = ResolutionRule::Explicit;
    t.explicit_j = c.j;
  }
  return t;
}

int level_for(const RunConfig& c, std::size_t n_used, int moment_degree) {
  if (c.j > 0) return c.j;
  return resolution(n_used, parse_resolution_rule(c.resolution_rule), moment_degree);
}

json terms_json(const ThresholdTerms& t) {
  json j;
  j["z_alpha"] = t.z_alpha;
  j["delta1_class"] = t.delta1_class;
  j["constant_mode"] = to_string(t.mode);
  j["k_const"] = t.k_const;
  j["psi1"] = t.psi1;
  j["v_j"] = t.v_j;
  j["f_psi_inf"] = t.f_psi_inf;
  j["tau"] = t.tau;
  j["xi_normalizer"] = xi_normalizer(t.tau);
  j["xi_at_1_25"] = t.xi_at;
  j["pi"] = t.pi;
  j["mu0"] = t.mu0;
  j["mu0_factorial"] = t.mu0_factorial;
  j["n_enriched"] = t.n;
  j["j"] = t.j;
  j["variance_term"] = t.variance_term;
  j["bias_term"] = t.bias_term;
  j["threshold"] = t.threshold;
  j["index_cutoff"] = jnum(index_cutoff(t.threshold, t.j));
  return j;
}

json histogram_json(const Histogram& h) {
  json j;
  j["lo"] = h.lo;
  j["hi"] = h.hi;
  j["counts"] = h.counts;
  j["infinite"] = h.infinite;
  return j;
}

json spread_json(const MeanSpread& m) {
  json j;
  j["mean"] = jnum(m.mean);
  j["finite_mean"] = jnum(m.finite_mean);
  j["sd"] = m.sd;
  j["q025"] = jnum(m.q025);
  j["q975"] = jnum(m.q975);
  j["infinite"] = m.infinite;
  return j;
}

// ---------------------------------------------------------------------------

int cmd_constants(const RunConfig& c) {
  const auto filter = build_filter(c.order);
  const auto table = cascade(filter, c.table_level);
  const WaveletConstants k = compute_constants(table, filter);
  const auto xi = builtin(BuiltinDensity::Xi, c.tau);
  json j;
  j["order"] = c.order;
  j["support_len"] = k.support_len;
  j["moment_degree"] = k.moment_degree;
  j["psi0"] = k.psi0;
  j["psi1"] = k.psi1;
  j["psi2"] = k.psi2;
  j["delta1"] = k.delta1;
  j["f_psi_inf"] = k.f_psi_inf;
  j["f_psi_sup"] = k.f_psi_sup;
  j["moment_b"] = k.moment_b;
  j["tau"] = c.tau;
  j["xi_normalizer"] = xi_normalizer(c.tau);
  j["xi_at_1_25"] = xi(1.25);
  if (!c.quiet)
    for (const auto& [key, v] : j.items()) std::cout << key << ": " << v.dump() << '\n';
  write_json(fs::path(c.out) / "constants.json", json{{"constants", j}}, c);
  return 0;
}

int cmd_estimate(const RunConfig& c) {
  const auto ws = make_system(c);
  const auto f = resolve_density(c, c.density);
  Sample s = sample(f, c.n, derive_seed(c.seed, 0, 0));
  if (c.pi > 0.0) s = enrich(s, builtin(BuiltinDensity::Xi, c.tau), c.pi, derive_seed(c.seed, 0, 1));
  const int j = level_for(c, s.values.size(), ws.moment_degree());
  const EnergyEstimate e = estimate_energy(s.values, ws, j, c.threads);
  if (!c.save_sample.empty()) {
    std::ofstream os(c.save_sample);
    if (!os) throw ConfigError("cannot write " + c.save_sample);
    write_sample(os, s);
  }
  CsvFile csv(fs::path(c.out) / "estimate.csv", c,
              {"density", "n_raw", "pi", "tau", "seed", "j", "e_nj", "l_nj", "id_hat_L"});
  csv.row({f.label(), std::to_string(c.n), num(c.pi), c.pi > 0.0 ? std::to_string(c.tau) : "",
           std::to_string(c.seed), std::to_string(j), num(e.e_nj), num(e.l_nj), num(e.id_hat_L)});
  if (!c.quiet)
    std::cout << f.label() << " n=" << e.n << " j=" << j << " E=" << num(e.e_nj) << " L=" << num(e.l_nj)
              << " id_L=" << num(e.id_hat_L) << " id_E=" << num(e.id_hat_E) << '\n';
  return 0;
}

int cmd_test(RunConfig c) {
  if (c.pi == 0.0) c.pi = 0.5;
  const auto ws = make_system(c);
  const auto f_null = resolve_density(c, c.null_density);
  const auto f_alt = resolve_density(c, c.alt_density);
  const TestConfig tc = test_config(c);
  const std::size_t reps = c.reps ? c.reps : default_reps(c.n);
  const StudySummary st = power_study(f_null, f_alt, ws, tc, c.n, reps, c.seed, c.threads);

  CsvFile csv(fs::path(c.out) / "test.csv", c,
              {"replicate", "density", "l_nj", "id_hat", "threshold", "index_cutoff", "reject"});
  json rows = json::array();
  for (const ArmSummary* arm : {&st.null_arm, &st.alt_arm}) {
    for (std::size_t r = 0; r < arm->rows.size(); ++r) {
      const auto& o = arm->outcomes[r];
      csv.row({std::to_string(r), arm->density, num(o.l_nj), num(o.id_hat), num(o.threshold),
               num(o.index_cutoff), o.reject ? "1" : "0"});
      rows.push_back({{"replicate", r}, {"density", arm->density}, {"seed", arm->rows[r].seed},
                      {"l_nj", o.l_nj}, {"id_hat", jnum(o.id_hat)}, {"reject", o.reject}});
    }
  }
  json summary;
  summary["j"] = st.j;
  summary["n_raw"] = st.n_raw;
  summary["n_enriched"] = st.n_enriched;
  summary["reps"] = reps;
  summary["size"] = st.size;
  summary["power"] = st.power;
  summary["null_rejections"] = st.null_arm.rejections;
  summary["alt_rejections"] = st.alt_arm.rejections;
  summary["rules_agree"] = st.null_arm.rules_agree && st.alt_arm.rules_agree;
  json body;
  body["constants_used"] = terms_json(st.terms);
  body["summary"] = summary;
  body["histograms"] = {{st.null_arm.density, histogram_json(st.null_arm.id_histogram)},
                        {st.alt_arm.density, histogram_json(st.alt_arm.id_histogram)}};
  body["replicates"] = rows;
  write_json(fs::path(c.out) / "test.json", body, c);
  if (!c.quiet)
    std::cout << "j=" << st.j << " n_enriched=" << st.n_enriched << " threshold=" << num(st.terms.threshold)
              << " size=" << st.size << " (" << f_null.label() << ") power=" << st.power << " ("
              << f_alt.label() << ")\n";
  return 0;
}

int cmd_replicate(const RunConfig& c) {
  const auto ws = make_system(c);
  const auto f = resolve_density(c, c.density);
  const std::size_t reps = c.reps ? c.reps : default_reps(c.n);
  const std::size_t n_used = c.n + (c.pi > 0.0 ? enrichment_size(c.n, c.pi) : 0);
  const int j = level_for(c, n_used, ws.moment_degree());

  std::optional<ThresholdTerms> terms;
  if (c.pi > 0.0 && ws.has_constants() && c.mu0 <= ws.moment_degree())
    terms = threshold_terms(test_config(c), ws.constants(), n_used, j);

  ReplicateSpec spec;
  spec.n_raw = c.n;
  spec.pi = c.pi;
  spec.tau = c.tau;
  spec.j = j;
  spec.reps = reps;
  spec.seed = c.seed;
  spec.threads = c.threads;
  const auto rows = run_replicates(f, ws, spec);

  CsvFile csv(fs::path(c.out) / "replicate.csv", c,
              {"replicate", "density", "seed", "n", "j", "e_nj", "l_nj", "id_hat_E", "id_hat_L",
               "threshold", "index_cutoff", "reject"});
  std::vector<double> ids_l, ids_e;
  std::size_t rejections = 0;
  for (const auto& r : rows) {
    std::string thr, cut, rej;
    if (terms) {
      const TestOutcome o = decide(r.l_nj, *terms);
      thr = num(o.threshold);
      cut = num(o.index_cutoff);
      rej = o.reject ? "1" : "0";
      rejections += o.reject ? 1 : 0;
    }
    csv.row({std::to_string(r.replicate), f.label(), std::to_string(r.seed), std::to_string(r.n),
             std::to_string(j), num(r.e_nj), num(r.l_nj), num(r.id_hat_E), num(r.id_hat_L), thr, cut, rej});
    ids_l.push_back(r.id_hat_L);
    ids_e.push_back(r.id_hat_E);
  }
  const Histogram hist = make_histogram(ids_l, 20);
  {
    CsvFile h(fs::path(c.out) / "replicate_hist.csv", c, {"bin_lo", "bin_hi", "count"});
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
      h.row({num(hist.edge(i)), num(hist.edge(i + 1)), std::to_string(hist.counts[i])});
    h.row({"inf", "inf", std::to_string(hist.infinite)});
  }
  const MeanSpread sl = summarize(ids_l);
  const MeanSpread se = summarize(ids_e);
  json body;
  body["j"] = j;
  body["n_used"] = n_used;
  body["id_hat_L"] = spread_json(sl);
  body["id_hat_E"] = spread_json(se);
  body["histogram_L"] = histogram_json(hist);
  if (terms) {
    body["constants_used"] = terms_json(*terms);
    body["rejections"] = rejections;
    body["rejection_rate"] = static_cast<double>(rejections) / static_cast<double>(reps);
  }
  write_json(fs::path(c.out) / "replicate.json", body, c);
  if (!c.quiet) {
    std::cout << f.label() << " reps=" << reps << " j=" << j << " n=" << n_used << " mean id_L=" << num(sl.mean)
              << " (finite " << num(sl.finite_mean) << ", " << sl.infinite << " non-positive L)"
              << " mean id_E=" << num(se.mean) << '\n';
    if (terms) std::cout << "rejections " << rejections << "/" << reps << '\n';
  }
  return 0;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad pi grid value '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty pi grid");
  for (double p : out)
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("pi grid values must lie strictly inside (0, 1)");
  return out;
}

int cmd_pi_sweep(const RunConfig& c) {
  const auto ws = make_system(c);
  const auto f = resolve_density(c, c.density);
  const auto grid = parse_grid(c.pi_grid);
  const std::size_t reps = c.reps ? c.reps : default_reps(c.n);
  CsvFile csv(fs::path(c.out) / "pi_sweep.csv", c,
              {"pi", "n1", "j", "mean_id_L", "finite_mean_id_L", "sd", "q025", "q975", "non_positive",
               "mean_id_E"});
  json points = json::array();
  for (double p : grid) {
    const std::size_t n1 = enrichment_size(c.n, p);
    const int j = level_for(c, c.n + n1, ws.moment_degree());
    ReplicateSpec spec;
    spec.n_raw = c.n;
    spec.pi = p;
    spec.tau = c.tau;
    spec.j = j;
    spec.reps = reps;
    spec.seed = c.seed;
    spec.threads = c.threads;
    const auto rows = run_replicates(f, ws, spec);
    std::vector<double> ids, ide;
    for (const auto& r : rows) {
      ids.push_back(r.id_hat_L);
      ide.push_back(r.id_hat_E);
    }
    const MeanSpread m = summarize(ids);
    const MeanSpread me = summarize(ide);
    csv.row({num(p), std::to_string(n1), std::to_string(j), num(m.mean), num(m.finite_mean), num(m.sd),
             num(m.q025), num(m.q975), std::to_string(m.infinite), num(me.mean)});
    json pt = spread_json(m);
    pt["pi"] = p;
    pt["n1"] = n1;
    pt["j"] = j;
    pt["mean_id_E"] = jnum(me.mean);
    points.push_back(pt);
    if (!c.quiet)
      std::cout << "pi=" << p << " n1=" << n1 << " mean id_L=" << num(m.mean) << " [" << num(m.q025) << ", "
                << num(m.q975) << "]\n";
  }
  write_json(fs::path(c.out) / "pi_sweep.json", json{{"points", points}}, c);
  return 0;
}

int cmd_decay(const RunConfig& c) {
  const auto ws = make_system(c);
  auto f = resolve_density(c, c.density);
  if (c.pi > 0.0) f = mixture(f, builtin(BuiltinDensity::Xi, c.tau), c.pi);
  const auto rows = decay_table(f, ws, c.j_min, c.j_max);
  CsvFile csv(fs::path(c.out) / "decay.csv", c,
              {"j", "qj_norm_2", "r_j", "delta_j", "sigma_sq", "sigma_tilde_sq", "regularity_ratio"});
  for (const auto& r : rows)
    csv.row({std::to_string(r.j), num(r.qj_norm_2), num(r.r_j), num(r.delta_j), num(r.sigma_sq),
             num(r.sigma_tilde_sq), num(r.regularity_ratio)});
  json body;
  body["density"] = f.label();
  if (rows.size() >= 2) body["slope"] = decay_slope(rows);
  write_json(fs::path(c.out) / "decay.json", body, c);
  if (!c.quiet) {
    for (const auto& r : rows)
      std::cout << "j=" << r.j << " norm=" << num(r.qj_norm_2) << " r_j=" << num(r.r_j)
                << " ratio=" << num(r.regularity_ratio) << '\n';
    if (rows.size() >= 2) std::cout << "slope " << num(decay_slope(rows)) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet smoothness test experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file (flags override)");

  RunConfig cfg;
  cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto common = [&](CLI::App* sub) {
    sub->add_option("--order", cfg.order, "Daubechies order N (1..20)")->capture_default_str();
    sub->add_option("--table-level", cfg.table_level, "Dyadic table level")->capture_default_str();
    sub->add_option("--out", cfg.out, "Output directory")->envname("BESOV_OUT_DIR")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker threads")->capture_default_str();
    sub->add_option("--tau", cfg.tau, "Enrichment smoothness tau")->capture_default_str();
    sub->add_flag("--quiet", cfg.quiet, "No summary on stdout");
  };
  auto sampling = [&](CLI::App* sub) {
    sub->add_option("--density", cfg.density, "f0, f1, parabola, step or xi<tau>")->capture_default_str();
    sub->add_option("--density-file", cfg.density_file, "Custom density file (overrides --density)");
    sub->add_option("--n", cfg.n, "Raw sample size")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    sub->add_option("--pi", cfg.pi, "Enrichment fraction (0: none)")->capture_default_str();
    sub->add_option("--j", cfg.j, "Explicit resolution level (0: use rule)")->capture_default_str();
    sub->add_option("--resolution-rule", cfg.resolution_rule,
                    "consistency_2d1, test_2d3, quarter_log or explicit")
        ->capture_default_str();
  };
  auto testing = [&](CLI::App* sub) {
    sub->add_option("--reps", cfg.reps, "Replicates (default 200/100/50 by n)");
    sub->add_option("--mu0", cfg.mu0, "Null index bound")->capture_default_str();
    sub->add_option("--alpha", cfg.alpha, "Significance level")->capture_default_str();
    sub->add_option("--z-alpha", cfg.z_alpha, "Override the normal quantile");
    sub->add_option("--constant-mode", cfg.constant_mode, "psi1 or v_correction");
  };

  auto* constants = app.add_subcommand("constants", "Wavelet constants and xi normalizer");
  common(constants);
  auto* estimate = app.add_subcommand("estimate", "Energy estimates for one sample");
  common(estimate);
  sampling(estimate);
  estimate->add_option("--save-sample", cfg.save_sample, "Write the (enriched) sample to this file");
  auto* test = app.add_subcommand("test", "Size and power of the smoothness test");
  common(test);
  sampling(test);
  test->get_option("--pi")->description("Enrichment fraction (0: use 0.5; the test needs 0 < pi < 1)");
  testing(test);
  test->add_option("--null-density", cfg.null_density, "Density under H0")->capture_default_str();
  test->add_option("--alt-density", cfg.alt_density, "Density under H1")->capture_default_str();
  auto* replicate = app.add_subcommand("replicate", "Replicated index estimates");
  common(replicate);
  sampling(replicate);
  testing(replicate);
  auto* sweep = app.add_subcommand("pi-sweep", "Index estimates across enrichment fractions");
  common(sweep);
  sampling(sweep);
  testing(sweep);
  sweep->add_option("--pi-grid", cfg.pi_grid, "Comma separated values in (0, 1)")->capture_default_str();
  auto* decay = app.add_subcommand("decay", "Oracle decay table over j");
  common(decay);
  decay->add_option("--density", cfg.density, "Density name")->capture_default_str();
  decay->add_option("--density-file", cfg.density_file, "Custom density file");
  decay->add_option("--pi", cfg.pi, "Mix with xi_tau at this fraction")->capture_default_str();
  decay->add_option("--j-min", cfg.j_min)->capture_default_str();
  decay->add_option("--j-max", cfg.j_max)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    if (!cfg.density_file.empty()) cfg.density = load_density(cfg.density_file).label();
    fs::create_directories(cfg.out);
    if (cfg.command == "constants") return cmd_constants(cfg);
    if (cfg.command == "estimate") return cmd_estimate(cfg);
    if (cfg.command == "test") return cmd_test(cfg);
    if (cfg.command == "replicate") return cmd_replicate(cfg);
    if (cfg.command == "pi-sweep") return cmd_pi_sweep(cfg);
    if (cfg.command == "decay") return cmd_decay(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DegenerateError& e) {
    std::cerr << "degenerate: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
