#include "besov/densities.hpp"
#include "besov/errors.hpp"
#include "besov/estimator.hpp"
#include "besov/projection.hpp"
#include "besov/smoothtest.hpp"
#include "besov/wavelet.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace besov;

namespace {

py::array_t<double> to_array(std::vector<double> v) {
  auto* heap = new std::vector<double>(std::move(v));
  py::capsule owner(heap, [](void* p) { delete static_cast<std::vector<double>*>(p); });
  const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(heap->size())};
  const std::vector<py::ssize_t> strides{static_cast<py::ssize_t>(sizeof(double))};
  return py::array_t<double>(shape, strides, heap->data(), owner);
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw ConfigError("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

template <class F>
py::array_t<double> map(const py::array_t<double, py::array::forcecast>& x, F&& f) {
  py::array_t<double> out(x.request().shape);
  const double* src = x.data();
  double* dst = out.mutable_data();
  for (py::ssize_t i = 0; i < x.size(); ++i) dst[i] = f(src[i]);
  return out;
}

py::dict constants_dict(const WaveletConstants& c) {
  py::dict d;
  d["support_len"] = c.support_len;
  d["moment_degree"] = c.moment_degree;
  d["psi0"] = c.psi0;
  d["psi1"] = c.psi1;
  d["psi2"] = c.psi2;
  d["delta1"] = c.delta1;
  d["f_psi_inf"] = c.f_psi_inf;
  d["f_psi_sup"] = c.f_psi_sup;
  d["moment_b"] = c.moment_b;
  return d;
}

py::dict terms_dict(const ThresholdTerms& t) {
  py::dict d;
  d["z_alpha"] = t.z_alpha;
  d["delta1_class"] = t.delta1_class;
  d["constant_mode"] = to_string(t.mode);
  d["k_const"] = t.k_const;
  d["psi1"] = t.psi1;
  d["v_j"] = t.v_j;
  d["f_psi_inf"] = t.f_psi_inf;
  d["xi_at_1_25"] = t.xi_at;
  d["tau"] = t.tau;
  d["pi"] = t.pi;
  d["mu0"] = t.mu0;
  d["n"] = t.n;
  d["j"] = t.j;
  d["variance_term"] = t.variance_term;
  d["bias_term"] = t.bias_term;
  d["threshold"] = t.threshold;
  return d;
}

py::dict arm_dict(const ArmSummary& a) {
  std::vector<double> l, id;
  for (const auto& o : a.outcomes) {
    l.push_back(o.l_nj);
    id.push_back(o.id_hat);
  }
  py::dict d;
  d["density"] = a.density;
  d["rejections"] = a.rejections;
  d["rejection_rate"] = a.rejection_rate;
  d["rules_agree"] = a.rules_agree;
  d["l_nj"] = to_array(std::move(l));
  d["id_hat"] = to_array(std::move(id));
  return d;
}

}  // namespace

PYBIND11_MODULE(_besov, m) {
  m.doc() = "Wavelet projection estimators and a smoothness test for densities";

  auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<AssumptionViolation>(m, "AssumptionViolation", config_error.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_ArithmeticError);

  py::class_<WaveletSystem>(m, "Wavelet")
      .def(py::init([](int order, int level) { return WaveletSystem::create(order, level); }), py::arg("order"),
           py::arg("level") = kDefaultTableLevel)
      .def_property_readonly("order", &WaveletSystem::order)
      .def_property_readonly("support", &WaveletSystem::support)
      .def_property_readonly("moment_degree", &WaveletSystem::moment_degree)
      .def_property_readonly("has_constants", &WaveletSystem::has_constants)
      .def_property_readonly("lowpass", [](const WaveletSystem& w) { return to_array(w.filter().lowpass); })
      .def("constants", [](const WaveletSystem& w) { return constants_dict(w.constants()); })
      .def(
          "psi_jk",
          [](const WaveletSystem& w, int j, long k, py::array_t<double, py::array::forcecast> x) {
            return map(x, [&](double u) { return w.psi_jk(j, k, u); });
          },
          py::arg("j"), py::arg("k"), py::arg("x"))
      .def("__repr__", [](const WaveletSystem& w) { return "<Wavelet db" + std::to_string(w.order()) + ">"; });

  py::class_<PiecewisePolyDensity>(m, "Density")
      .def_property_readonly("label", &PiecewisePolyDensity::label)
      .def_property_readonly("breakpoints", &PiecewisePolyDensity::breakpoints)
      .def_property_readonly("tau", &PiecewisePolyDensity::tau)
      .def("__call__",
           [](const PiecewisePolyDensity& f, py::array_t<double, py::array::forcecast> x) {
             return map(x, [&](double u) { return f(u); });
           })
      .def("cdf",
           [](const PiecewisePolyDensity& f, py::array_t<double, py::array::forcecast> x) {
             return map(x, [&](double u) { return f.cdf(u); });
           })
      .def("mass", &PiecewisePolyDensity::mass)
      .def("l2_norm_sq", &PiecewisePolyDensity::l2_norm_sq)
      .def("index", [](const PiecewisePolyDensity& f) { return defect_profile(f).index_m; })
      .def_static("load", [](const std::string& path) { return load_density(path); })
      .def("__repr__", [](const PiecewisePolyDensity& f) { return "<Density " + f.label() + ">"; });

  m.def("builtin", py::overload_cast<const std::string&>(&builtin), py::arg("name"),
        "f0, f1, parabola, step or xi<tau>");
  m.def("mixture", &mixture, py::arg("f"), py::arg("xi"), py::arg("pi"));

  m.def(
      "sample",
      [](const PiecewisePolyDensity& f, std::size_t n, std::uint64_t seed) {
        return to_array(sample(f, n, seed).values);
      },
      py::arg("density"), py::arg("n"), py::arg("seed"));
  m.def(
      "enrich",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> raw, const PiecewisePolyDensity& xi, double pi,
         std::uint64_t seed) {
        Sample s;
        s.values = from_array(raw);
        s.provenance.n_raw = s.values.size();
        return to_array(enrich(s, xi, pi, seed).values);
      },
      py::arg("values"), py::arg("xi"), py::arg("pi"), py::arg("seed"));

  m.def(
      "estimate_energy",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> values, const WaveletSystem& w, int j,
         int threads) {
        const auto v = from_array(values);
        EnergyEstimate e;
        {
          py::gil_scoped_release release;
          e = estimate_energy(v, w, j, threads);
        }
        py::dict d;
        d["j"] = e.j;
        d["n"] = e.n;
        d["e_nj"] = e.e_nj;
        d["l_nj"] = e.l_nj;
        d["id_hat_E"] = e.id_hat_E;
        d["id_hat_L"] = e.id_hat_L;
        return d;
      },
      py::arg("values"), py::arg("wavelet"), py::arg("j"), py::arg("threads") = 1);
  m.def("id_estimate", &id_estimate, py::arg("energy"), py::arg("j"));

  m.def(
      "coefficients",
      [](const PiecewisePolyDensity& f, const WaveletSystem& w, int j) {
        auto c = coefficients(f, w, j);
        return py::make_tuple(c.k_first, to_array(std::move(c.beta)));
      },
      py::arg("density"), py::arg("wavelet"), py::arg("j"), "(k_first, beta) of the detail coefficients");
  m.def(
      "variance_terms",
      [](const PiecewisePolyDensity& f, const WaveletSystem& w, int j) {
        const auto v = variance_terms(f, w, j, false);
        py::dict d;
        d["qj_energy"] = v.qj_energy;
        d["delta_j"] = v.delta_j;
        d["sigma_tilde_sq"] = v.sigma_tilde_sq;
        d["second_moment"] = v.second_moment;
        d["sigma_sq"] = v.sigma_sq;
        return d;
      },
      py::arg("density"), py::arg("wavelet"), py::arg("j"));

  py::class_<TestConfig>(m, "TestConfig")
      .def(py::init<>())
      .def_readwrite("mu0", &TestConfig::mu0)
      .def_readwrite("alpha", &TestConfig::alpha)
      .def_readwrite("z_alpha", &TestConfig::z_alpha)
      .def_readwrite("pi", &TestConfig::pi)
      .def_readwrite("tau", &TestConfig::tau)
      .def_readwrite("delta1_class", &TestConfig::delta1_class)
      .def_property(
          "constant_mode",
          [](const TestConfig& c) -> std::optional<std::string> {
            if (!c.constant_mode) return std::nullopt;
            return to_string(*c.constant_mode);
          },
          [](TestConfig& c, std::optional<std::string> s) {
            c.constant_mode = s ? std::optional(parse_constant_mode(*s)) : std::nullopt;
          });

  m.def(
      "threshold_terms",
      [](const TestConfig& cfg, const WaveletSystem& w, std::size_t n, int j) {
        return terms_dict(threshold_terms(cfg, w.constants(), n, j));
      },
      py::arg("config"), py::arg("wavelet"), py::arg("n"), py::arg("j"));

  m.def(
      "power_study",
      [](const PiecewisePolyDensity& f_null, const PiecewisePolyDensity& f_alt, const WaveletSystem& w,
         const TestConfig& cfg, std::size_t n, std::size_t reps, std::uint64_t seed, int threads) {
        StudySummary s;
        {
          py::gil_scoped_release release;
          s = power_study(f_null, f_alt, w, cfg, n, reps, seed, threads);
        }
        py::dict d;
        d["j"] = s.j;
        d["n_raw"] = s.n_raw;
        d["n_enriched"] = s.n_enriched;
        d["size"] = s.size;
        d["power"] = s.power;
        d["terms"] = terms_dict(s.terms);
        d["null"] = arm_dict(s.null_arm);
        d["alt"] = arm_dict(s.alt_arm);
        return d;
      },
      py::arg("f_null"), py::arg("f_alt"), py::arg("wavelet"), py::arg("config"), py::arg("n"), py::arg("reps"),
      py::arg("seed"), py::arg("threads") = 1);
}
