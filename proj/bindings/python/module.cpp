#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "curesurv/cure_nonparametric.hpp"
#include "curesurv/data_model.hpp"
#include "curesurv/error.hpp"
#include "curesurv/hypothesis_tests.hpp"
#include "curesurv/mixture_parametric.hpp"
#include "curesurv/simulation.hpp"
#include "curesurv/survival.hpp"

namespace py = pybind11;
using namespace curesurv;

namespace {

SurvivalSample make_sample(std::vector<double> times, std::vector<int> deltas,
                           const std::map<std::string, std::vector<double>>& covariates,
                           const std::vector<std::string>& binary) {
  CovariateMap map;
  for (const auto& [name, values] : covariates) {
    const bool is_binary = std::find(binary.begin(), binary.end(), name) != binary.end();
    map.emplace(name, Covariate{values, is_binary ? CovariateKind::binary : CovariateKind::continuous});
  }
  return SurvivalSample(std::move(times), std::move(deltas), std::move(map));
}

py::dict curve_dict(const StepCurve& c) {
  py::dict d;
  d["t"] = c.jump_times;
  d["s"] = c.values;
  return d;
}

py::dict cure_dict(const CureEstimate& e) {
  py::dict d;
  d["cure_prob"] = e.cure_prob;
  d["x"] = e.at_x;
  d["bandwidth"] = e.bandwidth_used ? py::cast(e.bandwidth_used->value()) : py::none();
  d["last_uncensored_time"] = e.last_uncensored_time;
  return d;
}

py::dict report_dict(const TestReport& r) {
  py::dict d;
  d["statistic"] = r.statistic;
  d["p_value"] = r.p_value;
  d["method"] = std::string(method_name(r.method));
  d["calibration"] = std::string(calibration_name(r.calibration));
  d["n_permutations"] = r.n_permutations;
  d["seed"] = r.seed;
  d["warning"] = r.warning;
  d["details"] = r.details;
  return d;
}

std::optional<Stratum> stratum_from(const std::optional<std::pair<std::string, double>>& s) {
  if (!s) return std::nullopt;
  return Stratum{s->first, s->second};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Right-censored survival estimators and mixture cure models";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  auto numeric = py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<EmptyNeighborhoodError>(m, "EmptyNeighborhoodError", numeric.ptr());

  py::class_<SurvivalSample>(m, "SurvivalSample")
      .def(py::init(&make_sample), py::arg("times"), py::arg("deltas"),
           py::arg("covariates") = std::map<std::string, std::vector<double>>{},
           py::arg("binary") = std::vector<std::string>{})
      .def("__len__", &SurvivalSample::size)
      .def_property_readonly("times", [](const SurvivalSample& s) {
        return std::vector<double>(s.times().begin(), s.times().end());
      })
      .def_property_readonly("deltas", [](const SurvivalSample& s) {
        return std::vector<int>(s.deltas().begin(), s.deltas().end());
      })
      .def("covariate", [](const SurvivalSample& s, const std::string& name) { return s.covariate(name).values; })
      .def_property_readonly("covariate_names", [](const SurvivalSample& s) {
        std::vector<std::string> names;
        for (const auto& [name, column] : s.covariates()) names.push_back(name);
        return names;
      });

  m.def("load_sample_csv", &load_sample_csv, py::arg("path"));

  m.def("km_fit", [](const SurvivalSample& s) { return curve_dict(km_fit(s)); }, py::arg("sample"));
  m.def(
      "beran_fit",
      [](const SurvivalSample& s, const std::string& covariate, double x, double h, const std::string& kernel,
         const std::optional<std::pair<std::string, double>>& stratum) {
        return curve_dict(beran_fit(s, covariate, x, parse_kernel(kernel), Bandwidth(h), stratum_from(stratum)));
      },
      py::arg("sample"), py::arg("covariate"), py::arg("x"), py::arg("h"), py::arg("kernel") = "epanechnikov",
      py::arg("stratum") = py::none());

  m.def("cure_rate", [](const SurvivalSample& s) { return cure_dict(cure_rate_unconditional(s)); }, py::arg("sample"));
  m.def(
      "cure_rate_conditional",
      [](const SurvivalSample& s, const std::string& covariate, double x, double h, const std::string& kernel,
         const std::optional<std::pair<std::string, double>>& stratum) {
        return cure_dict(
            cure_rate_conditional(s, covariate, x, parse_kernel(kernel), Bandwidth(h), stratum_from(stratum)));
      },
      py::arg("sample"), py::arg("covariate"), py::arg("x"), py::arg("h"), py::arg("kernel") = "epanechnikov",
      py::arg("stratum") = py::none());
  m.def(
      "latency",
      [](const SurvivalSample& s, const std::string& covariate, double x, double h, const std::string& kernel) {
        const auto lat = latency_estimate(s, covariate, x, parse_kernel(kernel), Bandwidth(h));
        py::dict d = curve_dict(lat.base);
        d["cure_prob"] = lat.incidence_used.cure_prob;
        return d;
      },
      py::arg("sample"), py::arg("covariate"), py::arg("x"), py::arg("h"), py::arg("kernel") = "epanechnikov");
  m.def(
      "select_bandwidth",
      [](const SurvivalSample& s, const std::string& covariate, std::optional<std::vector<double>> xs,
         std::size_t resamples, std::uint64_t seed, std::size_t grid_size) {
        const auto& values = s.covariate(covariate).values;
        const auto points = xs ? *xs : default_eval_points(values);
        BootstrapOptions opt;
        opt.resamples = resamples;
        opt.seed = seed;
        const auto sel = bootstrap_bandwidth(s, covariate, points, default_bandwidth_grid(values, grid_size), opt);
        py::list out;
        for (const auto& p : sel.points) {
          py::dict d;
          d["x"] = p.x;
          d["h"] = p.selected.value();
          d["criterion"] = p.criterion;
          out.append(d);
        }
        return out;
      },
      py::arg("sample"), py::arg("covariate"), py::arg("x") = py::none(), py::arg("resamples") = 100,
      py::arg("seed"), py::arg("grid_size") = 15);

  m.def("mz_test", [](const SurvivalSample& s) { return report_dict(maller_zhou_test(s)); }, py::arg("sample"));
  m.def(
      "cov_test",
      [](const SurvivalSample& s, const std::string& covariate, std::size_t permutations, std::uint64_t seed) {
        return report_dict(covariate_cure_test(s, covariate, permutations, seed));
      },
      py::arg("sample"), py::arg("covariate"), py::arg("permutations") = 999, py::arg("seed"));

  m.def("link_eval", [](const std::string& link, double eta) { return link_eval(parse_link(link), eta); },
        py::arg("link"), py::arg("eta"));
  m.def(
      "fit",
      [](const SurvivalSample& s, const std::string& link, std::vector<std::string> incidence,
         std::vector<std::string> latency, bool susceptible_only, std::size_t starts, std::uint64_t seed) {
        MixtureModel model;
        model.link = parse_link(link);
        model.incidence_covariates = std::move(incidence);
        model.latency_covariates = std::move(latency);
        model.susceptible_only = susceptible_only;
        FitOptions options;
        options.n_starts = starts;
        options.seed = seed;
        const auto fit = fit_mle(s, model, options);
        py::dict d;
        d["incidence"] = fit.params.incidence;
        d["latency_intercept"] = fit.params.latency_intercept;
        d["latency_coefs"] = fit.params.latency_coefs;
        d["shape_k"] = fit.params.shape_k;
        d["log_likelihood"] = fit.log_likelihood;
        d["converged"] = fit.converged;
        d["iterations"] = fit.n_iterations;
        return d;
      },
      py::arg("sample"), py::arg("link") = "logit", py::arg("incidence") = std::vector<std::string>{},
      py::arg("latency") = std::vector<std::string>{}, py::arg("susceptible_only") = false, py::arg("starts") = 5,
      py::arg("seed"));

  m.def(
      "simulate",
      [](std::size_t n, std::uint64_t seed, const std::string& link, double incidence_intercept,
         std::map<std::string, double> incidence_coefs, std::optional<double> incidence_fixed, double latency_intercept,
         std::map<std::string, double> latency_coefs, double shape, const std::string& censoring,
         double censoring_parameter) {
        SimulationSpec spec;
        spec.n = n;
        spec.seed = seed;
        spec.incidence.link = parse_link(link);
        spec.incidence.intercept = incidence_intercept;
        spec.incidence.coefs = std::move(incidence_coefs);
        spec.incidence.fixed = incidence_fixed;
        spec.latency.gamma0 = latency_intercept;
        spec.latency.coefs = std::move(latency_coefs);
        spec.latency.shape_k = shape;
        using Kind = SimulationSpec::Censoring::Kind;
        if (censoring == "exponential") {
          spec.censoring.kind = Kind::exponential;
        } else if (censoring == "uniform") {
          spec.censoring.kind = Kind::uniform;
        } else if (censoring == "none") {
          spec.censoring.kind = Kind::none;
        } else {
          throw DataError("unknown censoring law '" + censoring + "'");
        }
        spec.censoring.parameter = censoring_parameter;
        return simulate(spec).sample;
      },
      py::arg("n"), py::arg("seed"), py::arg("link") = "logit", py::arg("incidence_intercept") = 0.0,
      py::arg("incidence_coefs") = std::map<std::string, double>{}, py::arg("incidence_fixed") = py::none(),
      py::arg("latency_intercept") = 0.0, py::arg("latency_coefs") = std::map<std::string, double>{},
      py::arg("shape") = 1.0, py::arg("censoring") = "exponential", py::arg("censoring_parameter") = 1.0);

  m.def("jitter", &jitter_times, py::arg("sample"), py::arg("seed"));
}
