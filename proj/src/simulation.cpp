#include "curesurv/simulation.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "curesurv/error.hpp"
#include "curesurv/format.hpp"
#include "curesurv/rng.hpp"

namespace curesurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double predictor(double intercept, const std::map<std::string, double>& coefs,
                 const std::map<std::string, double>& covariates) {
  double eta = intercept;
  for (const auto& [name, coef] : coefs) {
    auto it = covariates.find(name);
    if (it == covariates.end()) throw DataError("simulation uses unknown covariate '" + name + "'");
    eta += coef * it->second;
  }
  return eta;
}

}  // namespace

void validate(const SimulationSpec& spec) {
  if (spec.n == 0) throw DataError("simulation needs n >= 1");
  if (!(spec.age_lo <= spec.age_hi)) throw DataError("age range is empty");
  if (!(spec.sex_prob >= 0.0 && spec.sex_prob <= 1.0)) throw DataError("sex probability outside [0, 1]");
  if (spec.incidence.fixed && !(*spec.incidence.fixed >= 0.0 && *spec.incidence.fixed <= 1.0)) {
    throw DataError("fixed incidence outside [0, 1]");
  }
  if (!(spec.latency.shape_k > 0.0)) throw DataError("Weibull shape must be positive");
  using Kind = SimulationSpec::Censoring::Kind;
  switch (spec.censoring.kind) {
    case Kind::exponential:
    case Kind::uniform:
      if (!(spec.censoring.parameter > 0.0) || !std::isfinite(spec.censoring.parameter)) {
        throw DataError("censoring parameter must be positive");
      }
      break;
    case Kind::none:
      if (!spec.incidence.fixed || *spec.incidence.fixed != 1.0) {
        throw DataError("simulating without censoring requires incidence fixed at 1");
      }
      break;
  }
  for (const auto& coefs : {spec.incidence.coefs, spec.latency.coefs}) {
    for (const auto& [name, coef] : coefs) {
      if (name != "age" && name != "sex") throw DataError("simulation covariates are 'age' and 'sex'");
    }
  }
}

double true_incidence(const SimulationSpec& spec, const std::map<std::string, double>& covariates) {
  if (spec.incidence.fixed) return *spec.incidence.fixed;
  return link_eval(spec.incidence.link, predictor(spec.incidence.intercept, spec.incidence.coefs, covariates));
}

double true_latency_survival(const SimulationSpec& spec, double t,
                             const std::map<std::string, double>& covariates) {
  if (t < 0.0) throw DataError("time must be non-negative");
  const double lambda = std::exp(predictor(spec.latency.gamma0, spec.latency.coefs, covariates));
  return std::exp(-std::pow(t / lambda, spec.latency.shape_k));
}

double true_population_survival(const SimulationSpec& spec, double t,
                                const std::map<std::string, double>& covariates) {
  const double p = true_incidence(spec, covariates);
  return 1.0 - p + p * true_latency_survival(spec, t, covariates);
}

SimulationResult simulate(const SimulationSpec& spec) {
  validate(spec);
  using Kind = SimulationSpec::Censoring::Kind;
  std::vector<double> times;
  std::vector<int> deltas;
  Covariate age{{}, CovariateKind::continuous};
  Covariate sex{{}, CovariateKind::binary};
  std::vector<TruthRecord> truth;
  times.reserve(spec.n);
  deltas.reserve(spec.n);
  truth.reserve(spec.n);

  for (std::size_t i = 0; i < spec.n; ++i) {
    auto engine = substream(spec.seed, i);
    // Fixed draw order per subject: age, sex, B, Y, C.
    const double a = spec.age_lo + (spec.age_hi - spec.age_lo) * uniform_open01(engine);
    const double s = uniform_open01(engine) < spec.sex_prob ? 1.0 : 0.0;
    const std::map<std::string, double> x{{"age", a}, {"sex", s}};

    TruthRecord rec;
    rec.incidence = true_incidence(spec, x);
    rec.susceptible = uniform_open01(engine) < rec.incidence ? 1 : 0;
    const double u_event = uniform_open01(engine);
    if (rec.susceptible == 1) {
      const double lambda = std::exp(predictor(spec.latency.gamma0, spec.latency.coefs, x));
      rec.event_time = lambda * std::pow(-std::log(u_event), 1.0 / spec.latency.shape_k);
    } else {
      rec.event_time = kInf;
    }
    const double u_cens = uniform_open01(engine);
    switch (spec.censoring.kind) {
      case Kind::exponential: rec.censoring_time = -std::log(u_cens) / spec.censoring.parameter; break;
      case Kind::uniform: rec.censoring_time = spec.censoring.parameter * u_cens; break;
      case Kind::none: rec.censoring_time = kInf; break;
    }
    const bool event = rec.event_time <= rec.censoring_time;
    times.push_back(event ? rec.event_time : rec.censoring_time);
    deltas.push_back(event ? 1 : 0);
    age.values.push_back(a);
    sex.values.push_back(s);
    truth.push_back(rec);
  }

  CovariateMap covariates;
  covariates.emplace("age", std::move(age));
  covariates.emplace("sex", std::move(sex));
  return {SurvivalSample(std::move(times), std::move(deltas), std::move(covariates)), std::move(truth)};
}

void write_truth(std::ostream& out, const std::vector<TruthRecord>& truth) {
  auto num = [](double v) { return std::isinf(v) ? std::string("inf") : format_exact(v); };
  out << "B,Y,C,p\n";
  for (const auto& r : truth) {
    out << r.susceptible << ',' << num(r.event_time) << ',' << num(r.censoring_time) << ','
        << format_exact(r.incidence) << '\n';
  }
}

}  // namespace curesurv
