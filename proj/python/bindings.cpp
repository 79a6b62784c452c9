#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "bgfit/bayes.hpp"
#include "bgfit/errors.hpp"
#include "bgfit/estimate.hpp"
#include "bgfit/model.hpp"
#include "bgfit/sampling.hpp"
#include "bgfit/simstudy.hpp"

namespace py = pybind11;
using namespace bgfit;

namespace {

py::dict interval(const Interval& i) { return py::dict(py::arg("lo") = i.lo, py::arg("hi") = i.hi); }

py::dict fit_dict(const FitResult& f) {
  py::dict d;
  d["method"] = std::string(to_string(f.method));
  d["alpha"] = f.alpha_hat;
  d["beta"] = f.beta_hat;
  d["theta"] = f.theta_hat;
  d["theta_se"] = f.theta_se;
  d["gamma"] = f.gamma;
  d["covariance"] = py::make_tuple(py::make_tuple(f.covariance.a11, f.covariance.a12),
                                   py::make_tuple(f.covariance.a21, f.covariance.a22));
  d["ci_alpha"] = interval(f.ci_alpha);
  d["ci_beta"] = interval(f.ci_beta);
  d["ci_theta"] = interval(f.ci_theta);
  d["converged"] = f.diagnostics.converged;
  d["iterations"] = f.diagnostics.iterations;
  d["score_norm"] = f.diagnostics.score_norm;
  return d;
}

WaitSample make_sample(const std::optional<std::vector<Delay>>& delays, std::optional<std::int64_t> n,
                       std::optional<std::int64_t> sum_x) {
  if (delays) {
    if (n || sum_x) throw DomainError("give either delays or (n, sum_x), not both");
    return WaitSample::from_delays(*delays);
  }
  if (!n || !sum_x) throw DomainError("need delays or both n and sum_x");
  return WaitSample::from_summary(*n, *sum_x);
}

}  // namespace

PYBIND11_MODULE(_bgfit, m) {
  auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<MomentNotExistError>(m, "MomentNotExistError", error.ptr());
  py::register_exception<MissingMomentsError>(m, "MissingMomentsError", error.ptr());
  py::register_exception<InvalidMomentRegionError>(m, "InvalidMomentRegionError", error.ptr());
  py::register_exception<DegenerateDataError>(m, "DegenerateDataError", error.ptr());
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

  m.attr("DEFAULT_SEED") = kDefaultSeed;

  py::class_<BetaGeometricLaw>(m, "BetaGeometric")
      .def(py::init<double, double>(), py::arg("alpha"), py::arg("beta"))
      .def_property_readonly("alpha", &BetaGeometricLaw::alpha)
      .def_property_readonly("beta", &BetaGeometricLaw::beta)
      .def_property_readonly("mean_fecundability", &BetaGeometricLaw::mean_fecundability)
      .def("mean_delay", &BetaGeometricLaw::mean_delay)
      .def("log_pmf", [](const BetaGeometricLaw& l, Delay x) { return bg_log_pmf(l, x); }, py::arg("x"))
      .def("cdf", [](const BetaGeometricLaw& l, Delay x) { return bg_cdf(l, x).probability; }, py::arg("x"))
      .def("log_survival", [](const BetaGeometricLaw& l, Delay x) { return bg_log_survival(l, x); }, py::arg("x"))
      .def("second_moment", [](const BetaGeometricLaw& l) { return bg_moments(l).second_raw_moment(); })
      .def("wg", [](const BetaGeometricLaw& l) {
        const auto w = to_wg(l);
        return py::make_tuple(w.pi, w.shape);
      })
      .def_static("from_wg", [](double pi, double shape) { return from_wg({pi, shape}); }, py::arg("pi"),
                  py::arg("shape"))
      .def("__repr__", [](const BetaGeometricLaw& l) {
        return "BetaGeometric(alpha=" + std::to_string(l.alpha()) + ", beta=" + std::to_string(l.beta()) + ")";
      });

  m.def(
      "sample",
      [](double alpha, double beta, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
        return sample_bg({alpha, beta}, {seed, stream}, n);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("n"), py::arg("seed") = kDefaultSeed, py::arg("stream") = 0);

  m.def(
      "fit_mme",
      [](const std::optional<std::vector<Delay>>& delays, std::optional<std::int64_t> n,
         std::optional<std::int64_t> sum_x, double gamma, int bootstrap, std::uint64_t seed) {
        return fit_dict(fit_mme(make_sample(delays, n, sum_x), MmeOptions{gamma, bootstrap, {seed, 0}}));
      },
      py::arg("delays") = py::none(), py::kw_only(), py::arg("n") = py::none(), py::arg("sum_x") = py::none(),
      py::arg("gamma") = 0.05, py::arg("bootstrap") = 500, py::arg("seed") = kDefaultSeed);

  m.def(
      "fit_mle",
      [](const std::vector<Delay>& delays, double gamma) {
        MleOptions opt;
        opt.gamma = gamma;
        return fit_dict(fit_mle(WaitSample::from_delays(delays), opt));
      },
      py::arg("delays"), py::kw_only(), py::arg("gamma") = 0.05);

  m.def(
      "posterior",
      [](double mu, double nu, const std::optional<std::vector<Delay>>& delays, std::optional<std::int64_t> n,
         std::optional<std::int64_t> sum_x, double gamma) {
        const auto p = posterior(BetaPrior(mu, nu), make_sample(delays, n, sum_x), gamma);
        py::dict d;
        d["a_post"] = p.a_post;
        d["b_post"] = p.b_post;
        d["mean"] = p.mean;
        d["credible_interval"] = interval(p.credible_interval);
        return d;
      },
      py::arg("mu"), py::arg("nu"), py::arg("delays") = py::none(), py::kw_only(), py::arg("n") = py::none(),
      py::arg("sum_x") = py::none(), py::arg("gamma") = 0.05);

  // Runs a study from a JSON configuration and returns the tables as JSON text.
  m.def(
      "run_study_json",
      [](const std::string& config_json) {
        const auto config = parse_study_config(config_json);
        StudyTable table = [&] {
          py::gil_scoped_release release;
          return run_study(config);
        }();
        return emit_tables(table, TableFormat::kJson);
      },
      py::arg("config_json") = "{}");
}
