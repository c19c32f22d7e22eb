// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "robustlink/csi.hpp"
#include "robustlink/curves.hpp"
#include "robustlink/harness.hpp"
#include "robustlink/numerics.hpp"
#include "robustlink/rate_adapt.hpp"
#include "robustlink/scheduler.hpp"

namespace py = pybind11;
using namespace robustlink;

namespace {

numerics::SeriesConfig series(int max_terms, bool extend)
{
    numerics::SeriesConfig cfg;
    cfg.max_terms = max_terms;
    cfg.extend_truncation = extend;
    return cfg;
}

py::dict row_to_dict(const harness::MetricsRow& r)
{
    py::dict d;
    d["scheme"] = r.scheme;
    d["delay"] = r.delay;
    d["snr_db"] = r.snr_db;
    d["pf_utility"] = r.pf_utility;
    d["pf_utility_se"] = r.pf_utility_se;
    d["mean_throughput"] = r.mean_throughput;
    d["mean_throughput_se"] = r.mean_throughput_se;
    d["outage_rate"] = r.outage_rate;
    d["fulfilled_fraction"] = r.fulfilled_fraction;
    d["fulfilled_empirical"] = r.fulfilled_empirical;
    d["transmissions"] = r.transmissions;
    d["drops"] = r.drops;
    d["seed"] = r.seed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_robustlink, m)
{
    m.doc() = "Robust rate adaptation and proportional fair scheduling with imperfect CSI";

    py::register_exception<numerics::BesselOverflow>(m, "BesselOverflow", PyExc_OverflowError);
    py::register_exception<numerics::BracketError>(m, "BracketError", PyExc_ValueError);
    py::register_exception<scheduler::EnumerationLimit>(m, "EnumerationLimit", PyExc_ValueError);

    m.def("bessel_i",
          [](int order, double x, int max_terms) { return numerics::bessel_i(order, x, series(max_terms, true)); },
          py::arg("order"), py::arg("x"), py::arg("max_terms") = 150);
    m.def("log_bessel_i", &numerics::log_bessel_i, py::arg("order"), py::arg("x"));
    m.def("marcum_q1",
          [](double a, double b, int max_terms, bool extend) {
              return numerics::marcum_q1(a, b, series(max_terms, extend));
          },
          py::arg("alpha"), py::arg("beta"), py::arg("max_terms") = 150, py::arg("extend") = true);
    m.def("rician_pdf", &numerics::rician_pdf, py::arg("g"), py::arg("g_hat"), py::arg("eps"));
    m.def("rician_cdf",
          [](double b, double g_hat, double eps) { return numerics::rician_cdf(b, g_hat, eps); },
          py::arg("b"), py::arg("g_hat"), py::arg("eps"));

    py::class_<rate_adapt::RateDecision>(m, "RateDecision")
        .def_readonly("rate", &rate_adapt::RateDecision::rate)
        .def_readonly("outage", &rate_adapt::RateDecision::outage)
        .def_readonly("expected_rate", &rate_adapt::RateDecision::expected_rate)
        .def("__repr__", [](const rate_adapt::RateDecision& d) {
            return "RateDecision(rate=" + std::to_string(d.rate) + ", outage=" +
                   std::to_string(d.outage) + ")";
        });

    m.def("outage_prob",
          [](double rate, double g_hat, double eps, double power) {
              return rate_adapt::outage_prob(rate, g_hat, eps, power);
          },
          py::arg("rate"), py::arg("g_hat"), py::arg("eps"), py::arg("power"));
    m.def("robust_rate",
          [](double g_hat, double eps, double power, double p_target, double tolerance) {
              rate_adapt::RobustOptions opts;
              opts.tolerance = tolerance;
              return rate_adapt::robust_rate(g_hat, eps, power, p_target, opts);
          },
          py::arg("g_hat"), py::arg("eps"), py::arg("power"), py::arg("p_target"),
          py::arg("tolerance") = 1e-4);
    m.def("nonrobust_rate",
          [](double g_hat, double power, double backoff, double eps) {
              return rate_adapt::nonrobust_rate(g_hat, power, backoff, eps);
          },
          py::arg("g_hat"), py::arg("power"), py::arg("backoff") = 1.0, py::arg("eps") = 0.0);

    py::class_<rate_adapt::RateLut>(m, "RateLut")
        .def_readonly("amplitudes", &rate_adapt::RateLut::amplitudes)
        .def_readonly("rates", &rate_adapt::RateLut::rates)
        .def_readonly("eps", &rate_adapt::RateLut::eps)
        .def_readonly("power", &rate_adapt::RateLut::power)
        .def_readonly("p_target", &rate_adapt::RateLut::p_target)
        .def("lookup", [](const rate_adapt::RateLut& lut, double g) { return rate_adapt::lut_rate(lut, g); },
             py::arg("g_hat"));
    m.def("build_lut",
          [](double eps, double power, double p_target, double mean_gain, int points) {
              const auto grid = rate_adapt::default_lut_grid(mean_gain, points);
              return rate_adapt::build_lut(grid, eps, power, mean_gain, p_target);
          },
          py::arg("eps"), py::arg("power"), py::arg("p_target"), py::arg("mean_gain") = 1.0,
          py::arg("points") = 512);

    m.def("error_variance",
          [](int delay, double power, double mean_gain, double coherence_slots, int window,
             int pilots, std::optional<int> feedback_bits) {
              csi::CsiConfig cfg;
              cfg.delay = delay;
              cfg.window = window;
              cfg.pilots = pilots;
              cfg.feedback_bits = feedback_bits;
              cfg.link.power = power;
              cfg.link.mean_gain = mean_gain;
              cfg.link.coherence_slots = coherence_slots;
              return csi::error_variance(cfg);
          },
          py::arg("delay"), py::arg("power"), py::arg("mean_gain") = 1.0,
          py::arg("coherence_slots") = 10.0, py::arg("window") = 4, py::arg("pilots") = 8,
          py::arg("feedback_bits") = py::none());

    m.def("expected_inverse_throughput",
          [](const std::vector<std::pair<double, double>>& pending, double known_sum) {
              std::vector<scheduler::PendingTx> txs;
              for (const auto& [rate, prob] : pending) {
                  txs.push_back({0, rate, prob, false});
              }
              return scheduler::expected_inverse_throughput(txs, known_sum);
          },
          py::arg("pending"), py::arg("known_sum"),
          "pending: list of (rate, success probability) pairs");
    m.def("select_user",
          [](const std::vector<double>& metrics) { return scheduler::select_user(metrics); },
          py::arg("metrics"));

    m.def("default_config", [] { return harness::config_to_json(harness::SimConfig{}); },
          "Default simulation config as a JSON string");
    m.def("run_experiment",
          [](const std::string& config_json) {
              const auto cfg = harness::config_from_json(config_json);
              harness::ExperimentResult result;
              {
                  py::gil_scoped_release release;
                  result = harness::run_experiment(cfg);
              }
              py::list rows;
              for (const auto& r : result.rows) {
                  rows.append(row_to_dict(r));
              }
              return rows;
          },
          py::arg("config_json"), "Runs a drop simulation; returns one dict per metrics row");
    m.def("uncertainty_curve",
          [](const std::vector<double>& snr_db, const std::vector<int>& delays, int window) {
              curves::UncertaintySpec spec;
              spec.snr_db = snr_db;
              spec.delays = delays;
              spec.window = window;
              std::vector<std::tuple<double, int, double>> out;
              for (const auto& p : curves::uncertainty_curve(spec)) {
                  out.emplace_back(p.snr_db, p.delay, p.eps);
              }
              return out;
          },
          py::arg("snr_db"), py::arg("delays"), py::arg("window") = 4);
}
