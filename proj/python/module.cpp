#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmimo/analysis.hpp"
#include "qmimo/channel.hpp"
#include "qmimo/montecarlo.hpp"
#include "qmimo/precoding.hpp"
#include "qmimo/quantization.hpp"
#include "qmimo/rng.hpp"

namespace py = pybind11;
using namespace qmimo;

namespace {

// Bits are given as an int, or None / "inf" for an ideal converter.
Resolution to_resolution(const py::object& obj) {
  if (obj.is_none()) return Resolution::ideal();
  if (py::isinstance<py::str>(obj)) return Resolution::parse(obj.cast<std::string>());
  return Resolution::bits(obj.cast<int>());
}

py::object from_resolution(Resolution r) {
  if (r.is_ideal()) return py::none();
  return py::int_(r.bits());
}

OperatingPoint make_op(double beta, double snr, const py::object& dac,
                       const py::object& adc) {
  return {beta, snr, to_resolution(dac), to_resolution(adc)};
}

SystemConfig make_cfg(int n, int m, double snr, const py::object& dac,
                      const py::object& adc, double power) {
  auto cfg = SystemConfig::with_snr(n, m, snr, to_resolution(dac),
                                    to_resolution(adc), power);
  cfg.validate();
  return cfg;
}

SimOptions make_opts(int n_trials, int symbols, const std::string& mode,
                     std::uint64_t seed, int workers) {
  SimOptions o;
  o.n_trials = n_trials;
  o.symbols_per_trial = symbols;
  o.mode = parse_sim_mode(mode);
  o.master_seed = seed;
  o.workers = workers;
  return o;
}

py::dict estimate_dict(const SimEstimate& e) {
  py::dict d;
  d["mean_rate"] = e.mean_rate;
  d["standard_error"] = e.standard_error;
  d["n_trials"] = e.n_trials;
  d["mode"] = std::string(to_string(e.mode));
  return d;
}

}  // namespace

PYBIND11_MODULE(_qmimo, m) {
  m.doc() = "Quantized massive-MIMO downlink analysis";

  py::register_exception<SingularChannel>(m, "SingularChannel");
  py::register_exception<ZeroPowerInput>(m, "ZeroPowerInput");
  py::register_exception<InfeasibleBudget>(m, "InfeasibleBudget");
  py::register_exception<SimulationError>(m, "SimulationError");
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<QuantizerCodebook>(m, "QuantizerCodebook")
      .def_readonly("bits", &QuantizerCodebook::bits)
      .def_readonly("thresholds", &QuantizerCodebook::thresholds)
      .def_readonly("levels", &QuantizerCodebook::levels)
      .def_readonly("rho", &QuantizerCodebook::rho)
      .def("quantize", &QuantizerCodebook::quantize)
      .def("to_text", &QuantizerCodebook::to_text)
      .def_static("from_text", [](const std::string& t) {
        return QuantizerCodebook::from_text(t);
      })
      .def("__repr__", [](const QuantizerCodebook& cb) {
        return "<QuantizerCodebook bits=" + std::to_string(cb.bits) +
               " rho=" + std::to_string(cb.rho) + ">";
      });

  m.def("design_lloyd_max", &design_lloyd_max, py::arg("bits"));
  m.def("distortion_factor",
        [](const py::object& b) { return distortion_factor(to_resolution(b)); },
        py::arg("bits"));
  m.def("distortion_factor_approx", &distortion_factor_approx, py::arg("bits"));
  m.def("distortion_table", [] {
    return std::vector<double>(std::begin(kDistortionTable), std::end(kDistortionTable));
  });
  m.def(
      "apply_dac",
      [](const CVector& x, const py::object& b) { return apply_dac(x, to_resolution(b)); },
      py::arg("x"), py::arg("bits"));
  m.def(
      "apply_adc",
      [](const CVector& y, const py::object& b) { return apply_adc(y, to_resolution(b)); },
      py::arg("y"), py::arg("bits"));

  m.def(
      "asymptotic_siqnr",
      [](double beta, double snr, const py::object& dac, const py::object& adc) {
        return asymptotic_siqnr(make_op(beta, snr, dac, adc));
      },
      py::arg("beta"), py::arg("snr"), py::arg("dac") = py::none(),
      py::arg("adc") = py::none());
  m.def(
      "asymptotic_rate",
      [](double beta, double snr, const py::object& dac, const py::object& adc) {
        return asymptotic_rate(make_op(beta, snr, dac, adc));
      },
      py::arg("beta"), py::arg("snr"), py::arg("dac") = py::none(),
      py::arg("adc") = py::none());
  m.def(
      "benchmark_rates",
      [](double beta, double snr, const py::object& dac, const py::object& adc) {
        const auto r = benchmark_rates(make_op(beta, snr, dac, adc));
        py::dict d;
        d["siqnr"] = r.siqnr;
        d["rate"] = r.rate;
        d["rate_ideal_dac"] = r.rate_ideal_dac;
        d["rate_ideal_adc"] = r.rate_ideal_adc;
        d["rate_ideal"] = r.rate_ideal;
        d["alpha_ad"] = r.alpha_ad;
        d["alpha_da"] = r.alpha_da;
        d["nominal_snr"] = r.nominal_snr;
        return d;
      },
      py::arg("beta"), py::arg("snr"), py::arg("dac"), py::arg("adc"));
  m.def(
      "rate_loss_dac",
      [](double beta, double snr, const py::object& dac, const py::object& adc) {
        return rate_loss_dac(make_op(beta, snr, dac, adc));
      },
      py::arg("beta"), py::arg("snr"), py::arg("dac"), py::arg("adc"));
  m.def(
      "low_snr_loss_slope",
      [](double beta, const py::object& dac, const py::object& adc) {
        return low_snr_loss_slope(make_op(beta, 1.0, dac, adc));
      },
      py::arg("beta"), py::arg("dac"), py::arg("adc"));
  m.def(
      "high_snr_loss_dac",
      [](const py::object& dac, const py::object& adc, double beta) {
        return high_snr_loss_dac(to_resolution(dac), to_resolution(adc), beta);
      },
      py::arg("dac"), py::arg("adc"), py::arg("beta"));
  m.def(
      "plan_dac_bits",
      [](int adc_bits, double loss, double beta) {
        const auto p = plan_dac_bits({adc_bits, loss, beta});
        py::dict d;
        d["bits"] = p.bits;
        d["bits_approx_a"] = p.bits_approx_a;
        d["bits_approx_b"] = p.bits_approx_b;
        d["continuous_bits"] = p.continuous_bits;
        d["loss_high_resolution"] = p.loss_high_resolution;
        d["loss_table"] = p.loss_table;
        return d;
      },
      py::arg("adc_bits"), py::arg("loss"), py::arg("beta"));
  m.def(
      "plan_adc_bits",
      [](int dac_bits, double loss, double beta) {
        return plan_adc_bits({dac_bits, loss, beta});
      },
      py::arg("dac_bits"), py::arg("loss"), py::arg("beta"));
  m.def(
      "rate_grid",
      [](double beta, double snr, const std::vector<py::object>& dac,
         const std::vector<py::object>& adc) {
        std::vector<Resolution> d, a;
        for (const auto& o : dac) d.push_back(to_resolution(o));
        for (const auto& o : adc) a.push_back(to_resolution(o));
        return rate_grid(make_op(beta, snr, py::none(), py::none()), d, a);
      },
      py::arg("beta"), py::arg("snr"), py::arg("dac"), py::arg("adc"));

  m.def(
      "generate_channel",
      [](int n, int mm, std::uint64_t seed) {
        SystemConfig cfg;
        cfg.n_antennas = n;
        cfg.n_users = mm;
        cfg.validate();
        RngStream rng(seed);
        return generate_channel(cfg, rng).h;
      },
      py::arg("n_antennas"), py::arg("n_users"), py::arg("seed"));
  m.def(
      "zf_precoder",
      [](const CMatrix& h, double power) { return zf_precoder({h}, power).p; },
      py::arg("h"), py::arg("power") = 1.0);
  m.def(
      "wishart_trace", [](const CMatrix& h) { return wishart_trace({h}); },
      py::arg("h"));
  m.def(
      "per_term_breakdown",
      [](const CMatrix& h, double power, double rho_da, double rho_ad,
         double noise_power) {
        const ChannelRealization ch{h};
        const auto terms =
            per_term_breakdown(ch, zf_precoder(ch, power), rho_da, rho_ad, noise_power);
        Eigen::MatrixXd out(static_cast<Eigen::Index>(terms.size()), 6);
        for (std::size_t k = 0; k < terms.size(); ++k) {
          const auto& t = terms[k];
          out.row(static_cast<Eigen::Index>(k)) << t.signal, t.interference,
              t.dac_noise, t.adc_noise, t.thermal_noise, t.siqnr();
        }
        return out;
      },
      py::arg("h"), py::arg("power"), py::arg("rho_da"), py::arg("rho_ad"),
      py::arg("noise_power"),
      "Rows are users; columns signal, interference, dac_noise, adc_noise, "
      "thermal_noise, siqnr.");

  m.def(
      "estimate_rate",
      [](int n, int mm, double snr, const py::object& dac, const py::object& adc,
         int n_trials, int symbols, const std::string& mode, std::uint64_t seed,
         int workers) {
        const auto cfg = make_cfg(n, mm, snr, dac, adc, 1.0);
        const auto opts = make_opts(n_trials, symbols, mode, seed, workers);
        py::gil_scoped_release release;
        const auto est = estimate_rate(cfg, opts);
        py::gil_scoped_acquire acquire;
        return estimate_dict(est);
      },
      py::arg("n_antennas"), py::arg("n_users"), py::arg("snr"),
      py::arg("dac") = py::none(), py::arg("adc") = py::none(),
      py::arg("n_trials") = 500, py::arg("symbols_per_trial") = 2000,
      py::arg("mode") = "true-quantizer", py::arg("seed") = 1, py::arg("workers") = 1);
  m.def(
      "estimate_rate_curve",
      [](int n, int mm, const std::vector<double>& snrs, const py::object& dac,
         const py::object& adc, int n_trials, int symbols, const std::string& mode,
         std::uint64_t seed, int workers) {
        const auto cfg = make_cfg(n, mm, 1.0, dac, adc, 1.0);
        const auto opts = make_opts(n_trials, symbols, mode, seed, workers);
        std::vector<SimEstimate> est;
        {
          py::gil_scoped_release release;
          est = estimate_rate_curve(cfg, snrs, opts);
        }
        py::list out;
        for (const auto& e : est) out.append(estimate_dict(e));
        return out;
      },
      py::arg("n_antennas"), py::arg("n_users"), py::arg("snrs"),
      py::arg("dac") = py::none(), py::arg("adc") = py::none(),
      py::arg("n_trials") = 500, py::arg("symbols_per_trial") = 2000,
      py::arg("mode") = "true-quantizer", py::arg("seed") = 1, py::arg("workers") = 1);

  m.def("db_to_linear", &db_to_linear);
  m.def("linear_to_db", &linear_to_db);
  m.def(
      "parse_bits",
      [](const std::string& text) { return from_resolution(Resolution::parse(text)); },
      py::arg("text"));
}
