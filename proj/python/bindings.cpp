#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mfc/config.hpp"
#include "mfc/error.hpp"
#include "mfc/linalg.hpp"
#include "mfc/sim.hpp"

namespace py = pybind11;

namespace {

py::array_t<double> column(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<double> block(const std::vector<mfc::Vector>& rows) {
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  py::array_t<double> out({static_cast<py::ssize_t>(rows.size()), static_cast<py::ssize_t>(n)});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) view(i, j) = rows[i][j];
  }
  return out;
}

py::dict to_dict(const mfc::SimResult& r) {
  const mfc::SimSeries& s = r.series;
  py::dict series;
  series["t"] = column(s.t);
  series["e"] = column(s.e);
  series["y"] = column(s.y);
  series["y_d"] = column(s.y_d);
  series["u"] = column(s.u);
  series["V"] = column(s.V);
  series["w"] = column(s.w);
  series["Gamma"] = column(s.gamma);
  series["x"] = block(s.x);
  series["xistar"] = block(s.xi_star);
  series["xin"] = block(s.xi_n);

  py::dict summary;
  summary["final_window_max_error"] = r.summary.final_window_max_error;
  summary["final_window_max_w"] = r.summary.final_window_max_w;
  summary["max_V"] = r.summary.max_V;
  summary["steps"] = r.summary.steps;
  summary["runtime_seconds"] = r.summary.runtime_seconds;

  py::dict audit;
  audit["gating"] = r.audit.gating;
  audit["passed"] = r.audit.passed();
  audit["gain_violations"] = r.audit.gain_violations;
  audit["lyapunov_violations"] = r.audit.lyapunov_violations;
  audit["energy_violations"] = r.audit.energy_violations;

  py::dict out;
  out["label"] = r.label;
  out["variant"] = mfc::to_string(r.variant);
  out["series"] = series;
  out["summary"] = summary;
  out["audit"] = audit;
  return out;
}

}  // namespace

PYBIND11_MODULE(_mfcsim, m) {
  m.doc() = "Model-following control simulator";

  py::register_exception<mfc::Error>(m, "MfcError");

  m.def(
      "pole_placement",
      [](const std::vector<double>& poles) {
        const mfc::Vector k = mfc::pole_placement(poles);
        return std::vector<double>(k.values().begin(), k.values().end());
      },
      py::arg("poles"));

  m.def(
      "run_config",
      [](const std::string& text, std::optional<double> horizon, std::optional<double> dt) {
        mfc::RunPlan plan = mfc::parse_config(text);
        py::list out;
        std::vector<mfc::SimResult> results;
        {
          py::gil_scoped_release release;
          for (mfc::SimConfig& cfg : plan.runs) {
            if (horizon) cfg.horizon = *horizon;
            if (dt) cfg.dt = *dt;
            cfg.validate();
          }
          if (plan.runs.size() == 1) {
            results.push_back(mfc::run(plan.runs.front()));
          } else {
            results = mfc::run_comparison(plan.runs).runs;
          }
        }
        for (const auto& r : results) out.append(to_dict(r));
        return out;
      },
      py::arg("config_json"), py::arg("horizon") = py::none(), py::arg("dt") = py::none(),
      "Runs every variant in a JSON config and returns one dict per run.");

  m.def(
      "run_study",
      [](const std::string& variant, double horizon) {
        mfc::SimConfig cfg = mfc::study_config(mfc::parse_variant(variant));
        cfg.horizon = horizon;
        mfc::SimResult r;
        {
          py::gil_scoped_release release;
          r = mfc::run(cfg);
        }
        return to_dict(r);
      },
      py::arg("variant") = "mfc", py::arg("horizon") = 20.0);
}
