#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>

#include "remest/api.hpp"
#include "remest/channel.hpp"
#include "remest/config.hpp"
#include "remest/errors.hpp"
#include "remest/simulator.hpp"

namespace py = pybind11;

namespace {

py::object json_to_py(const nlohmann::ordered_json& j) {
  using nlohmann::ordered_json;
  switch (j.type()) {
    case ordered_json::value_t::null:
      return py::none();
    case ordered_json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case ordered_json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case ordered_json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case ordered_json::value_t::number_float:
      return py::float_(j.get<double>());
    case ordered_json::value_t::string:
      return py::str(j.get<std::string>());
    case ordered_json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case ordered_json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items())
        out[py::str(key)] = json_to_py(value);
      return out;
    }
    default:
      return py::none();
  }
}

struct ConfigHandle {
  remest::config::SimulationConfig cfg;
};

py::dict trace_to_py(const remest::sim::RunTrace& trace) {
  py::list steps;
  for (const remest::sim::StepRecord& rec : trace.steps) {
    py::dict step;
    step["step"] = rec.step;
    step["signal"] = rec.signal;
    step["action"] = rec.action;
    step["sinr"] = rec.sinr;
    step["arrived"] = rec.arrived;
    step["holding"] = rec.holding;
    step["trace"] = rec.trace;
    step["squared_error"] = rec.squared_error;
    steps.append(std::move(step));
  }
  py::dict out;
  out["steps"] = std::move(steps);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Multi-sensor remote state estimation over a shared interference "
      "channel: steady-state filters, transmission-power equilibria, "
      "verification oracles and a Monte Carlo simulator";

  py::register_exception<remest::ConfigError>(m, "ConfigError",
                                              PyExc_ValueError);
  py::register_exception<remest::NumericError>(m, "NumericError",
                                               PyExc_ArithmeticError);
  py::register_exception<remest::CapacityError>(m, "CapacityError",
                                                PyExc_RuntimeError);
  py::register_exception<remest::UnsupportedGameError>(m, "UnsupportedGameError",
                                                       PyExc_ValueError);
  py::register_exception<remest::InfeasibleProfileError>(
      m, "InfeasibleProfileError", PyExc_ValueError);
  py::register_exception<remest::IoError>(m, "IoError", PyExc_OSError);

  py::class_<ConfigHandle>(m, "Config")
      .def_property_readonly(
          "num_sensors",
          [](const ConfigHandle& h) { return h.cfg.sensors.size(); })
      .def_property_readonly(
          "horizon", [](const ConfigHandle& h) { return h.cfg.horizon; })
      .def_property_readonly("runs",
                             [](const ConfigHandle& h) { return h.cfg.runs; })
      .def_property_readonly("seed",
                             [](const ConfigHandle& h) { return h.cfg.seed; })
      .def_property_readonly("constrained", [](const ConfigHandle& h) {
        return h.cfg.constrained();
      });

  m.def(
      "load_config",
      [](const std::string& path) {
        return ConfigHandle{remest::config::load_config(path)};
      },
      py::arg("path"), "Load and validate a JSON config file.");

  m.def(
      "parse_config",
      [](const std::string& text) {
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
          throw remest::ConfigError("config is not valid JSON: " +
                                    std::string(e.what()));
        }
        return ConfigHandle{remest::config::parse_config(doc)};
      },
      py::arg("text"), "Parse a config from a JSON string.");

  m.def("gaussian_q", &remest::channel::gaussian_q, py::arg("x"),
        "Standard normal tail probability Q(x).");

  m.def(
      "ser",
      [](double gamma) {
        const auto curve = remest::channel::SerCurve::builtin_bpsk();
        return remest::channel::ser(gamma, curve);
      },
      py::arg("sinr"), "Built-in symbol error rate at the given SINR.");

  m.def(
      "sinr",
      [](int i, const std::vector<double>& powers,
         const std::vector<double>& gains, double spreading_gain,
         double noise) {
        const remest::channel::ChannelParams params(gains, spreading_gain,
                                                    noise);
        return remest::channel::sinr(i, powers, params);
      },
      py::arg("i"), py::arg("powers"), py::arg("gains"),
      py::arg("spreading_gain"), py::arg("noise"),
      "SINR of sensor i under the given transmit powers.");

  m.def(
      "steady_state",
      [](const ConfigHandle& h) {
        return json_to_py(remest::api::steady_state_report(h.cfg));
      },
      py::arg("config"),
      "Steady-state local filter covariance per sensor.");

  m.def(
      "equilibrium",
      [](const ConfigHandle& h, const std::string& kind, bool constrained) {
        return json_to_py(
            remest::api::equilibrium_report(h.cfg, kind, constrained));
      },
      py::arg("config"), py::arg("kind"), py::arg("constrained") = false,
      "Closed-form equilibrium (kind: 'ne' or 'ce').");

  m.def(
      "verify",
      [](const ConfigHandle& h, const std::string& kind, bool lp) {
        return json_to_py(remest::api::verify_report(h.cfg, kind, lp));
      },
      py::arg("config"), py::arg("kind"), py::arg("lp") = false,
      "Oracle check of the closed-form solution; lp=True adds the exact "
      "LP cross-check.");

  m.def(
      "run_once",
      [](const ConfigHandle& h, int policy_index, long long run_index) {
        return trace_to_py(remest::sim::run_once(h.cfg, policy_index,
                                                 run_index));
      },
      py::arg("config"), py::arg("policy_index"), py::arg("run_index"),
      "One simulated trajectory (deterministic in config.seed, "
      "policy_index and run_index).");

  m.def(
      "simulate",
      [](const ConfigHandle& h, const std::string& out_dir,
         std::optional<long long> runs, std::optional<std::uint64_t> seed,
         std::optional<bool> full_state, int threads) {
        remest::config::SimulationConfig cfg = h.cfg;
        if (runs) cfg.runs = *runs;
        if (seed) cfg.seed = *seed;
        if (full_state) cfg.full_state = *full_state;
        return json_to_py(remest::api::simulate_report(cfg, out_dir, threads));
      },
      py::arg("config"), py::arg("out_dir"), py::arg("runs") = py::none(),
      py::arg("seed") = py::none(), py::arg("full_state") = py::none(),
      py::arg("threads") = 0,
      "Monte Carlo run; writes CSVs plus summary.json and returns the "
      "summary.");
}
