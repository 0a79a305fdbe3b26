#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "remest/api.hpp"
#include "remest/config.hpp"
#include "remest/errors.hpp"

namespace {

using nlohmann::ordered_json;

void print_vector(const ordered_json& values, const char* label) {
  std::cout << label << ": [";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) std::cout << ", ";
    std::cout << values[i].dump();
  }
  std::cout << "]\n";
}

void print_steady_state(const ordered_json& doc) {
  for (std::size_t i = 0; i < doc["sensors"].size(); ++i) {
    const ordered_json& s = doc["sensors"][i];
    std::cout << "sensor " << (i + 1) << ": trace(p_bar) = "
              << s["trace"].get<double>()
              << "  residual = " << s["residual"].get<double>()
              << "  iterations = " << s["iterations"].get<int>() << '\n';
    std::cout << "  p_bar = " << s["p_bar"].dump() << '\n';
  }
}

void print_equilibrium(const ordered_json& doc) {
  std::cout << "kind: " << doc["kind"].get<std::string>() << '\n';
  if (doc.contains("profile")) {
    const ordered_json& profile = doc["profile"];
    for (std::size_t i = 0; i < profile.size(); ++i)
      std::cout << "  player " << (i + 1) << " mix: " << profile[i].dump()
                << '\n';
  }
  if (doc.contains("alpha")) {
    std::cout << "  alpha = " << doc["alpha"].get<double>()
              << "  beta = " << doc["beta"].get<double>()
              << "  cap_ratio = " << doc["cap_ratio"].get<double>() << '\n';
  }
  if (doc.contains("expected_power"))
    print_vector(doc["expected_power"], "  expected_power");
  if (doc.contains("utilities") && !doc["utilities"].is_null())
    print_vector(doc["utilities"], "  utilities");
  if (doc.contains("config_policies")) {
    for (const ordered_json& p : doc["config_policies"]) {
      std::cout << "  policy \"" << p["name"].get<std::string>()
                << "\": alpha = " << p["alpha"].get<double>()
                << " (closed form " << p["closed_form_alpha"].get<double>()
                << (p["alpha_matches_closed_form"].get<bool>()
                        ? ", matches)"
                        : ", DIFFERS)")
                << ", beta = " << p["beta"].get<double>() << " (closed form "
                << p["closed_form_beta"].get<double>()
                << (p["beta_matches_closed_form"].get<bool>() ? ", matches)"
                                                              : ", DIFFERS)")
                << '\n';
    }
  }
}

void print_verify(const ordered_json& doc) {
  std::cout << "kind: " << doc["kind"].get<std::string>()
            << (doc["constrained"].get<bool>() ? " (constrained)" : "")
            << '\n';
  if (doc.contains("max_gain"))
    std::cout << "  max deviation gain = " << doc["max_gain"].get<double>()
              << '\n';
  if (doc.contains("min_slack"))
    std::cout << "  min incentive slack = " << doc["min_slack"].get<double>()
              << '\n';
  if (doc.contains("utilities")) print_vector(doc["utilities"], "  utilities");
  std::cout << "  check " << (doc["passed"].get<bool>() ? "passed" : "FAILED")
            << " at tolerance " << doc["tolerance"].get<double>() << '\n';
  if (doc.contains("lp")) {
    const ordered_json& lp = doc["lp"];
    std::cout << "  lp: min_slack = " << lp["min_slack"].get<double>()
              << (lp["passed"].get<bool>() ? " (passed)" : " (FAILED)")
              << '\n';
    if (lp.contains("utilities")) print_vector(lp["utilities"], "  lp utilities");
    if (lp.contains("min_margin_vs_ne"))
      std::cout << "  lp min margin vs constrained NE = "
                << lp["min_margin_vs_ne"].get<double>() << '\n';
    if (lp.contains("all_max_exact"))
      std::cout << "  lp point mass on all-top: "
                << (lp["all_max_exact"].get<bool>() ? "exact" : "NO") << '\n';
  }
}

void print_simulate(const ordered_json& doc, const std::string& out_dir) {
  std::cout << "wrote " << out_dir << "/summary.json\n";
  for (const ordered_json& p : doc["policies"]) {
    std::cout << "policy \"" << p["name"].get<std::string>() << "\" (runs "
              << p["runs"].get<long long>() << ")";
    print_vector(p["terminal"]["mean_trace"], "  terminal mean trace");
  }
  for (const ordered_json& gap : doc["gaps"]) {
    std::cout << "gap " << gap["ne"].get<std::string>() << " - "
              << gap["ce"].get<std::string>();
    print_vector(gap["terminal_gap"], "  terminal");
  }
}

int dispatch(int argc, char** argv) {
  CLI::App app{
      "Multi-sensor remote estimation over a shared channel: steady-state "
      "filters, transmission-power equilibria, verification oracles and a "
      "Monte Carlo simulator"};
  app.require_subcommand(1);

  std::string config_path, kind = "ne", out_dir;
  bool as_json = false, constrained = false, with_lp = false,
       full_state = false;
  long long runs_override = 0;
  std::uint64_t seed_override = 0;
  bool has_seed = false;
  int threads = 0;

  CLI::App* steady = app.add_subcommand(
      "steady-state", "Steady-state local filter covariances");
  steady->add_option("config", config_path, "JSON config file")->required();
  steady->add_flag("--json", as_json, "machine-readable output");

  CLI::App* equilibrium = app.add_subcommand(
      "equilibrium", "Closed-form equilibrium of the transmission game");
  equilibrium->add_option("config", config_path, "JSON config file")
      ->required();
  equilibrium->add_option("--kind", kind, "ne or ce")->required();
  equilibrium->add_flag("--constrained", constrained,
                        "use the energy-constrained solver");
  equilibrium->add_flag("--json", as_json, "machine-readable output");

  CLI::App* verify = app.add_subcommand(
      "verify", "Check a closed-form solution with the deviation oracle");
  verify->add_option("config", config_path, "JSON config file")->required();
  verify->add_option("--kind", kind, "ne or ce")->required();
  verify->add_flag("--lp", with_lp, "cross-check with the exact LP solver");
  verify->add_flag("--json", as_json, "machine-readable output");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo trace comparison");
  simulate->add_option("config", config_path, "JSON config file")->required();
  simulate->add_option("--runs", runs_override, "override config.runs");
  CLI::Option* seed_opt =
      simulate->add_option("--seed", seed_override, "override config.seed");
  simulate->add_option("--out", out_dir, "output directory")->required();
  simulate->add_flag("--full-state", full_state,
                     "also simulate states and estimators explicitly");
  simulate->add_option("--threads", threads, "worker threads (0 = auto)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  has_seed = seed_opt->count() > 0;

  remest::config::SimulationConfig cfg =
      remest::config::load_config(config_path);

  if (steady->parsed()) {
    const ordered_json doc = remest::api::steady_state_report(cfg);
    if (as_json)
      std::cout << doc.dump(2) << '\n';
    else
      print_steady_state(doc);
    return 0;
  }
  if (equilibrium->parsed()) {
    const ordered_json doc =
        remest::api::equilibrium_report(cfg, kind, constrained);
    if (as_json)
      std::cout << doc.dump(2) << '\n';
    else
      print_equilibrium(doc);
    return 0;
  }
  if (verify->parsed()) {
    const ordered_json doc = remest::api::verify_report(cfg, kind, with_lp);
    if (as_json)
      std::cout << doc.dump(2) << '\n';
    else
      print_verify(doc);
    const bool ok = doc["passed"].get<bool>() &&
                    (!doc.contains("lp") || doc["lp"]["passed"].get<bool>());
    return ok ? 0 : 1;
  }
  if (simulate->parsed()) {
    if (runs_override > 0) cfg.runs = runs_override;
    if (has_seed) cfg.seed = seed_override;
    if (full_state) cfg.full_state = true;
    const ordered_json doc =
        remest::api::simulate_report(cfg, out_dir, threads);
    print_simulate(doc, out_dir);
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const remest::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const remest::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const remest::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return 4;
  } catch (const remest::UnsupportedGameError& e) {
    std::cerr << "unsupported game: " << e.what() << '\n';
    return 5;
  } catch (const remest::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 6;
  } catch (const remest::InfeasibleProfileError& e) {
    std::cerr << "infeasible profile: " << e.what() << '\n';
    return 7;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
