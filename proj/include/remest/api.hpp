#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "remest/config.hpp"

namespace remest::api {

// Pass/fail tolerance used by every verification report.
inline constexpr double kVerifyTol = 1e-9;

nlohmann::ordered_json steady_state_report(const config::SimulationConfig& cfg);

// kind is "ne" or "ce". The constrained flag must match the presence of
// energy caps in the config.
nlohmann::ordered_json equilibrium_report(const config::SimulationConfig& cfg,
                                          const std::string& kind,
                                          bool constrained);

// Checks the closed-form solution of the given kind against the
// deviation oracle; with_lp additionally solves the independent LP and
// cross-checks it.
nlohmann::ordered_json verify_report(const config::SimulationConfig& cfg,
                                     const std::string& kind, bool with_lp);

// Runs the Monte Carlo study, writes CSVs and summary.json into
// out_dir, and returns the summary document.
nlohmann::ordered_json simulate_report(const config::SimulationConfig& cfg,
                                       const std::string& out_dir,
                                       int threads = 0);

}  // namespace remest::api
