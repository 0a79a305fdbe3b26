#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "remest/config.hpp"
#include "remest/game.hpp"

namespace remest::sim {

struct StepRecord {
  int step = 0;
  int signal = -1;  // -1 when the policy uses no correlation signal
  std::vector<int> action;
  std::vector<double> sinr;
  std::vector<std::uint8_t> arrived;
  std::vector<std::int64_t> holding;
  std::vector<double> trace;
  std::vector<double> squared_error;  // filled in full-state mode only
};

struct RunTrace {
  std::vector<StepRecord> steps;
};

// Per-sensor series over steps 1..horizon (index 0 = step 1).
struct SensorSeries {
  std::vector<double> mean;
  std::vector<double> stderr_of_mean;
};

struct PolicyResult {
  std::string name;
  config::PolicySpec::Kind kind = config::PolicySpec::Kind::ne;
  nlohmann::ordered_json annotations;  // resolved alpha/beta etc.
  long long runs = 0;
  std::vector<SensorSeries> trace_stats;   // [sensor]
  std::vector<SensorSeries> sq_err_stats;  // [sensor], full-state only
  std::vector<double> expected_power;
};

struct AggregateResult {
  int horizon = 0;
  bool full_state = false;
  nlohmann::ordered_json config_echo;
  std::vector<PolicyResult> policies;
};

// One simulated trajectory. The draw sequence depends only on
// (config.seed, policy_index, run_index), never on thread count.
RunTrace run_once(const config::SimulationConfig& cfg, int policy_index,
                  long long run_index);

// Mean remote-error trace (and squared estimation error in full-state
// mode) per policy, sensor and step, with standard errors. threads = 0
// picks the hardware concurrency; results are identical for any value.
AggregateResult monte_carlo(const config::SimulationConfig& cfg,
                            int threads = 0);

// Writes <name>.csv per policy (step,sensor,mean_trace,stderr,runs),
// <name>_fullstate.csv in full-state mode, and summary.json.
void emit_results(const AggregateResult& result, const std::string& out_dir);

nlohmann::ordered_json summary_json(const AggregateResult& result);

}  // namespace remest::sim
