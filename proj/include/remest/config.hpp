#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "remest/channel.hpp"
#include "remest/estimation.hpp"
#include "remest/game.hpp"

namespace remest::config {

struct PolicySpec {
  enum class Kind { ne, ce, fixed };

  Kind kind = Kind::ne;
  std::string name;
  std::optional<double> alpha;  // ce only: override the closed form
  std::optional<double> beta;
  std::optional<std::vector<std::vector<double>>> profile;  // fixed only
};

struct SensorConfig {
  estimation::ProcessModel model;
  double gain = 1.0;
  std::vector<double> levels;
  std::optional<double> cap;
  std::int64_t holding_time = 0;
};

struct SimulationConfig {
  std::vector<SensorConfig> sensors;
  double spreading_gain = 1.0;
  double noise = 1.0;
  channel::SerCurve ser = channel::SerCurve::builtin_bpsk();
  std::vector<PolicySpec> policies;
  int horizon = 50;
  long long runs = 10000;
  std::uint64_t seed = 1;
  bool full_state = false;

  bool constrained() const;
  channel::ChannelParams channel_params() const;
  // Builds the one-shot game at the configured holding times; computes
  // each sensor's steady-state filter.
  game::GameSpec build_game() const;
};

SimulationConfig parse_config(const nlohmann::json& doc);
SimulationConfig load_config(const std::string& path);

// Resolved-parameter echo for reports and summary files.
nlohmann::ordered_json config_echo(const SimulationConfig& cfg);

}  // namespace remest::config
