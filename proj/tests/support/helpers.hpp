#pragma once

// Shared fixtures and independent reference computations for the test
// suite. Reference formulas here are derived separately from the
// library code paths they validate.

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "remest/channel.hpp"
#include "remest/config.hpp"
#include "remest/estimation.hpp"
#include "remest/game.hpp"
#include "remest/rng.hpp"

namespace testsupport {

// Scalar benchmark system: three sensors sharing one channel.
struct BenchmarkSensor {
  double a, c, q, r, gain, bottom, top, cap;
};

inline const std::array<BenchmarkSensor, 3>& benchmark_sensors() {
  static const std::array<BenchmarkSensor, 3> sensors{{
      {0.9, 1.0, 0.8, 0.8, 1.0, 0.0, 1.0, 0.5},
      {0.8, 1.1, 0.8, 0.8, 1.0, 0.0, 0.8, 0.4},
      {0.7, 1.2, 0.8, 0.8, 1.0, 0.0, 0.6, 0.3},
  }};
  return sensors;
}

inline constexpr double kBenchmarkSpreadingGain = 2.0;
inline constexpr double kBenchmarkNoise = 0.6;

// Steady-state posterior variance of a scalar system, via the closed
// quadratic for the prior fixed point u = a^2 P + q with
// P = r u / (c^2 u + r):
//   c^2 u^2 + (r - a^2 r - q c^2) u - q r = 0.
inline double scalar_steady_state(double a, double c, double q, double r) {
  const double A = c * c;
  const double B = r - a * a * r - q * c * c;
  const double C = -q * r;
  const double u = (-B + std::sqrt(B * B - 4.0 * A * C)) / (2.0 * A);
  return r * u / (c * c * u + r);
}

// Scalar prediction map iterated t times: variance after t steps
// without a delivery.
inline double scalar_propagate(double p, double a, double q, int t) {
  for (int k = 0; k < t; ++k) p = a * a * p + q;
  return p;
}

// Independent SER reference: 1 - 2 Q(sqrt(4/g - 1)) written with erfc
// directly.
inline double reference_ser(double gamma) {
  if (gamma <= 0.0) return 1.0;
  if (gamma > 4.0) return 0.0;
  const double x = std::sqrt(4.0 / gamma - 1.0);
  return 1.0 - std::erfc(x / std::sqrt(2.0));
}

inline Eigen::MatrixXd scalar_matrix(double v) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = v;
  return m;
}

inline remest::estimation::ProcessModel scalar_model(double a, double c,
                                                     double q, double r) {
  return remest::estimation::ProcessModel(scalar_matrix(a), scalar_matrix(c),
                                          scalar_matrix(q), scalar_matrix(r),
                                          scalar_matrix(q));
}

inline remest::game::GameSpec benchmark_game(bool capped,
                                             std::int64_t holding = 0) {
  using namespace remest;
  std::vector<std::vector<double>> actions;
  std::optional<std::vector<double>> caps;
  std::vector<double> gains;
  std::vector<game::PlayerModel> players;
  std::vector<estimation::HoldingTime> taus;
  if (capped) caps.emplace();
  for (const BenchmarkSensor& s : benchmark_sensors()) {
    actions.push_back({s.bottom, s.top});
    if (caps) caps->push_back(s.cap);
    gains.push_back(s.gain);
    estimation::ProcessModel model = scalar_model(s.a, s.c, s.q, s.r);
    estimation::SteadyStateFilter filter =
        estimation::steady_state_covariance(model);
    players.push_back({std::move(model), std::move(filter)});
    taus.push_back({holding});
  }
  return game::GameSpec(
      std::move(actions), std::move(caps),
      channel::ChannelParams(std::move(gains), kBenchmarkSpreadingGain,
                             kBenchmarkNoise),
      channel::SerCurve::builtin_bpsk(), std::move(players), std::move(taus));
}

inline nlohmann::json benchmark_config_json(long long runs, int horizon,
                                            std::uint64_t seed,
                                            bool with_caps = true,
                                            bool full_state = false) {
  nlohmann::json sensors = nlohmann::json::array();
  for (const BenchmarkSensor& s : benchmark_sensors()) {
    nlohmann::json entry{{"a", s.a},       {"c", s.c},
                         {"q", s.q},       {"r", s.r},
                         {"gain", s.gain}, {"levels", {s.bottom, s.top}}};
    if (with_caps) entry["cap"] = s.cap;
    sensors.push_back(std::move(entry));
  }
  nlohmann::json doc{
      {"sensors", std::move(sensors)},
      {"channel",
       {{"spreading_gain", kBenchmarkSpreadingGain}, {"noise", kBenchmarkNoise}}},
      {"policies",
       {{{"kind", "ne"}, {"name", "ne"}},
        {{"kind", "ce"}, {"name", "ce"}, {"alpha", 0.75}, {"beta", 0.25}}}},
      {"horizon", horizon},
      {"runs", runs},
      {"seed", seed}};
  if (full_state) doc["full_state"] = true;
  return doc;
}

inline remest::config::SimulationConfig benchmark_config(
    long long runs, int horizon, std::uint64_t seed, bool with_caps = true,
    bool full_state = false) {
  return remest::config::parse_config(
      benchmark_config_json(runs, horizon, seed, with_caps, full_state));
}

// Random scalar games inside the informative SINR region (every
// attainable SINR <= spreading_gain * max_i gain_i*top_i / noise = 3.5).
inline remest::game::GameSpec random_game(remest::rng::Stream& rng,
                                          bool constrained) {
  using namespace remest;
  const int n = 2 + rng.uniform_int(3);  // 2..4 players
  std::vector<std::vector<double>> actions;
  std::optional<std::vector<double>> caps;
  std::vector<double> gains;
  std::vector<game::PlayerModel> players;
  std::vector<estimation::HoldingTime> taus;
  if (constrained) caps.emplace();
  const double spreading = 1.5 + 3.0 * rng.uniform01();
  const double d = constrained ? 1.3 + 2.2 * rng.uniform01() : 0.0;
  double max_top_power = 0.0;
  for (int i = 0; i < n; ++i) {
    const int levels = 2 + rng.uniform_int(2);  // 2..3 levels
    const double top = 0.4 + 1.6 * rng.uniform01();
    const double gain = 0.5 + 1.5 * rng.uniform01();
    std::vector<double> set{0.0};
    if (levels == 3) set.push_back(top * (0.2 + 0.6 * rng.uniform01()));
    set.push_back(top);
    actions.push_back(std::move(set));
    if (caps) caps->push_back(top / d);
    gains.push_back(gain);
    max_top_power = std::max(max_top_power, gain * top);
    const double a = 0.2 + 0.75 * rng.uniform01();
    const double c = 0.5 + rng.uniform01();
    const double q = 0.1 + 1.9 * rng.uniform01();
    const double r = 0.1 + 1.9 * rng.uniform01();
    estimation::ProcessModel model = scalar_model(a, c, q, r);
    estimation::SteadyStateFilter filter =
        estimation::steady_state_covariance(model);
    players.push_back({std::move(model), std::move(filter)});
    taus.push_back({rng.uniform_int(3)});
  }
  const double noise = spreading * max_top_power / 3.5;
  return game::GameSpec(
      std::move(actions), std::move(caps),
      channel::ChannelParams(std::move(gains), spreading, noise),
      channel::SerCurve::builtin_bpsk(), std::move(players), std::move(taus));
}

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

// Runs a shell command, capturing stdout.
inline CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0)
    result.output.append(buf, got);
  const int status = ::pclose(pipe);
  if (status >= 0 && WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  return result;
}

}  // namespace testsupport
