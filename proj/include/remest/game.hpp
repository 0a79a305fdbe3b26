#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "remest/channel.hpp"
#include "remest/estimation.hpp"
#include "remest/rng.hpp"

namespace remest::game {

inline constexpr std::size_t kMaxJointActions = 1000000;

struct PlayerModel {
  estimation::ProcessModel model;
  estimation::SteadyStateFilter filter;
};

// One-shot transmission-power game played each scheduling instant.
// Player i picks a power level from action_sets[i]; the payoff is the
// negative expected remote estimation error trace after the slot.
struct GameSpec {
  std::vector<std::vector<double>> action_sets;  // ascending power levels
  std::optional<std::vector<double>> energy_caps;
  channel::ChannelParams channel;
  channel::SerCurve ser_curve;
  std::vector<PlayerModel> players;
  std::vector<estimation::HoldingTime> holding_times;

  GameSpec(std::vector<std::vector<double>> action_sets_in,
           std::optional<std::vector<double>> energy_caps_in,
           channel::ChannelParams channel_in, channel::SerCurve ser_curve_in,
           std::vector<PlayerModel> players_in,
           std::vector<estimation::HoldingTime> holding_times_in);

  int num_players() const { return static_cast<int>(action_sets.size()); }
  bool constrained() const { return energy_caps.has_value(); }
  int num_levels(int i) const {
    return static_cast<int>(action_sets[i].size());
  }
  int top_index(int i) const { return num_levels(i) - 1; }
  std::size_t joint_action_count() const;
  std::vector<int> shape() const;
  std::vector<double> powers_of(std::span<const int> action) const;
};

// Independent randomization: probs[i] is player i's distribution over
// its own levels.
struct MixedProfile {
  std::vector<std::vector<double>> probs;

  explicit MixedProfile(std::vector<std::vector<double>> probs_in);
  void check_shape(const GameSpec& game) const;
};

// Dense distribution over joint actions, row-major with the last
// player's index varying fastest.
struct JointDistribution {
  std::vector<int> shape;
  std::vector<double> probs;

  JointDistribution(std::vector<int> shape_in, std::vector<double> probs_in);

  static JointDistribution point_mass(std::vector<int> shape,
                                      std::span<const int> action);

  std::size_t size() const { return probs.size(); }
  std::size_t flat_index(std::span<const int> action) const;
  std::vector<int> action_at(std::size_t flat) const;
  std::vector<double> marginal(int i) const;
  void check_shape(const GameSpec& game) const;
};

// Signal-based symmetric-roles correlation device: a uniformly random
// player is "chosen" and transmits at its top level with probability
// alpha; every other player does so with probability beta; the
// remaining mass sits on the bottom level.
struct CorrelationPolicy {
  double alpha = 1.0;
  double beta = 0.0;
};

struct CorrelatedEquilibrium {
  CorrelationPolicy policy;
  double cap_ratio = 0.0;  // common (top - bottom) / (cap - bottom)
  JointDistribution joint;
  std::vector<double> expected_power;
};

struct CorrelatedDraw {
  int signal = 0;
  std::vector<int> action;
};

// Mixed-radix increment over a joint-action counter; returns false once
// the counter wraps back to all zeros.
bool next_joint_action(std::vector<int>& action, std::span<const int> shape);

// Negative expected posterior-trace payoff at a pure joint action
// (indices into the action sets).
double utility(int i, std::span<const int> action, const GameSpec& game);

// Same payoff evaluated at raw transmit powers; used by the shape
// checks (monotonicity / convexity / submodularity grids).
double utility_at_powers(int i, std::span<const double> powers,
                         const GameSpec& game);

double expected_utility(int i, const JointDistribution& dist,
                        const GameSpec& game,
                        std::size_t cap = kMaxJointActions);

double expected_utility(int i, const MixedProfile& profile,
                        const GameSpec& game,
                        std::size_t cap = kMaxJointActions);

JointDistribution product_distribution(const MixedProfile& profile);

// Per-player expected transmit power.
std::vector<double> expected_power(const MixedProfile& profile,
                                   const GameSpec& game);
std::vector<double> expected_power(const JointDistribution& dist,
                                   const GameSpec& game);

// Unconstrained solutions: every player at its top power level.
MixedProfile ne_unconstrained(const GameSpec& game);
JointDistribution ce_unconstrained(const GameSpec& game);

// Energy-constrained Nash equilibrium: each player mixes between bottom
// and top so its expected power meets the cap with equality.
MixedProfile ne_constrained(const GameSpec& game);

// Energy-constrained correlated equilibrium for players sharing a
// common cap ratio; throws UnsupportedGameError otherwise.
CorrelatedEquilibrium ce_constrained(const GameSpec& game);

JointDistribution policy_joint_distribution(const CorrelationPolicy& policy,
                                            const GameSpec& game);

CorrelatedDraw sample_correlated_actions(const CorrelationPolicy& policy,
                                         const GameSpec& game,
                                         rng::Stream& stream);

std::vector<int> sample_profile_actions(const MixedProfile& profile,
                                        rng::Stream& stream);

}  // namespace remest::game
