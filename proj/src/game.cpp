#include "remest/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "remest/errors.hpp"

namespace remest::game {

namespace {

void check_distribution(std::span<const double> probs,
                        const std::string& name) {
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < -1e-12)
      throw ConfigError(name + " has a negative or non-finite probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError(name + " does not sum to 1 (sum " +
                      std::to_string(sum) + ")");
}

}  // namespace

GameSpec::GameSpec(std::vector<std::vector<double>> action_sets_in,
                   std::optional<std::vector<double>> energy_caps_in,
                   channel::ChannelParams channel_in,
                   channel::SerCurve ser_curve_in,
                   std::vector<PlayerModel> players_in,
                   std::vector<estimation::HoldingTime> holding_times_in)
    : action_sets(std::move(action_sets_in)),
      energy_caps(std::move(energy_caps_in)),
      channel(std::move(channel_in)),
      ser_curve(std::move(ser_curve_in)),
      players(std::move(players_in)),
      holding_times(std::move(holding_times_in)) {
  const std::size_t n = action_sets.size();
  if (n == 0) throw ConfigError("game needs at least one player");
  if (static_cast<std::size_t>(channel.num_sensors()) != n)
    throw ConfigError("channel sensor count does not match the player count");
  if (players.size() != n)
    throw ConfigError("player model count does not match the player count");
  if (holding_times.size() != n)
    throw ConfigError("holding time count does not match the player count");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& levels = action_sets[i];
    if (levels.empty())
      throw ConfigError("player " + std::to_string(i) +
                        " has an empty action set");
    for (std::size_t k = 0; k < levels.size(); ++k) {
      if (!std::isfinite(levels[k]) || levels[k] < 0.0)
        throw ConfigError("power levels must be finite and non-negative");
      if (k > 0 && levels[k] <= levels[k - 1])
        throw ConfigError("power levels must be strictly ascending");
    }
    if (holding_times[i].steps < 0)
      throw ConfigError("holding times must be non-negative");
    if (players[i].filter.p_bar.rows() != players[i].model.a.rows())
      throw ConfigError("steady-state filter does not match its model");
  }
  if (energy_caps) {
    if (energy_caps->size() != n)
      throw ConfigError("energy cap count does not match the player count");
    for (std::size_t i = 0; i < n; ++i) {
      const double cap = (*energy_caps)[i];
      if (!std::isfinite(cap))
        throw ConfigError("energy caps must be finite");
      if (cap < action_sets[i].front())
        throw ConfigError("energy cap of player " + std::to_string(i) +
                          " lies below its lowest power level");
    }
  }
}

std::size_t GameSpec::joint_action_count() const {
  std::size_t count = 1;
  for (const auto& levels : action_sets) {
    if (count > kMaxJointActions / levels.size() + 1)
      return std::numeric_limits<std::size_t>::max();
    count *= levels.size();
  }
  return count;
}

std::vector<int> GameSpec::shape() const {
  std::vector<int> s(action_sets.size());
  for (std::size_t i = 0; i < action_sets.size(); ++i)
    s[i] = static_cast<int>(action_sets[i].size());
  return s;
}

std::vector<double> GameSpec::powers_of(std::span<const int> action) const {
  if (action.size() != action_sets.size())
    throw ConfigError("joint action length does not match the player count");
  std::vector<double> powers(action.size());
  for (std::size_t i = 0; i < action.size(); ++i) {
    if (action[i] < 0 || action[i] >= num_levels(static_cast<int>(i)))
      throw ConfigError("action index out of range");
    powers[i] = action_sets[i][static_cast<std::size_t>(action[i])];
  }
  return powers;
}

MixedProfile::MixedProfile(std::vector<std::vector<double>> probs_in)
    : probs(std::move(probs_in)) {
  if (probs.empty()) throw ConfigError("mixed profile needs players");
  for (std::size_t i = 0; i < probs.size(); ++i)
    check_distribution(probs[i],
                       "mixed strategy of player " + std::to_string(i));
}

void MixedProfile::check_shape(const GameSpec& game) const {
  if (static_cast<int>(probs.size()) != game.num_players())
    throw ConfigError("profile player count does not match the game");
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (probs[i].size() != game.action_sets[i].size())
      throw ConfigError("profile level count does not match the game");
}

JointDistribution::JointDistribution(std::vector<int> shape_in,
                                     std::vector<double> probs_in)
    : shape(std::move(shape_in)), probs(std::move(probs_in)) {
  if (shape.empty()) throw ConfigError("joint distribution needs players");
  std::size_t expect = 1;
  for (int s : shape) {
    if (s <= 0) throw ConfigError("joint distribution shape must be positive");
    if (expect > kMaxJointActions / static_cast<std::size_t>(s))
      throw CapacityError("joint action space exceeds the enumeration cap");
    expect *= static_cast<std::size_t>(s);
  }
  if (probs.size() != expect)
    throw ConfigError("joint distribution size does not match its shape");
  check_distribution(probs, "joint distribution");
}

JointDistribution JointDistribution::point_mass(std::vector<int> shape,
                                                std::span<const int> action) {
  if (action.size() != shape.size())
    throw ConfigError("joint action length does not match the distribution");
  std::size_t total = 1;
  std::size_t flat = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (shape[i] <= 0)
      throw ConfigError("joint distribution shape must be positive");
    if (action[i] < 0 || action[i] >= shape[i])
      throw ConfigError("action index out of range");
    total *= static_cast<std::size_t>(shape[i]);
    flat = flat * static_cast<std::size_t>(shape[i]) +
           static_cast<std::size_t>(action[i]);
  }
  std::vector<double> probs(total, 0.0);
  probs[flat] = 1.0;
  return JointDistribution(std::move(shape), std::move(probs));
}

std::size_t JointDistribution::flat_index(std::span<const int> action) const {
  if (action.size() != shape.size())
    throw ConfigError("joint action length does not match the distribution");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (action[i] < 0 || action[i] >= shape[i])
      throw ConfigError("action index out of range");
    flat = flat * static_cast<std::size_t>(shape[i]) +
           static_cast<std::size_t>(action[i]);
  }
  return flat;
}

std::vector<int> JointDistribution::action_at(std::size_t flat) const {
  std::vector<int> action(shape.size());
  for (std::size_t i = shape.size(); i-- > 0;) {
    const auto s = static_cast<std::size_t>(shape[i]);
    action[i] = static_cast<int>(flat % s);
    flat /= s;
  }
  return action;
}

std::vector<double> JointDistribution::marginal(int i) const {
  if (i < 0 || i >= static_cast<int>(shape.size()))
    throw ConfigError("player index out of range");
  std::vector<double> m(static_cast<std::size_t>(shape[i]), 0.0);
  std::vector<int> action(shape.size(), 0);
  std::size_t flat = 0;
  do {
    m[static_cast<std::size_t>(action[i])] += probs[flat];
    ++flat;
  } while (next_joint_action(action, shape));
  return m;
}

void JointDistribution::check_shape(const GameSpec& game) const {
  const std::vector<int> expect = game.shape();
  if (shape != expect)
    throw ConfigError("joint distribution shape does not match the game");
}

bool next_joint_action(std::vector<int>& action, std::span<const int> shape) {
  for (std::size_t i = action.size(); i-- > 0;) {
    if (++action[i] < shape[i]) return true;
    action[i] = 0;
  }
  return false;
}

double utility(int i, std::span<const int> action, const GameSpec& game) {
  const std::vector<double> powers = game.powers_of(action);
  return utility_at_powers(i, powers, game);
}

double utility_at_powers(int i, std::span<const double> powers,
                         const GameSpec& game) {
  if (i < 0 || i >= game.num_players())
    throw ConfigError("player index out of range");
  const double gamma = channel::sinr(i, powers, game.channel);
  const double f = channel::ser(gamma, game.ser_curve);
  const auto& player = game.players[static_cast<std::size_t>(i)];
  const double gap = estimation::trace_gap(
      game.holding_times[static_cast<std::size_t>(i)], player.filter,
      player.model);
  return f * gap - player.filter.p_bar.trace();
}

double expected_utility(int i, const JointDistribution& dist,
                        const GameSpec& game, std::size_t cap) {
  dist.check_shape(game);
  if (dist.size() > cap)
    throw CapacityError("joint action space exceeds the enumeration cap");
  double total = 0.0;
  std::vector<int> action(dist.shape.size(), 0);
  std::size_t flat = 0;
  do {
    if (dist.probs[flat] != 0.0)
      total += dist.probs[flat] * utility(i, action, game);
    ++flat;
  } while (next_joint_action(action, dist.shape));
  return total;
}

double expected_utility(int i, const MixedProfile& profile,
                        const GameSpec& game, std::size_t cap) {
  profile.check_shape(game);
  return expected_utility(i, product_distribution(profile), game, cap);
}

JointDistribution product_distribution(const MixedProfile& profile) {
  std::vector<int> shape(profile.probs.size());
  std::size_t total = 1;
  for (std::size_t i = 0; i < profile.probs.size(); ++i) {
    shape[i] = static_cast<int>(profile.probs[i].size());
    if (total > kMaxJointActions / profile.probs[i].size())
      throw CapacityError("joint action space exceeds the enumeration cap");
    total *= profile.probs[i].size();
  }
  std::vector<double> probs(total);
  std::vector<int> action(shape.size(), 0);
  std::size_t flat = 0;
  do {
    double p = 1.0;
    for (std::size_t i = 0; i < shape.size(); ++i)
      p *= profile.probs[i][static_cast<std::size_t>(action[i])];
    probs[flat++] = p;
  } while (next_joint_action(action, shape));
  return JointDistribution(std::move(shape), std::move(probs));
}

std::vector<double> expected_power(const MixedProfile& profile,
                                   const GameSpec& game) {
  profile.check_shape(game);
  std::vector<double> energy(profile.probs.size(), 0.0);
  for (std::size_t i = 0; i < profile.probs.size(); ++i)
    for (std::size_t k = 0; k < profile.probs[i].size(); ++k)
      energy[i] += profile.probs[i][k] * game.action_sets[i][k];
  return energy;
}

std::vector<double> expected_power(const JointDistribution& dist,
                                   const GameSpec& game) {
  dist.check_shape(game);
  std::vector<double> energy(dist.shape.size(), 0.0);
  for (int i = 0; i < game.num_players(); ++i) {
    const std::vector<double> m = dist.marginal(i);
    for (std::size_t k = 0; k < m.size(); ++k)
      energy[static_cast<std::size_t>(i)] +=
          m[k] * game.action_sets[static_cast<std::size_t>(i)][k];
  }
  return energy;
}

MixedProfile ne_unconstrained(const GameSpec& game) {
  std::vector<std::vector<double>> probs(
      static_cast<std::size_t>(game.num_players()));
  for (int i = 0; i < game.num_players(); ++i) {
    std::vector<double> s(game.action_sets[static_cast<std::size_t>(i)].size(),
                          0.0);
    s.back() = 1.0;
    probs[static_cast<std::size_t>(i)] = std::move(s);
  }
  return MixedProfile(std::move(probs));
}

JointDistribution ce_unconstrained(const GameSpec& game) {
  std::vector<int> shape = game.shape();
  std::vector<int> top(shape.size());
  for (std::size_t i = 0; i < shape.size(); ++i) top[i] = shape[i] - 1;
  return JointDistribution::point_mass(std::move(shape), top);
}

namespace {

// Binding-cap check shared by the constrained solvers.
void require_binding_caps(const GameSpec& game) {
  if (!game.constrained())
    throw ConfigError("game has no energy caps; use the unconstrained solver");
  for (int i = 0; i < game.num_players(); ++i) {
    const auto& levels = game.action_sets[static_cast<std::size_t>(i)];
    const double cap = (*game.energy_caps)[static_cast<std::size_t>(i)];
    if (cap > levels.back())
      throw UnsupportedGameError(
          "energy cap of player " + std::to_string(i) +
          " is not binding (above the top power level)");
    if (levels.size() < 2 && cap < levels.back())
      throw UnsupportedGameError("player " + std::to_string(i) +
                                 " has no level meeting its energy cap");
  }
}

}  // namespace

MixedProfile ne_constrained(const GameSpec& game) {
  require_binding_caps(game);
  std::vector<std::vector<double>> probs(
      static_cast<std::size_t>(game.num_players()));
  for (int i = 0; i < game.num_players(); ++i) {
    const auto& levels = game.action_sets[static_cast<std::size_t>(i)];
    const double cap = (*game.energy_caps)[static_cast<std::size_t>(i)];
    std::vector<double> s(levels.size(), 0.0);
    if (cap >= levels.back()) {
      s.back() = 1.0;
    } else {
      const double top_mass =
          (cap - levels.front()) / (levels.back() - levels.front());
      s.front() = 1.0 - top_mass;
      s.back() = top_mass;
    }
    probs[static_cast<std::size_t>(i)] = std::move(s);
  }
  return MixedProfile(std::move(probs));
}

namespace {

double utilitarian_sum(const JointDistribution& dist, const GameSpec& game) {
  double total = 0.0;
  for (int i = 0; i < game.num_players(); ++i)
    total += expected_utility(i, dist, game);
  return total;
}

}  // namespace

CorrelatedEquilibrium ce_constrained(const GameSpec& game) {
  require_binding_caps(game);
  const int n = game.num_players();
  double ratio = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& levels = game.action_sets[static_cast<std::size_t>(i)];
    const double cap = (*game.energy_caps)[static_cast<std::size_t>(i)];
    if (cap <= levels.front())
      throw UnsupportedGameError(
          "energy cap of player " + std::to_string(i) +
          " leaves no room above the bottom power level");
    const double d = (levels.back() - levels.front()) / (cap - levels.front());
    if (i == 0) {
      ratio = d;
    } else if (std::abs(d - ratio) > 1e-9 * std::max(1.0, std::abs(ratio))) {
      throw UnsupportedGameError(
          "players have unequal cap ratios (" + std::to_string(ratio) +
          " vs " + std::to_string(d) + "); the correlated solver requires a "
          "common ratio");
    }
  }
  // Expected-power identity: alpha + (n-1) beta = n / ratio. Two
  // consistent assignments exist; keep each branch that respects its
  // own ordering and pick the one with the larger utilitarian sum.
  const double budget = static_cast<double>(n) / ratio;
  std::vector<CorrelationPolicy> candidates;
  {
    const double beta =
        std::max(0.0, (budget - 1.0) / static_cast<double>(n - 1 > 0 ? n - 1 : 1));
    const double alpha =
        n > 1 ? budget - static_cast<double>(n - 1) * beta : budget;
    if (alpha >= beta - 1e-12 && alpha <= 1.0 + 1e-12 && beta <= 1.0 + 1e-12)
      candidates.push_back({std::min(alpha, 1.0), std::min(beta, 1.0)});
  }
  if (n > 1) {
    const double beta = budget / static_cast<double>(n - 1);
    const double alpha = 0.0;
    if (beta > alpha && beta <= 1.0 + 1e-12)
      candidates.push_back({alpha, std::min(beta, 1.0)});
  }
  if (candidates.empty())
    throw UnsupportedGameError(
        "no consistent correlation policy exists for this cap ratio");
  std::optional<CorrelatedEquilibrium> best;
  double best_sum = -std::numeric_limits<double>::infinity();
  for (const CorrelationPolicy& policy : candidates) {
    JointDistribution joint = policy_joint_distribution(policy, game);
    const double sum = utilitarian_sum(joint, game);
    if (sum > best_sum) {
      best_sum = sum;
      best = CorrelatedEquilibrium{policy, ratio, std::move(joint), {}};
    }
  }
  best->expected_power = expected_power(best->joint, game);
  return *std::move(best);
}

JointDistribution policy_joint_distribution(const CorrelationPolicy& policy,
                                            const GameSpec& game) {
  if (policy.alpha < 0.0 || policy.alpha > 1.0 || policy.beta < 0.0 ||
      policy.beta > 1.0)
    throw ConfigError("correlation policy probabilities must lie in [0, 1]");
  const int n = game.num_players();
  const std::vector<int> shape = game.shape();
  std::size_t total = 1;
  for (int s : shape) {
    if (total > kMaxJointActions / static_cast<std::size_t>(s))
      throw CapacityError("joint action space exceeds the enumeration cap");
    total *= static_cast<std::size_t>(s);
  }
  std::vector<double> probs(total, 0.0);
  const double signal_weight = 1.0 / static_cast<double>(n);
  // Support lives on bottom/top per player: walk the 2^n corner set for
  // each signal value.
  std::vector<int> corner(static_cast<std::size_t>(n), 0);
  std::vector<int> action(static_cast<std::size_t>(n), 0);
  const std::vector<int> corner_shape(static_cast<std::size_t>(n), 2);
  for (int signal = 0; signal < n; ++signal) {
    std::fill(corner.begin(), corner.end(), 0);
    do {
      double p = signal_weight;
      for (int j = 0; j < n; ++j) {
        const double top_prob = j == signal ? policy.alpha : policy.beta;
        const bool top = corner[static_cast<std::size_t>(j)] == 1;
        p *= top ? top_prob : 1.0 - top_prob;
        action[static_cast<std::size_t>(j)] =
            top ? shape[static_cast<std::size_t>(j)] - 1 : 0;
      }
      if (p != 0.0) {
        std::size_t flat = 0;
        for (int j = 0; j < n; ++j)
          flat = flat * static_cast<std::size_t>(shape[static_cast<std::size_t>(j)]) +
                 static_cast<std::size_t>(action[static_cast<std::size_t>(j)]);
        probs[flat] += p;
      }
    } while (next_joint_action(corner, corner_shape));
  }
  return JointDistribution(shape, std::move(probs));
}

CorrelatedDraw sample_correlated_actions(const CorrelationPolicy& policy,
                                         const GameSpec& game,
                                         rng::Stream& stream) {
  if (policy.alpha < 0.0 || policy.alpha > 1.0 || policy.beta < 0.0 ||
      policy.beta > 1.0)
    throw ConfigError("correlation policy probabilities must lie in [0, 1]");
  const int n = game.num_players();
  CorrelatedDraw draw;
  draw.signal = stream.uniform_int(n);
  draw.action.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double top_prob = j == draw.signal ? policy.alpha : policy.beta;
    draw.action[static_cast<std::size_t>(j)] =
        stream.bernoulli(top_prob) ? game.top_index(j) : 0;
  }
  return draw;
}

std::vector<int> sample_profile_actions(const MixedProfile& profile,
                                        rng::Stream& stream) {
  std::vector<int> action(profile.probs.size());
  for (std::size_t i = 0; i < profile.probs.size(); ++i) {
    const double u = stream.uniform01();
    double acc = 0.0;
    int chosen = static_cast<int>(profile.probs[i].size()) - 1;
    for (std::size_t k = 0; k < profile.probs[i].size(); ++k) {
      acc += profile.probs[i][k];
      if (u < acc) {
        chosen = static_cast<int>(k);
        break;
      }
    }
    action[i] = chosen;
  }
  return action;
}

}  // namespace remest::game
