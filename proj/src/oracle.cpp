#include "remest/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "remest/errors.hpp"
#include "remest/lp.hpp"

namespace remest::oracle {

namespace {

using game::GameSpec;
using game::JointDistribution;
using game::MixedProfile;

// Materialised payoffs over the joint action grid, row-major like
// JointDistribution.
struct PayoffTable {
  std::vector<int> shape;
  std::vector<std::size_t> strides;
  std::size_t total = 1;
  std::vector<std::vector<double>> utilities;  // [player][flat]

  PayoffTable(const GameSpec& game, std::size_t cap) {
    shape = game.shape();
    const std::size_t n = shape.size();
    strides.assign(n, 1);
    for (std::size_t i = n; i-- > 0;) {
      total *= static_cast<std::size_t>(shape[i]);
      if (total > cap)
        throw CapacityError("joint action space exceeds the enumeration cap");
      if (i > 0) strides[i - 1] = total;
    }
    utilities.assign(n, std::vector<double>(total));
    std::vector<int> action(n, 0);
    std::size_t flat = 0;
    do {
      for (std::size_t i = 0; i < n; ++i)
        utilities[i][flat] = game::utility(static_cast<int>(i), action, game);
      ++flat;
    } while (game::next_joint_action(action, shape));
  }

  int level_of(std::size_t flat, std::size_t player) const {
    return static_cast<int>(flat / strides[player] %
                            static_cast<std::size_t>(shape[player]));
  }
};

void require_caps_met(std::span<const double> energy, const GameSpec& game,
                      double tol) {
  if (!game.constrained()) return;
  for (std::size_t i = 0; i < energy.size(); ++i)
    if (energy[i] > (*game.energy_caps)[i] + tol)
      throw InfeasibleProfileError(
          "expected power of player " + std::to_string(i) + " (" +
          std::to_string(energy[i]) + ") exceeds its cap (" +
          std::to_string((*game.energy_caps)[i]) + ")");
}

// Probability of the other players picking the levels encoded in flat.
double others_weight(const MixedProfile& profile, const PayoffTable& table,
                     std::size_t flat, std::size_t player) {
  double w = 1.0;
  for (std::size_t j = 0; j < table.shape.size(); ++j) {
    if (j == player) continue;
    w *= profile.probs[j][static_cast<std::size_t>(table.level_of(flat, j))];
  }
  return w;
}

// Expected utility of player i when it plays `level` and everyone else
// follows the profile.
double pure_against(const MixedProfile& profile, const PayoffTable& table,
                    std::size_t player, int level) {
  double total = 0.0;
  for (std::size_t flat = 0; flat < table.total; ++flat) {
    if (table.level_of(flat, player) != level) continue;
    const double w = others_weight(profile, table, flat, player);
    if (w != 0.0) total += w * table.utilities[player][flat];
  }
  return total;
}

int representative_level(const MixedProfile& profile, std::size_t player) {
  const auto& probs = profile.probs[player];
  return static_cast<int>(
      std::max_element(probs.begin(), probs.end()) - probs.begin());
}

}  // namespace

int best_response(int i, const MixedProfile& profile, const GameSpec& game,
                  std::size_t cap) {
  profile.check_shape(game);
  if (i < 0 || i >= game.num_players())
    throw ConfigError("player index out of range");
  const PayoffTable table(game, cap);
  const auto player = static_cast<std::size_t>(i);
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < game.num_levels(i); ++t) {
    const double v = pure_against(profile, table, player, t);
    if (v > best_value) {
      best_value = v;
      best = t;
    }
  }
  return best;
}

NeReport check_ne(const MixedProfile& profile, const GameSpec& game,
                  double tol, std::size_t cap) {
  profile.check_shape(game);
  require_caps_met(game::expected_power(profile, game), game, tol);
  const PayoffTable table(game, cap);
  const int n = game.num_players();

  NeReport report;
  report.max_gain = -std::numeric_limits<double>::infinity();
  report.utilities.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto player = static_cast<std::size_t>(i);
    const auto& own = profile.probs[player];
    std::vector<double> pure(own.size());
    double base = 0.0;
    for (int t = 0; t < game.num_levels(i); ++t) {
      pure[static_cast<std::size_t>(t)] = pure_against(profile, table, player, t);
      base += own[static_cast<std::size_t>(t)] * pure[static_cast<std::size_t>(t)];
    }
    report.utilities[player] = base;
    const int from = representative_level(profile, player);
    const auto& levels = game.action_sets[player];
    const double cap_i =
        game.constrained() ? (*game.energy_caps)[player] : 0.0;
    for (int t = 0; t < game.num_levels(i); ++t) {
      if (game.constrained() &&
          levels[static_cast<std::size_t>(t)] > cap_i + tol)
        continue;
      const double gain = pure[static_cast<std::size_t>(t)] - base;
      if (gain > report.max_gain) {
        report.max_gain = gain;
        report.witness = Deviation{i, from, t};
      }
    }
    if (game.constrained() && levels.size() >= 2 &&
        cap_i < levels.back() && cap_i > levels.front()) {
      // Cap-tight bottom/top mixture.
      const double q = (cap_i - levels.front()) / (levels.back() - levels.front());
      const double value =
          (1.0 - q) * pure.front() + q * pure.back();
      const double gain = value - base;
      if (gain > report.max_gain) {
        report.max_gain = gain;
        report.witness = Deviation{i, from, kCapMixture};
      }
    }
  }
  return report;
}

CeReport check_ce(const JointDistribution& dist, const GameSpec& game,
                  double tol, std::size_t cap) {
  dist.check_shape(game);
  const std::vector<double> energy = game::expected_power(dist, game);
  require_caps_met(energy, game, tol);
  const PayoffTable table(game, cap);
  const int n = game.num_players();

  CeReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  report.utilities.assign(static_cast<std::size_t>(n), 0.0);
  constexpr double kSupportEps = 1e-12;
  for (int i = 0; i < n; ++i) {
    const auto player = static_cast<std::size_t>(i);
    for (std::size_t flat = 0; flat < table.total; ++flat)
      report.utilities[player] +=
          dist.probs[flat] * table.utilities[player][flat];
    const std::vector<double> marginal = dist.marginal(i);
    const auto& levels = game.action_sets[player];
    for (int a = 0; a < game.num_levels(i); ++a) {
      const double mass = marginal[static_cast<std::size_t>(a)];
      for (int t = 0; t < game.num_levels(i); ++t) {
        if (t == a) continue;
        if (game.constrained()) {
          // Following the deviation t whenever a is recommended moves
          // the player's expected power by mass * (e(t) - e(a)).
          const double shifted =
              energy[player] + mass * (levels[static_cast<std::size_t>(t)] -
                                       levels[static_cast<std::size_t>(a)]);
          if (shifted > (*game.energy_caps)[player] + tol) continue;
        }
        double weighted = 0.0;  // E[p(a, a_-i) (u(a,..) - u(t,..))]
        const std::ptrdiff_t shift =
            (static_cast<std::ptrdiff_t>(t) - a) *
            static_cast<std::ptrdiff_t>(table.strides[player]);
        for (std::size_t flat = 0; flat < table.total; ++flat) {
          if (table.level_of(flat, player) != a) continue;
          const double p = dist.probs[flat];
          if (p == 0.0) continue;
          const std::size_t moved =
              static_cast<std::size_t>(static_cast<std::ptrdiff_t>(flat) + shift);
          weighted += p * (table.utilities[player][flat] -
                           table.utilities[player][moved]);
        }
        if (mass > kSupportEps) {
          const double slack = weighted / mass;
          if (slack < report.min_slack) {
            report.min_slack = slack;
            report.worst = CeTransition{i, a, t};
          }
        } else {
          // Never-issued recommendation: evaluate against the joint
          // marginal of the others.
          double slack = 0.0;
          for (std::size_t flat = 0; flat < table.total; ++flat) {
            if (table.level_of(flat, player) != a) continue;
            double w = 0.0;  // others' marginal mass at this a_-i
            for (int own = 0; own < game.num_levels(i); ++own) {
              const std::size_t other_flat = static_cast<std::size_t>(
                  static_cast<std::ptrdiff_t>(flat) +
                  (static_cast<std::ptrdiff_t>(own) - a) *
                      static_cast<std::ptrdiff_t>(table.strides[player]));
              w += dist.probs[other_flat];
            }
            const std::size_t moved = static_cast<std::size_t>(
                static_cast<std::ptrdiff_t>(flat) + shift);
            slack += w * (table.utilities[player][flat] -
                          table.utilities[player][moved]);
          }
          if (!report.zero_support_min_slack ||
              slack < *report.zero_support_min_slack)
            report.zero_support_min_slack = slack;
        }
      }
    }
  }
  if (!std::isfinite(report.min_slack)) report.min_slack = 0.0;
  return report;
}

std::vector<std::vector<int>> iterated_strict_dominance(const GameSpec& game,
                                                        std::size_t cap) {
  const PayoffTable table(game, cap);
  const int n = game.num_players();
  std::vector<std::vector<int>> surviving(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < game.num_levels(i); ++a)
      surviving[static_cast<std::size_t>(i)].push_back(a);

  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n && !changed; ++i) {
      auto& own = surviving[static_cast<std::size_t>(i)];
      if (own.size() <= 1) continue;
      for (std::size_t ai = 0; ai < own.size() && !changed; ++ai) {
        for (std::size_t ti = 0; ti < own.size() && !changed; ++ti) {
          if (ai == ti) continue;
          const int a = own[ai], t = own[ti];
          // t strictly dominates a on the surviving grid?
          bool dominates = true;
          for (std::size_t flat = 0; flat < table.total && dominates; ++flat) {
            if (table.level_of(flat, static_cast<std::size_t>(i)) != a)
              continue;
            bool in_grid = true;
            for (std::size_t j = 0; in_grid && j < surviving.size(); ++j) {
              if (j == static_cast<std::size_t>(i)) continue;
              const int lvl = table.level_of(flat, j);
              in_grid = std::find(surviving[j].begin(), surviving[j].end(),
                                  lvl) != surviving[j].end();
            }
            if (!in_grid) continue;
            const std::size_t moved = static_cast<std::size_t>(
                static_cast<std::ptrdiff_t>(flat) +
                (static_cast<std::ptrdiff_t>(t) - a) *
                    static_cast<std::ptrdiff_t>(
                        table.strides[static_cast<std::size_t>(i)]));
            dominates = table.utilities[static_cast<std::size_t>(i)][moved] >
                        table.utilities[static_cast<std::size_t>(i)][flat];
          }
          if (dominates) {
            own.erase(own.begin() + static_cast<std::ptrdiff_t>(ai));
            changed = true;
          }
        }
      }
    }
  }
  return surviving;
}

JointDistribution solve_ce_lp(const GameSpec& game, CeObjective objective,
                              std::span<const double> weights,
                              std::size_t cap) {
  const PayoffTable table(game, cap);
  const int n = game.num_players();
  if (objective == CeObjective::weighted &&
      weights.size() != static_cast<std::size_t>(n))
    throw ConfigError("weight count does not match the player count");

  std::vector<std::vector<lp::Rational>> payoff(
      static_cast<std::size_t>(n),
      std::vector<lp::Rational>(table.total));
  for (int i = 0; i < n; ++i)
    for (std::size_t flat = 0; flat < table.total; ++flat)
      payoff[static_cast<std::size_t>(i)][flat] = lp::rational_from_decimal(
          table.utilities[static_cast<std::size_t>(i)][flat]);

  lp::Problem problem;
  problem.num_vars = table.total;
  problem.objective.assign(table.total, lp::Rational(0));
  for (std::size_t flat = 0; flat < table.total; ++flat)
    for (int i = 0; i < n; ++i) {
      const lp::Rational w =
          objective == CeObjective::weighted
              ? lp::rational_from_decimal(weights[static_cast<std::size_t>(i)])
              : lp::Rational(1);
      problem.objective[flat] += w * payoff[static_cast<std::size_t>(i)][flat];
    }

  {
    lp::Row simplex;
    simplex.coeffs.assign(table.total, lp::Rational(1));
    simplex.kind = lp::RowKind::eq;
    simplex.rhs = 1;
    problem.rows.push_back(std::move(simplex));
  }

  const bool capped = game.constrained();
  for (int i = 0; i < n; ++i) {
    const auto player = static_cast<std::size_t>(i);
    for (int a = 0; a < game.num_levels(i); ++a) {
      for (int t = 0; t < game.num_levels(i); ++t) {
        if (t == a) continue;
        if (capped && t > a) continue;  // upward moves break a tight cap
        lp::Row row;
        row.coeffs.assign(table.total, lp::Rational(0));
        row.kind = lp::RowKind::ge;
        row.rhs = 0;
        const std::ptrdiff_t shift =
            (static_cast<std::ptrdiff_t>(t) - a) *
            static_cast<std::ptrdiff_t>(table.strides[player]);
        for (std::size_t flat = 0; flat < table.total; ++flat) {
          if (table.level_of(flat, player) != a) continue;
          const std::size_t moved = static_cast<std::size_t>(
              static_cast<std::ptrdiff_t>(flat) + shift);
          row.coeffs[flat] = payoff[player][flat] - payoff[player][moved];
        }
        problem.rows.push_back(std::move(row));
      }
    }
  }

  if (capped) {
    for (int i = 0; i < n; ++i) {
      const auto player = static_cast<std::size_t>(i);
      lp::Row row;
      row.coeffs.assign(table.total, lp::Rational(0));
      row.kind = lp::RowKind::eq;
      row.rhs = lp::rational_from_decimal((*game.energy_caps)[player]);
      for (std::size_t flat = 0; flat < table.total; ++flat)
        row.coeffs[flat] = lp::rational_from_decimal(
            game.action_sets[player][static_cast<std::size_t>(
                table.level_of(flat, player))]);
      problem.rows.push_back(std::move(row));
    }
    // Participation floors: nobody below its constrained-NE value,
    // evaluated exactly in the LP's own rounded payoffs so the NE
    // product itself stays feasible.
    for (int i = 0; i < n; ++i) {
      const auto player = static_cast<std::size_t>(i);
      std::vector<std::vector<lp::Rational>> mix(
          static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        const auto pj = static_cast<std::size_t>(j);
        const auto& levels = game.action_sets[pj];
        const lp::Rational capr =
            lp::rational_from_decimal((*game.energy_caps)[pj]);
        const lp::Rational bot = lp::rational_from_decimal(levels.front());
        const lp::Rational top = lp::rational_from_decimal(levels.back());
        mix[pj].assign(levels.size(), lp::Rational(0));
        if (capr >= top) {
          mix[pj].back() = 1;
        } else {
          const lp::Rational q = (capr - bot) / (top - bot);
          mix[pj].front() = 1 - q;
          mix[pj].back() = q;
        }
      }
      lp::Rational floor_value = 0;
      for (std::size_t flat = 0; flat < table.total; ++flat) {
        lp::Rational w = 1;
        for (int j = 0; j < n; ++j)
          w *= mix[static_cast<std::size_t>(j)][static_cast<std::size_t>(
              table.level_of(flat, static_cast<std::size_t>(j)))];
        if (w != 0) floor_value += w * payoff[player][flat];
      }
      lp::Row row;
      row.coeffs = payoff[player];
      row.kind = lp::RowKind::ge;
      row.rhs = floor_value;
      problem.rows.push_back(std::move(row));
    }
  }

  const lp::Solution solution = lp::solve(problem);
  if (solution.status == lp::Status::infeasible)
    throw NumericError("correlated-equilibrium LP is infeasible");
  if (solution.status == lp::Status::unbounded)
    throw NumericError("correlated-equilibrium LP is unbounded");
  std::vector<double> probs(table.total);
  for (std::size_t flat = 0; flat < table.total; ++flat)
    probs[flat] = lp::to_double(solution.x[flat]);
  return JointDistribution(table.shape, std::move(probs));
}

}  // namespace remest::oracle
