#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "remest/game.hpp"

namespace remest::oracle {

inline constexpr std::size_t kMaxLpActions = 4096;

// to_level == kCapMixture means the deviation is the bottom/top mixture
// whose expected power meets the player's cap with equality.
inline constexpr int kCapMixture = -1;

struct Deviation {
  int player = 0;
  int from_level = 0;  // highest-probability level of the current strategy
  int to_level = 0;
};

struct NeReport {
  double max_gain = 0.0;
  std::optional<Deviation> witness;  // achiever of max_gain
  std::vector<double> utilities;     // per-player value of the profile
};

struct CeTransition {
  int player = 0;
  int recommended = 0;
  int transition = 0;
};

struct CeReport {
  double min_slack = 0.0;
  std::optional<CeTransition> worst;
  std::vector<double> utilities;
  // Informational: slack of recommendations the distribution never
  // issues, evaluated against the other players' joint marginal.
  std::optional<double> zero_support_min_slack;
};

// Best pure reply of player i against the other players' mixtures
// (caps ignored). Ties break toward the lowest level index.
int best_response(int i, const game::MixedProfile& profile,
                  const game::GameSpec& game,
                  std::size_t cap = game::kMaxJointActions);

// Nash check by direct enumeration. Deviations are every pure level
// for unconstrained games; with caps, every cap-feasible pure level
// plus the cap-tight bottom/top mixture. Throws InfeasibleProfileError
// if the profile itself violates the caps (beyond tol).
NeReport check_ne(const game::MixedProfile& profile,
                  const game::GameSpec& game, double tol = 1e-9,
                  std::size_t cap = game::kMaxJointActions);

// Correlated-equilibrium check: for every recommendation with positive
// marginal and every transition, the conditional slack
//   E[u_i(a) - u_i(t, a_-i) | recommendation a]
// must be >= -tol. With caps, transitions are restricted to those the
// deviating player could adopt without pushing its expected power past
// the cap. Throws InfeasibleProfileError if the distribution itself
// violates the caps.
CeReport check_ce(const game::JointDistribution& dist,
                  const game::GameSpec& game, double tol = 1e-9,
                  std::size_t cap = game::kMaxJointActions);

// Iterated elimination of strictly dominated levels; returns the
// surviving level indices per player.
std::vector<std::vector<int>> iterated_strict_dominance(
    const game::GameSpec& game, std::size_t cap = game::kMaxJointActions);

enum class CeObjective { utilitarian, weighted };

// Correlated-equilibrium LP over exact rationals (payoffs rounded to 12
// decimals). Unconstrained games use the plain incentive rows; capped
// games add per-player expected-power equalities, restrict incentive
// rows to downward transitions (the only cap-admissible ones at a tight
// cap), and add per-player participation floors at the constrained-NE
// value so the result never pays anyone less than the Nash fallback.
game::JointDistribution solve_ce_lp(
    const game::GameSpec& game,
    CeObjective objective = CeObjective::utilitarian,
    std::span<const double> weights = {},
    std::size_t cap = kMaxLpActions);

}  // namespace remest::oracle
