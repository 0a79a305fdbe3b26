#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "remest/errors.hpp"
#include "remest/game.hpp"
#include "support/helpers.hpp"

using namespace remest;
using namespace testsupport;

namespace {

// Independent payoff reference built from the scalar closed forms.
double reference_utility(int i, const std::vector<double>& powers) {
  const auto& sensors = benchmark_sensors();
  double interference = 0.0;
  for (std::size_t j = 0; j < powers.size(); ++j)
    if (static_cast<int>(j) != i) interference += powers[j];
  const double gamma = kBenchmarkSpreadingGain * powers[i] /
                       (interference + kBenchmarkNoise);
  const BenchmarkSensor& s = sensors[static_cast<std::size_t>(i)];
  const double p_bar = scalar_steady_state(s.a, s.c, s.q, s.r);
  const double gap = p_bar - scalar_propagate(p_bar, s.a, s.q, 1);
  return reference_ser(gamma) * gap - p_bar;
}

std::vector<int> ia(std::initializer_list<int> v) { return {v}; }

}  // namespace

TEST_CASE("game validation") {
  auto game = benchmark_game(true);
  CHECK(game.num_players() == 3);
  CHECK(game.constrained());
  CHECK(game.joint_action_count() == 8);
  CHECK(game.shape() == std::vector<int>{2, 2, 2});
  CHECK(game.top_index(0) == 1);

  auto players = [&] {
    std::vector<game::PlayerModel> out;
    for (const BenchmarkSensor& s : benchmark_sensors()) {
      auto model = scalar_model(s.a, s.c, s.q, s.r);
      auto filter = estimation::steady_state_covariance(model);
      out.push_back({std::move(model), std::move(filter)});
    }
    return out;
  };
  channel::ChannelParams chan({1.0, 1.0, 1.0}, 2.0, 0.6);
  auto curve = channel::SerCurve::builtin_bpsk();
  using V = std::vector<std::vector<double>>;
  std::vector<estimation::HoldingTime> taus{{0}, {0}, {0}};

  // descending levels
  CHECK_THROWS_AS(game::GameSpec(V{{1.0, 0.0}, {0.0, 0.8}, {0.0, 0.6}},
                                 std::nullopt, chan, curve, players(), taus),
                  ConfigError);
  // negative level
  CHECK_THROWS_AS(game::GameSpec(V{{-0.5, 1.0}, {0.0, 0.8}, {0.0, 0.6}},
                                 std::nullopt, chan, curve, players(), taus),
                  ConfigError);
  // player count mismatch
  CHECK_THROWS_AS(game::GameSpec(V{{0.0, 1.0}, {0.0, 0.8}}, std::nullopt, chan,
                                 curve, players(), taus),
                  ConfigError);
  // cap below the bottom level
  CHECK_THROWS_AS(
      game::GameSpec(V{{0.5, 1.0}, {0.0, 0.8}, {0.0, 0.6}},
                     std::vector<double>{0.2, 0.4, 0.3}, chan, curve,
                     players(), taus),
      ConfigError);
  // negative holding time
  CHECK_THROWS_AS(game::GameSpec(V{{0.0, 1.0}, {0.0, 0.8}, {0.0, 0.6}},
                                 std::nullopt, chan, curve, players(),
                                 {{0}, {-1}, {0}}),
                  ConfigError);
}

TEST_CASE("pure utilities match the scalar reference composition") {
  auto game = benchmark_game(false);
  std::vector<int> action{0, 0, 0};
  do {
    for (int i = 0; i < 3; ++i) {
      const std::vector<double> powers = game.powers_of(action);
      CHECK(game::utility(i, action, game) ==
            doctest::Approx(reference_utility(i, powers)).epsilon(1e-10));
    }
  } while (game::next_joint_action(action, game.shape()));
}

TEST_CASE("utility grids are monotone convex and submodular") {
  auto game = benchmark_game(false);
  const double lo = 0.05, hi = 1.0, step = 0.05;

  // increasing in own power, decreasing in an interferer's power
  for (double other : {0.0, 0.3, 0.6}) {
    double prev_own = -1e30;
    for (double p = lo; p <= hi + 1e-12; p += step) {
      const double u =
          game::utility_at_powers(0, std::vector<double>{p, other, 0.3}, game);
      CHECK(u >= prev_own - 1e-12);
      prev_own = u;
    }
    double prev_cross = 1e30;
    for (double p = lo; p <= hi + 1e-12; p += step) {
      const double u =
          game::utility_at_powers(0, std::vector<double>{0.7, p, other}, game);
      CHECK(u <= prev_cross + 1e-12);
      prev_cross = u;
    }
  }

  // convex in own power: second differences are non-negative
  for (double other : {0.0, 0.4}) {
    std::vector<double> us;
    for (double p = lo; p <= hi + 1e-12; p += step)
      us.push_back(
          game::utility_at_powers(1, std::vector<double>{other, p, 0.2}, game));
    for (std::size_t k = 2; k < us.size(); ++k)
      CHECK(us[k] - 2.0 * us[k - 1] + us[k - 2] >= -1e-11);
  }

  // submodular: own-power increments shrink as an interferer powers up
  const double own_lo = 0.2, own_hi = 0.9;
  double prev_inc = 1e30;
  for (double other = 0.0; other <= 0.8 + 1e-12; other += 0.1) {
    const double inc =
        game::utility_at_powers(0, std::vector<double>{own_hi, other, 0.3},
                                game) -
        game::utility_at_powers(0, std::vector<double>{own_lo, other, 0.3},
                                game);
    CHECK(inc <= prev_inc + 1e-12);
    prev_inc = inc;
  }
}

TEST_CASE("joint distributions and expectations agree") {
  auto game = benchmark_game(false);
  game::MixedProfile profile(
      {{0.25, 0.75}, {0.5, 0.5}, {0.1, 0.9}});
  auto joint = game::product_distribution(profile);
  double total = 0.0;
  for (double p : joint.probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  for (int i = 0; i < 3; ++i) {
    const auto marg = joint.marginal(i);
    for (std::size_t l = 0; l < marg.size(); ++l)
      CHECK(marg[l] == doctest::Approx(profile.probs[i][l]).epsilon(1e-14));
    CHECK(game::expected_utility(i, joint, game) ==
          doctest::Approx(game::expected_utility(i, profile, game))
              .epsilon(1e-13));
  }
  const auto power_p = game::expected_power(profile, game);
  const auto power_j = game::expected_power(joint, game);
  CHECK(power_p[0] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(power_j[1] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(power_p[2] == doctest::Approx(power_j[2]).epsilon(1e-14));

  // flat indexing round trip
  std::vector<int> action{1, 0, 1};
  CHECK(joint.action_at(joint.flat_index(action)) == action);

  // invalid profile rows
  CHECK_THROWS_AS(game::MixedProfile({{0.5, 0.4}}), ConfigError);
  CHECK_THROWS_AS(game::MixedProfile({{1.2, -0.2}}), ConfigError);
}

TEST_CASE("unconstrained solutions sit on the top corner") {
  auto game = benchmark_game(false);
  auto ne = game::ne_unconstrained(game);
  for (int i = 0; i < 3; ++i) {
    CHECK(ne.probs[i].back() == 1.0);
    CHECK(ne.probs[i].front() == 0.0);
  }
  auto ce = game::ce_unconstrained(game);
  auto product = game::product_distribution(ne);
  REQUIRE(ce.probs.size() == product.probs.size());
  for (std::size_t k = 0; k < ce.probs.size(); ++k)
    CHECK(ce.probs[k] == product.probs[k]);
  CHECK(ce.probs.back() == 1.0);
}

TEST_CASE("constrained nash mixes to the cap exactly") {
  auto game = benchmark_game(true);
  auto ne = game::ne_constrained(game);
  for (int i = 0; i < 3; ++i) {
    CHECK(ne.probs[i][1] == 0.5);  // (cap - bottom) / (top - bottom)
    CHECK(ne.probs[i][0] == 0.5);
  }
  const auto power = game::expected_power(ne, game);
  const auto& sensors = benchmark_sensors();
  for (int i = 0; i < 3; ++i)
    CHECK(power[i] == doctest::Approx(sensors[i].cap).epsilon(1e-14));

  // frozen expected utilities under the constrained Nash profile
  const std::array<double, 3> frozen{-1.084781, -0.999082, -0.940900};
  for (int i = 0; i < 3; ++i)
    CHECK(game::expected_utility(i, ne, game) ==
          doctest::Approx(frozen[i]).epsilon(2e-5));

  // unconstrained solver on a capped game is still the top corner
  CHECK_THROWS_AS(game::ne_constrained(benchmark_game(false)), ConfigError);
}

TEST_CASE("constrained correlation policy hits the closed form") {
  auto game = benchmark_game(true);
  auto ce = game::ce_constrained(game);
  CHECK(ce.policy.alpha == 1.0);
  CHECK(ce.policy.beta == 0.25);
  CHECK(ce.cap_ratio == 2.0);
  const auto& sensors = benchmark_sensors();
  for (int i = 0; i < 3; ++i) {
    CHECK(ce.expected_power[i] ==
          doctest::Approx(sensors[i].cap).epsilon(1e-12));
    const auto marg = ce.joint.marginal(i);
    CHECK(marg[1] == doctest::Approx(0.5).epsilon(1e-12));
  }

  // frozen expected utilities: closed form, then the manual override
  const std::array<double, 3> frozen_closed{-1.059452, -0.980885, -0.928927};
  for (int i = 0; i < 3; ++i)
    CHECK(game::expected_utility(i, ce.joint, game) ==
          doctest::Approx(frozen_closed[i]).epsilon(2e-5));

  auto override_joint =
      game::policy_joint_distribution({0.75, 0.25}, game);
  const std::array<double, 3> frozen_override{-1.075320, -0.990220,
                                              -0.933577};
  for (int i = 0; i < 3; ++i)
    CHECK(game::expected_utility(i, override_joint, game) ==
          doctest::Approx(frozen_override[i]).epsilon(2e-5));
}

TEST_CASE("correlation device joint matches direct enumeration") {
  auto game = benchmark_game(true);
  const game::CorrelationPolicy policy{0.75, 0.25};
  auto joint = game::policy_joint_distribution(policy, game);
  // enumerate signals and bernoulli outcomes by hand
  std::vector<double> expect(8, 0.0);
  for (int signal = 0; signal < 3; ++signal) {
    for (int corner = 0; corner < 8; ++corner) {
      double prob = 1.0 / 3.0;
      std::size_t flat = 0;
      for (int i = 0; i < 3; ++i) {
        const int level = (corner >> i) & 1;
        const double p_top = (i == signal) ? policy.alpha : policy.beta;
        prob *= level ? p_top : 1.0 - p_top;
        flat = flat * 2 + static_cast<std::size_t>(level);
      }
      expect[flat] += prob;
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(joint.probs[k] == doctest::Approx(expect[k]).epsilon(1e-13));
    total += joint.probs[k];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("mismatched cap ratios are rejected") {
  using V = std::vector<std::vector<double>>;
  std::vector<game::PlayerModel> players;
  for (const BenchmarkSensor& s : benchmark_sensors()) {
    auto model = scalar_model(s.a, s.c, s.q, s.r);
    auto filter = estimation::steady_state_covariance(model);
    players.push_back({std::move(model), std::move(filter)});
  }
  channel::ChannelParams chan({1.0, 1.0, 1.0}, 2.0, 0.6);
  auto curve = channel::SerCurve::builtin_bpsk();
  std::vector<estimation::HoldingTime> taus{{0}, {0}, {0}};
  game::GameSpec skew(V{{0.0, 1.0}, {0.0, 0.8}, {0.0, 0.6}},
                      std::vector<double>{0.5, 0.4, 0.45}, chan, curve,
                      std::move(players), taus);
  CHECK_THROWS_AS(game::ce_constrained(skew), UnsupportedGameError);
  CHECK_NOTHROW(game::ne_constrained(skew));
}

TEST_CASE("sampling frequencies follow the distributions") {
  auto game = benchmark_game(true);
  rng::Stream stream(314159);

  auto ne = game::ne_constrained(game);
  std::array<int, 3> tops{0, 0, 0};
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const auto action = game::sample_profile_actions(ne, stream);
    for (int i = 0; i < 3; ++i) tops[i] += action[i];
  }
  const double sigma = std::sqrt(0.25 / n);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(tops[i] / static_cast<double>(n) - 0.5) <= 4.0 * sigma);

  auto ce = game::ce_constrained(game);
  std::array<int, 3> ce_tops{0, 0, 0};
  std::array<int, 3> signals{0, 0, 0};
  for (int k = 0; k < n; ++k) {
    const auto draw = game::sample_correlated_actions(ce.policy, game, stream);
    ++signals[static_cast<std::size_t>(draw.signal)];
    for (int i = 0; i < 3; ++i) ce_tops[i] += draw.action[i];
  }
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(ce_tops[i] / static_cast<double>(n) - 0.5) <= 4.0 * sigma);
    const double sig_sigma = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / n);
    CHECK(std::abs(signals[i] / static_cast<double>(n) - 1.0 / 3.0) <=
          4.0 * sig_sigma);
  }

  // identical seeds reproduce identical draws
  rng::Stream s1(9), s2(9);
  for (int k = 0; k < 50; ++k) {
    CHECK(game::sample_profile_actions(ne, s1) ==
          game::sample_profile_actions(ne, s2));
  }
}

TEST_CASE("point mass helper") {
  auto game = benchmark_game(false);
  auto dist = game::JointDistribution::point_mass(game.shape(), ia({1, 1, 1}));
  CHECK(dist.probs.back() == 1.0);
  CHECK(dist.probs.front() == 0.0);
  CHECK(dist.marginal(2) == std::vector<double>{0.0, 1.0});
}
