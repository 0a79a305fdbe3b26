#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "remest/errors.hpp"
#include "remest/simulator.hpp"
#include "support/helpers.hpp"

using namespace remest;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

nlohmann::json base_doc() { return benchmark_config_json(100, 10, 7); }

fs::path fresh_dir(const std::string& stem) {
  fs::path dir = fs::temp_directory_path() / ("remest_test_" + stem);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing round trip") {
  auto cfg = benchmark_config(100, 10, 7);
  CHECK(cfg.sensors.size() == 3);
  CHECK(cfg.horizon == 10);
  CHECK(cfg.runs == 100);
  CHECK(cfg.seed == 7);
  CHECK(cfg.constrained());
  CHECK(cfg.policies.size() == 2);
  CHECK(cfg.policies[0].kind == config::PolicySpec::Kind::ne);
  CHECK(cfg.policies[1].alpha == 0.75);
  auto game = cfg.build_game();
  CHECK(game.num_players() == 3);
  CHECK(game.constrained());
}

TEST_CASE("config validation rejects malformed documents") {
  auto doc = base_doc();
  doc["unknown_key"] = 1;
  CHECK_THROWS_AS(config::parse_config(doc), ConfigError);

  doc = base_doc();
  doc["sensors"][0].erase("a");
  CHECK_THROWS_AS(config::parse_config(doc), ConfigError);

  doc = base_doc();
  doc["sensors"][1].erase("cap");  // caps must be all-or-none
  CHECK_THROWS_AS(config::parse_config(doc), ConfigError);

  doc = base_doc();
  doc["sensors"][0]["levels"] = nlohmann::json::array();
  CHECK_THROWS_AS(config::parse_config(doc), ConfigError);

  doc = base_doc();
  doc["policies"][0]["alpha"] = 0.5;  // alpha on an ne policy
  CHECK_THROWS_AS(config::parse_config(doc), ConfigError);

  doc = base_doc();
  doc["policies"][1].erase("beta");  // alpha without beta
  CHECK_THROWS_AS(config::parse_config(doc), ConfigError);

  doc = base_doc();
  doc["horizon"] = 0;
  CHECK_THROWS_AS(config::parse_config(doc), ConfigError);

  doc = base_doc();
  doc["runs"] = -5;
  CHECK_THROWS_AS(config::parse_config(doc), ConfigError);

  doc = base_doc();
  doc["channel"].erase("noise");
  CHECK_THROWS_AS(config::parse_config(doc), ConfigError);

  CHECK_THROWS_AS(config::load_config("/nonexistent/path.json"), IoError);
}

TEST_CASE("default policies are ne and ce") {
  auto doc = base_doc();
  doc.erase("policies");
  auto cfg = config::parse_config(doc);
  REQUIRE(cfg.policies.size() == 2);
  CHECK(cfg.policies[0].kind == config::PolicySpec::Kind::ne);
  CHECK(cfg.policies[1].kind == config::PolicySpec::Kind::ce);
  CHECK(!cfg.policies[1].alpha.has_value());
}

TEST_CASE("single runs are reproducible and policy dependent") {
  auto cfg = benchmark_config(10, 12, 99);
  auto first = sim::run_once(cfg, 0, 3);
  auto again = sim::run_once(cfg, 0, 3);
  REQUIRE(first.steps.size() == 12);
  REQUIRE(again.steps.size() == 12);
  bool identical = true;
  for (std::size_t k = 0; k < first.steps.size(); ++k) {
    identical = identical && first.steps[k].action == again.steps[k].action &&
                first.steps[k].arrived == again.steps[k].arrived &&
                first.steps[k].trace == again.steps[k].trace;
  }
  CHECK(identical);

  auto other_run = sim::run_once(cfg, 0, 4);
  auto other_policy = sim::run_once(cfg, 1, 3);
  bool run_differs = false, policy_differs = false;
  for (std::size_t k = 0; k < first.steps.size(); ++k) {
    run_differs = run_differs || first.steps[k].action != other_run.steps[k].action;
    policy_differs =
        policy_differs || first.steps[k].action != other_policy.steps[k].action;
  }
  CHECK(run_differs);
  CHECK(policy_differs);
}

TEST_CASE("trajectories respect the holding-time dynamics") {
  auto cfg = benchmark_config(10, 25, 5);
  auto game = cfg.build_game();
  for (int policy = 0; policy < 2; ++policy) {
    auto trace = sim::run_once(cfg, policy, 0);
    std::vector<std::int64_t> tau(3, 0);
    for (const auto& step : trace.steps) {
      for (int i = 0; i < 3; ++i) {
        tau[i] = step.arrived[i] ? 0 : tau[i] + 1;
        REQUIRE(step.holding[i] == tau[i]);
        const double expect =
            estimation::remote_error_covariance(
                {tau[i]}, game.players[i].filter, game.players[i].model)
                .trace();
        REQUIRE(step.trace[i] == doctest::Approx(expect).epsilon(1e-12));
        if (step.action[i] == 0) REQUIRE(!step.arrived[i]);
      }
    }
  }
  // correlated policy records a signal, product policy does not
  CHECK(sim::run_once(cfg, 0, 0).steps[0].signal == -1);
  CHECK(sim::run_once(cfg, 1, 0).steps[0].signal >= 0);
}

TEST_CASE("aggregates are independent of the thread count") {
  auto cfg = benchmark_config(1030, 6, 11);  // crosses a chunk boundary
  auto serial = sim::monte_carlo(cfg, 1);
  auto parallel = sim::monte_carlo(cfg, 4);
  REQUIRE(serial.policies.size() == 2);
  bool identical = true;
  for (std::size_t p = 0; p < serial.policies.size(); ++p) {
    for (int i = 0; i < 3; ++i) {
      const auto& a = serial.policies[p].trace_stats[i];
      const auto& b = parallel.policies[p].trace_stats[i];
      for (int k = 0; k < cfg.horizon; ++k) {
        identical = identical && a.mean[k] == b.mean[k] &&
                    a.stderr_of_mean[k] == b.stderr_of_mean[k];
      }
    }
  }
  CHECK(identical);
  CHECK(serial.policies[0].runs == 1030);
}

TEST_CASE("aggregate expected power matches the policy") {
  auto cfg = benchmark_config(100, 5, 3);
  auto result = sim::monte_carlo(cfg, 2);
  const auto& sensors = benchmark_sensors();
  // product policy spends exactly the caps
  for (int i = 0; i < 3; ++i)
    CHECK(result.policies[0].expected_power[i] ==
          doctest::Approx(sensors[i].cap).epsilon(1e-9));
  // the overridden correlated policy spends (alpha + (n-1) beta) / n of top
  const double share = (0.75 + 2.0 * 0.25) / 3.0;
  for (int i = 0; i < 3; ++i)
    CHECK(result.policies[1].expected_power[i] ==
          doctest::Approx(share * sensors[i].top).epsilon(1e-9));
  // ce annotations expose both the override and the closed form
  const auto& notes = result.policies[1].annotations;
  CHECK(notes.at("alpha").get<double>() == 0.75);
  CHECK(notes.at("closed_form_alpha").get<double>() == 1.0);
  CHECK(notes.at("alpha_matches_closed_form").get<bool>() == false);
  CHECK(notes.at("beta_matches_closed_form").get<bool>() == true);
}

TEST_CASE("fixed all-bottom policy never delivers") {
  auto doc = base_doc();
  doc["runs"] = 50;
  doc["horizon"] = 8;
  doc["policies"] = {{{"kind", "fixed"},
                      {"name", "silent"},
                      {"profile", {{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}}}};
  auto cfg = config::parse_config(doc);
  auto game = cfg.build_game();
  auto result = sim::monte_carlo(cfg, 2);
  REQUIRE(result.policies.size() == 1);
  const auto& stats = result.policies[0].trace_stats;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < cfg.horizon; ++k) {
      const double expect =
          estimation::remote_error_covariance(
              {k + 1}, game.players[i].filter, game.players[i].model)
              .trace();
      CHECK(stats[i].mean[k] == doctest::Approx(expect).epsilon(1e-12));
      CHECK(stats[i].stderr_of_mean[k] == 0.0);
    }
    CHECK(result.policies[0].expected_power[i] == 0.0);
  }
}

TEST_CASE("full-state squared errors track the covariance traces") {
  auto cfg = benchmark_config(4000, 8, 17, true, true);
  auto result = sim::monte_carlo(cfg);
  CHECK(result.full_state);
  for (const auto& policy : result.policies) {
    REQUIRE(policy.sq_err_stats.size() == 3);
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < cfg.horizon; ++k) {
        const double mean_sq = policy.sq_err_stats[i].mean[k];
        const double se = policy.sq_err_stats[i].stderr_of_mean[k];
        const double mean_trace = policy.trace_stats[i].mean[k];
        REQUIRE(se > 0.0);
        CHECK(std::abs(mean_sq - mean_trace) <= 6.0 * se);
      }
    }
  }
}

TEST_CASE("full-state mode requires zero initial holding times") {
  auto doc = benchmark_config_json(100, 5, 1, true, true);
  doc["sensors"][0]["holding_time"] = 2;
  auto cfg = config::parse_config(doc);
  CHECK_THROWS_AS(sim::monte_carlo(cfg, 1), ConfigError);
}

TEST_CASE("result files and summary schema") {
  auto cfg = benchmark_config(200, 6, 23);
  auto result = sim::monte_carlo(cfg, 2);
  const fs::path dir = fresh_dir("emit");
  sim::emit_results(result, dir.string());

  std::ifstream csv(dir / "ne.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "step,sensor,mean_trace,stderr,runs");
  int rows = 0;
  std::string line;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 6 * 3);

  std::ifstream sj(dir / "summary.json");
  REQUIRE(sj.good());
  nlohmann::json summary = nlohmann::json::parse(sj);
  CHECK(summary.at("schema") == "remest-summary-v1");
  CHECK(summary.at("policies").size() == 2);
  CHECK(summary.at("gaps").size() == 1);
  const auto& gap = summary.at("gaps")[0];
  CHECK(gap.at("terminal_gap").size() == 3);
  CHECK(gap.at("gap_over_stderr").size() == 3);
  const auto& ce_entry = summary.at("policies")[1];
  CHECK(ce_entry.at("alpha") == 0.75);
  CHECK(ce_entry.at("closed_form_alpha") == 1.0);
  CHECK(ce_entry.at("alpha_matches_closed_form") == false);
  fs::remove_all(dir);
}

TEST_CASE("csv series match the aggregate in memory") {
  auto cfg = benchmark_config(150, 4, 29);
  auto result = sim::monte_carlo(cfg, 1);
  const fs::path dir = fresh_dir("series");
  sim::emit_results(result, dir.string());
  std::ifstream csv(dir / "ne.csv");
  std::string line;
  std::getline(csv, line);  // header
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    const int step = std::stoi(field);
    std::getline(ss, field, ',');
    const int sensor = std::stoi(field);
    std::getline(ss, field, ',');
    const double mean = std::stod(field);
    std::getline(ss, field, ',');
    const double se = std::stod(field);
    std::getline(ss, field, ',');
    const long long runs = std::stoll(field);
    CHECK(mean ==
          result.policies[0].trace_stats[sensor - 1].mean[step - 1]);
    CHECK(se == result.policies[0]
                    .trace_stats[sensor - 1]
                    .stderr_of_mean[step - 1]);
    CHECK(runs == 150);
  }
  fs::remove_all(dir);
}
