#include "remest/api.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "remest/errors.hpp"
#include "remest/oracle.hpp"
#include "remest/simulator.hpp"

namespace remest::api {

namespace {

using nlohmann::ordered_json;

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json joint_json(const game::JointDistribution& dist) {
  ordered_json j;
  j["shape"] = dist.shape;
  j["probs"] = dist.probs;
  return j;
}

std::vector<double> utilities_of(const game::JointDistribution& dist,
                                 const game::GameSpec& g) {
  std::vector<double> out;
  for (int i = 0; i < g.num_players(); ++i)
    out.push_back(game::expected_utility(i, dist, g));
  return out;
}

// Closed-form-vs-configured annotations for every ce policy in the
// config; makes a mismatch between a configured (alpha, beta) and the
// solver's closed form visible in reports.
ordered_json policy_annotations(const config::SimulationConfig& cfg,
                                const game::CorrelationPolicy& closed) {
  ordered_json out = ordered_json::array();
  for (const config::PolicySpec& p : cfg.policies) {
    if (p.kind != config::PolicySpec::Kind::ce) continue;
    ordered_json entry;
    entry["name"] = p.name;
    entry["alpha"] = p.alpha.value_or(closed.alpha);
    entry["beta"] = p.beta.value_or(closed.beta);
    entry["closed_form_alpha"] = closed.alpha;
    entry["closed_form_beta"] = closed.beta;
    entry["alpha_matches_closed_form"] =
        std::abs(entry["alpha"].get<double>() - closed.alpha) <= 1e-12;
    entry["beta_matches_closed_form"] =
        std::abs(entry["beta"].get<double>() - closed.beta) <= 1e-12;
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace

ordered_json steady_state_report(const config::SimulationConfig& cfg) {
  ordered_json doc;
  doc["sensors"] = ordered_json::array();
  for (const config::SensorConfig& s : cfg.sensors) {
    const estimation::SteadyStateFilter filter =
        estimation::steady_state_covariance(s.model);
    ordered_json entry;
    entry["p_bar"] = matrix_json(filter.p_bar);
    entry["trace"] = filter.p_bar.trace();
    entry["residual"] = filter.residual;
    entry["iterations"] = filter.iterations;
    doc["sensors"].push_back(std::move(entry));
  }
  return doc;
}

ordered_json equilibrium_report(const config::SimulationConfig& cfg,
                                const std::string& kind, bool constrained) {
  if (kind != "ne" && kind != "ce")
    throw ConfigError("equilibrium kind must be ne or ce");
  if (constrained && !cfg.constrained())
    throw ConfigError(
        "--constrained was given but the config defines no energy caps");
  if (!constrained && cfg.constrained())
    throw ConfigError(
        "the config defines energy caps; pass --constrained (the "
        "unconstrained solution would ignore them)");
  const game::GameSpec g = cfg.build_game();
  ordered_json doc;
  if (kind == "ne") {
    const game::MixedProfile profile =
        constrained ? game::ne_constrained(g) : game::ne_unconstrained(g);
    doc["kind"] = constrained ? "ne_constrained" : "ne";
    doc["profile"] = profile.probs;
    doc["expected_power"] = game::expected_power(profile, g);
    try {
      doc["utilities"] =
          utilities_of(game::product_distribution(profile), g);
    } catch (const CapacityError&) {
      doc["utilities"] = nullptr;
    }
  } else if (constrained) {
    const game::CorrelatedEquilibrium eq = game::ce_constrained(g);
    doc["kind"] = "ce_constrained";
    doc["alpha"] = eq.policy.alpha;
    doc["beta"] = eq.policy.beta;
    doc["cap_ratio"] = eq.cap_ratio;
    doc["expected_power"] = eq.expected_power;
    doc["joint"] = joint_json(eq.joint);
    try {
      doc["utilities"] = utilities_of(eq.joint, g);
    } catch (const CapacityError&) {
      doc["utilities"] = nullptr;
    }
    doc["config_policies"] = policy_annotations(cfg, eq.policy);
  } else {
    const game::JointDistribution joint = game::ce_unconstrained(g);
    doc["kind"] = "ce";
    doc["joint"] = joint_json(joint);
    doc["expected_power"] = game::expected_power(joint, g);
    try {
      doc["utilities"] = utilities_of(joint, g);
    } catch (const CapacityError&) {
      doc["utilities"] = nullptr;
    }
  }
  return doc;
}

ordered_json verify_report(const config::SimulationConfig& cfg,
                           const std::string& kind, bool with_lp) {
  if (kind != "ne" && kind != "ce")
    throw ConfigError("verify kind must be ne or ce");
  const game::GameSpec g = cfg.build_game();
  const bool constrained = g.constrained();
  ordered_json doc;
  doc["kind"] = kind;
  doc["constrained"] = constrained;
  doc["tolerance"] = kVerifyTol;
  bool passed = false;
  if (kind == "ne") {
    const game::MixedProfile profile =
        constrained ? game::ne_constrained(g) : game::ne_unconstrained(g);
    const oracle::NeReport report = oracle::check_ne(profile, g, kVerifyTol);
    passed = report.max_gain <= kVerifyTol;
    doc["max_gain"] = report.max_gain;
    doc["utilities"] = report.utilities;
    if (report.witness) {
      doc["witness"] = {{"player", report.witness->player},
                        {"from_level", report.witness->from_level},
                        {"to_level", report.witness->to_level}};
    }
  } else {
    const game::JointDistribution joint =
        constrained ? game::ce_constrained(g).joint : game::ce_unconstrained(g);
    const oracle::CeReport report = oracle::check_ce(joint, g, kVerifyTol);
    passed = report.min_slack >= -kVerifyTol;
    doc["min_slack"] = report.min_slack;
    doc["utilities"] = report.utilities;
    if (report.worst) {
      doc["worst"] = {{"player", report.worst->player},
                      {"recommended", report.worst->recommended},
                      {"transition", report.worst->transition}};
    }
    if (report.zero_support_min_slack)
      doc["zero_support_min_slack"] = *report.zero_support_min_slack;
  }
  doc["passed"] = passed;

  if (with_lp) {
    const game::JointDistribution lp_dist = oracle::solve_ce_lp(g);
    const oracle::CeReport lp_check = oracle::check_ce(lp_dist, g, kVerifyTol);
    ordered_json lp;
    lp["joint"] = joint_json(lp_dist);
    lp["min_slack"] = lp_check.min_slack;
    lp["passed"] = lp_check.min_slack >= -kVerifyTol;
    lp["utilities"] = lp_check.utilities;
    if (constrained) {
      const oracle::NeReport fallback =
          oracle::check_ne(game::ne_constrained(g), g, kVerifyTol);
      lp["ne_utilities"] = fallback.utilities;
      ordered_json margins = ordered_json::array();
      double min_margin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < fallback.utilities.size(); ++i) {
        const double m = lp_check.utilities[i] - fallback.utilities[i];
        margins.push_back(m);
        min_margin = std::min(min_margin, m);
      }
      lp["margins_vs_ne"] = std::move(margins);
      lp["min_margin_vs_ne"] = min_margin;
    } else {
      bool all_max = true;
      const std::size_t last = lp_dist.size() - 1;
      for (std::size_t k = 0; k < lp_dist.size(); ++k) {
        const double expect = k == last ? 1.0 : 0.0;
        if (lp_dist.probs[k] != expect) all_max = false;
      }
      lp["all_max_exact"] = all_max;
    }
    doc["lp"] = std::move(lp);
  }
  return doc;
}

ordered_json simulate_report(const config::SimulationConfig& cfg,
                             const std::string& out_dir, int threads) {
  const sim::AggregateResult result = sim::monte_carlo(cfg, threads);
  sim::emit_results(result, out_dir);
  return sim::summary_json(result);
}

}  // namespace remest::api
