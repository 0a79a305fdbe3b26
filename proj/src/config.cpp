#include "remest/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <utility>

#include "remest/errors.hpp"

namespace remest::config {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw ConfigError(where + " has unknown key \"" + key + "\"");
  for (const auto& key : required)
    if (!obj.count(key))
      throw ConfigError(where + " is missing required key \"" + key + "\"");
}

double number_at(const json& obj, const std::string& key,
                 const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

// Scalar or matrix (array of equal-length rows).
Eigen::MatrixXd matrix_at(const json& obj, const std::string& key,
                          const std::string& where) {
  const json& v = obj.at(key);
  if (v.is_number()) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = v.get<double>();
    return m;
  }
  if (!v.is_array() || v.empty() || !v[0].is_array())
    throw ConfigError(where + "." + key +
                      " must be a number or an array of rows");
  const std::size_t rows = v.size();
  const std::size_t cols = v[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!v[r].is_array() || v[r].size() != cols)
      throw ConfigError(where + "." + key + " rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!v[r][c].is_number())
        throw ConfigError(where + "." + key + " entries must be numbers");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          v[r][c].get<double>();
    }
  }
  return m;
}

SensorConfig parse_sensor(const json& obj, std::size_t index) {
  const std::string where = "sensors[" + std::to_string(index) + "]";
  require_keys(obj, where,
               {"a", "c", "q", "r", "initial_cov", "gain", "levels", "cap",
                "holding_time"},
               {"a", "c", "q", "r", "levels"});
  Eigen::MatrixXd a = matrix_at(obj, "a", where);
  Eigen::MatrixXd c = matrix_at(obj, "c", where);
  Eigen::MatrixXd q = matrix_at(obj, "q", where);
  Eigen::MatrixXd r = matrix_at(obj, "r", where);
  Eigen::MatrixXd initial =
      obj.count("initial_cov") ? matrix_at(obj, "initial_cov", where) : q;
  estimation::ProcessModel model(std::move(a), std::move(c), std::move(q),
                                 std::move(r), std::move(initial));

  const json& levels_json = obj.at("levels");
  if (!levels_json.is_array() || levels_json.empty())
    throw ConfigError(where + ".levels must be a non-empty array");
  std::vector<double> levels;
  for (const json& v : levels_json) {
    if (!v.is_number())
      throw ConfigError(where + ".levels entries must be numbers");
    levels.push_back(v.get<double>());
  }

  SensorConfig sensor{std::move(model), 1.0, std::move(levels), std::nullopt,
                      0};
  if (obj.count("gain")) sensor.gain = number_at(obj, "gain", where);
  if (obj.count("cap")) sensor.cap = number_at(obj, "cap", where);
  if (obj.count("holding_time")) {
    const json& v = obj.at("holding_time");
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
      throw ConfigError(where + ".holding_time must be a non-negative integer");
    sensor.holding_time = v.get<std::int64_t>();
  }
  return sensor;
}

PolicySpec parse_policy(const json& obj, std::size_t index) {
  const std::string where = "policies[" + std::to_string(index) + "]";
  require_keys(obj, where, {"kind", "name", "alpha", "beta", "profile"},
               {"kind"});
  PolicySpec policy;
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "ne") {
    policy.kind = PolicySpec::Kind::ne;
  } else if (kind == "ce" || kind == "ce_override") {
    policy.kind = PolicySpec::Kind::ce;
    if (kind == "ce_override" && (!obj.count("alpha") || !obj.count("beta")))
      throw ConfigError(where + ": ce_override requires alpha and beta");
  } else if (kind == "fixed") {
    policy.kind = PolicySpec::Kind::fixed;
  } else {
    throw ConfigError(where + ".kind must be ne, ce, ce_override or fixed");
  }
  policy.name = obj.count("name") ? obj.at("name").get<std::string>() : kind;
  if (obj.count("alpha")) {
    if (policy.kind != PolicySpec::Kind::ce)
      throw ConfigError(where + ": alpha only applies to ce policies");
    policy.alpha = number_at(obj, "alpha", where);
  }
  if (obj.count("beta")) {
    if (policy.kind != PolicySpec::Kind::ce)
      throw ConfigError(where + ": beta only applies to ce policies");
    policy.beta = number_at(obj, "beta", where);
  }
  if (policy.alpha.has_value() != policy.beta.has_value())
    throw ConfigError(where + ": alpha and beta must be given together");
  for (double v : {policy.alpha.value_or(0.0), policy.beta.value_or(0.0)})
    if (v < 0.0 || v > 1.0)
      throw ConfigError(where + ": alpha and beta must lie in [0, 1]");
  if (policy.kind == PolicySpec::Kind::fixed) {
    if (!obj.count("profile"))
      throw ConfigError(where + ": fixed policies require a profile");
    const json& rows = obj.at("profile");
    if (!rows.is_array() || rows.empty())
      throw ConfigError(where + ".profile must be an array of distributions");
    std::vector<std::vector<double>> profile;
    for (const json& row : rows) {
      if (!row.is_array())
        throw ConfigError(where + ".profile rows must be arrays");
      profile.emplace_back();
      for (const json& v : row) {
        if (!v.is_number())
          throw ConfigError(where + ".profile entries must be numbers");
        profile.back().push_back(v.get<double>());
      }
    }
    policy.profile = std::move(profile);
  } else if (obj.count("profile")) {
    throw ConfigError(where + ": profile only applies to fixed policies");
  }
  return policy;
}

}  // namespace

bool SimulationConfig::constrained() const {
  return !sensors.empty() && sensors.front().cap.has_value();
}

channel::ChannelParams SimulationConfig::channel_params() const {
  std::vector<double> gains;
  gains.reserve(sensors.size());
  for (const SensorConfig& s : sensors) gains.push_back(s.gain);
  return channel::ChannelParams(std::move(gains), spreading_gain, noise);
}

game::GameSpec SimulationConfig::build_game() const {
  std::vector<std::vector<double>> action_sets;
  std::optional<std::vector<double>> caps;
  std::vector<game::PlayerModel> players;
  std::vector<estimation::HoldingTime> holding;
  if (constrained()) caps.emplace();
  for (const SensorConfig& s : sensors) {
    action_sets.push_back(s.levels);
    if (caps) caps->push_back(*s.cap);
    players.push_back(
        {s.model, estimation::steady_state_covariance(s.model)});
    holding.push_back({s.holding_time});
  }
  return game::GameSpec(std::move(action_sets), std::move(caps),
                        channel_params(), ser, std::move(players),
                        std::move(holding));
}

SimulationConfig parse_config(const nlohmann::json& doc) {
  require_keys(doc, "config",
               {"sensors", "channel", "ser", "policies", "horizon", "runs",
                "seed", "full_state"},
               {"sensors", "channel"});
  SimulationConfig cfg;

  const json& sensors = doc.at("sensors");
  if (!sensors.is_array() || sensors.empty())
    throw ConfigError("config.sensors must be a non-empty array");
  for (std::size_t i = 0; i < sensors.size(); ++i)
    cfg.sensors.push_back(parse_sensor(sensors[i], i));
  const bool first_capped = cfg.sensors.front().cap.has_value();
  for (const SensorConfig& s : cfg.sensors)
    if (s.cap.has_value() != first_capped)
      throw ConfigError(
          "either every sensor or no sensor may define an energy cap");

  const json& ch = doc.at("channel");
  require_keys(ch, "channel", {"spreading_gain", "noise"},
               {"spreading_gain", "noise"});
  cfg.spreading_gain = number_at(ch, "spreading_gain", "channel");
  cfg.noise = number_at(ch, "noise", "channel");

  if (doc.count("ser")) {
    const json& ser = doc.at("ser");
    require_keys(ser, "ser", {"kind", "points"}, {"kind"});
    const std::string kind = ser.at("kind").get<std::string>();
    if (kind == "builtin") {
      cfg.ser = channel::SerCurve::builtin_bpsk();
    } else if (kind == "table") {
      if (!ser.count("points"))
        throw ConfigError("ser tables require a points array");
      std::vector<std::pair<double, double>> points;
      for (const json& p : ser.at("points")) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
            !p[1].is_number())
          throw ConfigError("ser.points entries must be [sinr, ser] pairs");
        points.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      cfg.ser = channel::SerCurve::from_table(std::move(points));
    } else {
      throw ConfigError("ser.kind must be builtin or table");
    }
  }

  if (doc.count("policies")) {
    const json& policies = doc.at("policies");
    if (!policies.is_array() || policies.empty())
      throw ConfigError("config.policies must be a non-empty array");
    for (std::size_t i = 0; i < policies.size(); ++i)
      cfg.policies.push_back(parse_policy(policies[i], i));
  } else {
    cfg.policies.push_back({PolicySpec::Kind::ne, "ne", {}, {}, {}});
    cfg.policies.push_back({PolicySpec::Kind::ce, "ce", {}, {}, {}});
  }
  std::set<std::string> names;
  for (PolicySpec& p : cfg.policies) {
    while (names.count(p.name)) p.name += "_";
    names.insert(p.name);
  }

  if (doc.count("horizon")) {
    if (!doc.at("horizon").is_number_integer() ||
        doc.at("horizon").get<int>() < 1)
      throw ConfigError("config.horizon must be a positive integer");
    cfg.horizon = doc.at("horizon").get<int>();
  }
  if (doc.count("runs")) {
    if (!doc.at("runs").is_number_integer() ||
        doc.at("runs").get<long long>() < 1)
      throw ConfigError("config.runs must be a positive integer");
    cfg.runs = doc.at("runs").get<long long>();
  }
  if (doc.count("seed")) {
    if (!doc.at("seed").is_number_integer())
      throw ConfigError("config.seed must be an integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.count("full_state")) {
    if (!doc.at("full_state").is_boolean())
      throw ConfigError("config.full_state must be a boolean");
    cfg.full_state = doc.at("full_state").get<bool>();
  }
  return cfg;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

nlohmann::ordered_json config_echo(const SimulationConfig& cfg) {
  nlohmann::ordered_json echo;
  echo["horizon"] = cfg.horizon;
  echo["runs"] = cfg.runs;
  echo["seed"] = cfg.seed;
  echo["full_state"] = cfg.full_state;
  echo["channel"] = {{"spreading_gain", cfg.spreading_gain},
                     {"noise", cfg.noise}};
  echo["ser"] =
      cfg.ser.kind == channel::SerCurve::Kind::builtin ? "builtin" : "table";
  echo["sensors"] = nlohmann::ordered_json::array();
  for (const SensorConfig& s : cfg.sensors) {
    nlohmann::ordered_json sensor;
    sensor["gain"] = s.gain;
    sensor["levels"] = s.levels;
    if (s.cap) sensor["cap"] = *s.cap;
    sensor["holding_time"] = s.holding_time;
    echo["sensors"].push_back(std::move(sensor));
  }
  return echo;
}

}  // namespace remest::config
