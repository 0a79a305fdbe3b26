#include "remest/simulator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>

#include "remest/errors.hpp"
#include "remest/linalg.hpp"
#include "remest/rng.hpp"

namespace remest::sim {

namespace {

constexpr long long kChunkRuns = 1024;
constexpr std::size_t kArrivalCacheLimit = 65536;

std::string kind_name(config::PolicySpec::Kind kind) {
  switch (kind) {
    case config::PolicySpec::Kind::ne:
      return "ne";
    case config::PolicySpec::Kind::ce:
      return "ce";
    case config::PolicySpec::Kind::fixed:
      return "fixed";
  }
  return "unknown";
}

struct ResolvedPolicy {
  config::PolicySpec spec;
  bool correlated = false;
  std::vector<std::vector<double>> product;  // per-player level probs
  game::CorrelationPolicy corr;
  nlohmann::ordered_json annotations;
  std::vector<double> expected_power;
};

struct FullStateModel {
  Eigen::MatrixXd a, c, gain, sqrt_q, sqrt_r, sqrt_init, sqrt_pbar;
  int state_dim = 0, measurement_dim = 0;
};

struct Precomp {
  const config::SimulationConfig* cfg = nullptr;
  std::unique_ptr<game::GameSpec> game;
  std::vector<int> shape;
  int num_sensors = 0;
  int horizon = 0;
  std::vector<std::vector<double>> trace_table;  // [sensor][tau]
  bool arrivals_cached = false;
  std::vector<double> arrival_cache;  // [flat * num_sensors + sensor]
  std::vector<ResolvedPolicy> policies;
  bool full_state = false;
  std::vector<FullStateModel> fs;
};

ResolvedPolicy resolve_policy(const config::PolicySpec& spec,
                              const game::GameSpec& g) {
  ResolvedPolicy out;
  out.spec = spec;
  out.annotations["name"] = spec.name;
  out.annotations["kind"] = kind_name(spec.kind);
  switch (spec.kind) {
    case config::PolicySpec::Kind::ne: {
      const game::MixedProfile profile =
          g.constrained() ? game::ne_constrained(g) : game::ne_unconstrained(g);
      out.product = profile.probs;
      out.expected_power = game::expected_power(profile, g);
      break;
    }
    case config::PolicySpec::Kind::ce: {
      if (g.constrained()) {
        const game::CorrelatedEquilibrium closed = game::ce_constrained(g);
        out.correlated = true;
        out.corr = spec.alpha ? game::CorrelationPolicy{*spec.alpha, *spec.beta}
                              : closed.policy;
        out.annotations["alpha"] = out.corr.alpha;
        out.annotations["beta"] = out.corr.beta;
        out.annotations["closed_form_alpha"] = closed.policy.alpha;
        out.annotations["closed_form_beta"] = closed.policy.beta;
        out.annotations["alpha_matches_closed_form"] =
            std::abs(out.corr.alpha - closed.policy.alpha) <= 1e-12;
        out.annotations["beta_matches_closed_form"] =
            std::abs(out.corr.beta - closed.policy.beta) <= 1e-12;
        out.annotations["cap_ratio"] = closed.cap_ratio;
        out.expected_power =
            game::expected_power(game::policy_joint_distribution(out.corr, g), g);
      } else if (spec.alpha) {
        out.correlated = true;
        out.corr = {*spec.alpha, *spec.beta};
        out.annotations["alpha"] = out.corr.alpha;
        out.annotations["beta"] = out.corr.beta;
        out.expected_power =
            game::expected_power(game::policy_joint_distribution(out.corr, g), g);
      } else {
        // Unconstrained correlated optimum: everyone at the top level.
        const game::MixedProfile profile = game::ne_unconstrained(g);
        out.product = profile.probs;
        out.annotations["closed_form"] = "all_top";
        out.expected_power = game::expected_power(profile, g);
      }
      break;
    }
    case config::PolicySpec::Kind::fixed: {
      game::MixedProfile profile(*spec.profile);
      profile.check_shape(g);
      out.product = profile.probs;
      out.expected_power = game::expected_power(profile, g);
      break;
    }
  }
  if (!out.correlated) {
    // Guard against degenerate rounding in user-supplied rows.
    for (auto& row : out.product) {
      double sum = 0.0;
      for (double v : row) sum += v;
      for (double& v : row) v /= sum;
    }
  }
  return out;
}

Precomp build_precomp(const config::SimulationConfig& cfg) {
  Precomp pre;
  pre.cfg = &cfg;
  pre.game = std::make_unique<game::GameSpec>(cfg.build_game());
  pre.shape = pre.game->shape();
  pre.num_sensors = pre.game->num_players();
  pre.horizon = cfg.horizon;
  pre.full_state = cfg.full_state;

  std::int64_t max_initial_holding = 0;
  for (const config::SensorConfig& s : cfg.sensors)
    max_initial_holding = std::max(max_initial_holding, s.holding_time);
  if (pre.full_state && max_initial_holding > 0)
    throw ConfigError(
        "full-state simulation requires all initial holding times to be 0");

  for (int i = 0; i < pre.num_sensors; ++i) {
    const auto& player = pre.game->players[static_cast<std::size_t>(i)];
    const std::int64_t tau_max =
        cfg.sensors[static_cast<std::size_t>(i)].holding_time + cfg.horizon;
    std::vector<double> traces;
    traces.reserve(static_cast<std::size_t>(tau_max) + 1);
    Eigen::MatrixXd p = player.filter.p_bar;
    traces.push_back(p.trace());
    for (std::int64_t t = 1; t <= tau_max; ++t) {
      p = estimation::lyapunov_step(p, player.model);
      traces.push_back(p.trace());
    }
    pre.trace_table.push_back(std::move(traces));
  }

  const std::size_t total = pre.game->joint_action_count();
  if (total <= kArrivalCacheLimit) {
    pre.arrivals_cached = true;
    pre.arrival_cache.resize(total * static_cast<std::size_t>(pre.num_sensors));
    std::vector<int> action(static_cast<std::size_t>(pre.num_sensors), 0);
    std::size_t flat = 0;
    do {
      const std::vector<double> powers = pre.game->powers_of(action);
      for (int i = 0; i < pre.num_sensors; ++i) {
        const double gamma = channel::sinr(i, powers, pre.game->channel);
        pre.arrival_cache[flat * static_cast<std::size_t>(pre.num_sensors) +
                          static_cast<std::size_t>(i)] =
            channel::arrival_probability(gamma, pre.game->ser_curve);
      }
      ++flat;
    } while (game::next_joint_action(action, pre.shape));
  }

  for (const config::PolicySpec& spec : cfg.policies)
    pre.policies.push_back(resolve_policy(spec, *pre.game));

  if (pre.full_state) {
    for (int i = 0; i < pre.num_sensors; ++i) {
      const auto& player = pre.game->players[static_cast<std::size_t>(i)];
      const estimation::ProcessModel& m = player.model;
      FullStateModel fs;
      fs.a = m.a;
      fs.c = m.c;
      fs.state_dim = m.state_dim();
      fs.measurement_dim = m.measurement_dim();
      const Eigen::MatrixXd prior =
          estimation::lyapunov_step(player.filter.p_bar, m);
      const Eigen::MatrixXd innovation =
          linalg::symmetrize(m.c * prior * m.c.transpose() + m.r);
      fs.gain = innovation.llt().solve(m.c * prior).transpose();
      fs.sqrt_q = linalg::sqrt_psd(m.q);
      fs.sqrt_r = linalg::sqrt_psd(m.r);
      fs.sqrt_init = linalg::sqrt_psd(m.initial_cov);
      fs.sqrt_pbar = linalg::sqrt_psd(player.filter.p_bar);
      pre.fs.push_back(std::move(fs));
    }
  }
  return pre;
}

Eigen::VectorXd draw_gaussians(rng::Stream& stream, int dim) {
  Eigen::VectorXd z(dim);
  for (int k = 0; k < dim; ++k) z[k] = stream.gaussian();
  return z;
}

// Core trajectory loop shared by run_once and the Monte Carlo
// aggregator; Sink receives every step in order.
template <typename Sink>
void simulate_run(const Precomp& pre, int policy_index, long long run_index,
                  Sink&& sink) {
  const config::SimulationConfig& cfg = *pre.cfg;
  const ResolvedPolicy& policy =
      pre.policies[static_cast<std::size_t>(policy_index)];
  rng::Stream stream(rng::derive_stream_seed(
      cfg.seed, static_cast<std::uint64_t>(policy_index),
      static_cast<std::uint64_t>(run_index)));
  const int n = pre.num_sensors;

  std::vector<std::int64_t> tau(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    tau[static_cast<std::size_t>(i)] =
        cfg.sensors[static_cast<std::size_t>(i)].holding_time;

  std::vector<Eigen::VectorXd> x, local, remote;
  if (pre.full_state) {
    x.resize(static_cast<std::size_t>(n));
    local.resize(static_cast<std::size_t>(n));
    remote.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const FullStateModel& fs = pre.fs[static_cast<std::size_t>(i)];
      const Eigen::VectorXd x0 =
          fs.sqrt_init * draw_gaussians(stream, fs.state_dim);
      const Eigen::VectorXd e0 =
          fs.sqrt_pbar * draw_gaussians(stream, fs.state_dim);
      x[static_cast<std::size_t>(i)] = x0;
      local[static_cast<std::size_t>(i)] = x0 - e0;
      remote[static_cast<std::size_t>(i)] = x0 - e0;
    }
  }

  std::vector<int> action(static_cast<std::size_t>(n), 0);
  std::vector<double> powers(static_cast<std::size_t>(n));
  std::vector<double> sinrs(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> arrived(static_cast<std::size_t>(n));
  std::vector<double> traces(static_cast<std::size_t>(n));
  std::vector<double> sq_err;
  if (pre.full_state) sq_err.resize(static_cast<std::size_t>(n));

  sink.begin_run();
  for (int k = 1; k <= pre.horizon; ++k) {
    int signal = -1;
    if (policy.correlated) {
      signal = stream.uniform_int(n);
      for (int j = 0; j < n; ++j) {
        const double top_prob =
            j == signal ? policy.corr.alpha : policy.corr.beta;
        action[static_cast<std::size_t>(j)] =
            stream.bernoulli(top_prob) ? pre.game->top_index(j) : 0;
      }
    } else {
      for (int i = 0; i < n; ++i) {
        const auto& row = policy.product[static_cast<std::size_t>(i)];
        const double u = stream.uniform01();
        double acc = 0.0;
        int chosen = static_cast<int>(row.size()) - 1;
        for (std::size_t lvl = 0; lvl < row.size(); ++lvl) {
          acc += row[lvl];
          if (u < acc) {
            chosen = static_cast<int>(lvl);
            break;
          }
        }
        action[static_cast<std::size_t>(i)] = chosen;
      }
    }

    std::size_t flat = 0;
    for (int i = 0; i < n; ++i) {
      powers[static_cast<std::size_t>(i)] =
          pre.game->action_sets[static_cast<std::size_t>(i)]
              [static_cast<std::size_t>(action[static_cast<std::size_t>(i)])];
      flat = flat * static_cast<std::size_t>(pre.shape[static_cast<std::size_t>(i)]) +
             static_cast<std::size_t>(action[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < n; ++i)
      sinrs[static_cast<std::size_t>(i)] =
          channel::sinr(i, powers, pre.game->channel);
    for (int i = 0; i < n; ++i) {
      const double p_arrival =
          pre.arrivals_cached
              ? pre.arrival_cache[flat * static_cast<std::size_t>(n) +
                                  static_cast<std::size_t>(i)]
              : channel::arrival_probability(sinrs[static_cast<std::size_t>(i)],
                                             pre.game->ser_curve);
      arrived[static_cast<std::size_t>(i)] = stream.bernoulli(p_arrival);
    }
    for (int i = 0; i < n; ++i) {
      auto& t = tau[static_cast<std::size_t>(i)];
      t = arrived[static_cast<std::size_t>(i)] ? 0 : t + 1;
      traces[static_cast<std::size_t>(i)] =
          pre.trace_table[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
    }
    if (pre.full_state) {
      for (int i = 0; i < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const FullStateModel& fs = pre.fs[si];
        const Eigen::VectorXd w =
            fs.sqrt_q * draw_gaussians(stream, fs.state_dim);
        const Eigen::VectorXd v =
            fs.sqrt_r * draw_gaussians(stream, fs.measurement_dim);
        x[si] = fs.a * x[si] + w;
        const Eigen::VectorXd y = fs.c * x[si] + v;
        const Eigen::VectorXd predicted = fs.a * local[si];
        local[si] = predicted + fs.gain * (y - fs.c * predicted);
        remote[si] = arrived[si] ? local[si]
                                 : Eigen::VectorXd(fs.a * remote[si]);
        sq_err[si] = (x[si] - remote[si]).squaredNorm();
      }
    }
    sink.step(k, signal, action, sinrs, arrived, tau, traces, sq_err);
  }
}

struct RecordingSink {
  RunTrace trace;
  void begin_run() {}
  void step(int k, int signal, const std::vector<int>& action,
            const std::vector<double>& sinrs,
            const std::vector<std::uint8_t>& arrived,
            const std::vector<std::int64_t>& tau,
            const std::vector<double>& traces,
            const std::vector<double>& sq_err) {
    StepRecord rec;
    rec.step = k;
    rec.signal = signal;
    rec.action = action;
    rec.sinr = sinrs;
    rec.arrived = arrived;
    rec.holding = tau;
    rec.trace = traces;
    rec.squared_error = sq_err;
    trace.steps.push_back(std::move(rec));
  }
};

// Streaming mean/variance per (step, sensor) cell; combined across
// chunks with the standard parallel update, so the fold result is
// independent of how runs were partitioned.
struct ChunkStats {
  long long count = 0;
  std::vector<double> mean, m2;

  explicit ChunkStats(std::size_t cells = 0)
      : mean(cells, 0.0), m2(cells, 0.0) {}

  void add(std::size_t cell, double value) {
    double& mu = mean[cell];
    const double delta = value - mu;
    mu += delta / static_cast<double>(count);
    m2[cell] += delta * (value - mu);
  }

  void combine(const ChunkStats& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double n = na + nb;
    for (std::size_t c = 0; c < mean.size(); ++c) {
      const double delta = other.mean[c] - mean[c];
      mean[c] += delta * nb / n;
      m2[c] += other.m2[c] + delta * delta * na * nb / n;
    }
    count += other.count;
  }
};

struct StatsSink {
  int num_sensors = 0;
  ChunkStats trace_stats;
  ChunkStats sq_stats;
  bool full_state = false;

  StatsSink(int horizon, int sensors, bool fs)
      : num_sensors(sensors),
        trace_stats(static_cast<std::size_t>(horizon) *
                    static_cast<std::size_t>(sensors)),
        sq_stats(fs ? static_cast<std::size_t>(horizon) *
                          static_cast<std::size_t>(sensors)
                    : 0),
        full_state(fs) {}

  void begin_run() {
    ++trace_stats.count;
    if (full_state) ++sq_stats.count;
  }

  void step(int k, int, const std::vector<int>&, const std::vector<double>&,
            const std::vector<std::uint8_t>&,
            const std::vector<std::int64_t>&, const std::vector<double>& traces,
            const std::vector<double>& sq_err) {
    const std::size_t base = static_cast<std::size_t>(k - 1) *
                             static_cast<std::size_t>(num_sensors);
    for (int i = 0; i < num_sensors; ++i)
      trace_stats.add(base + static_cast<std::size_t>(i),
                      traces[static_cast<std::size_t>(i)]);
    if (full_state)
      for (int i = 0; i < num_sensors; ++i)
        sq_stats.add(base + static_cast<std::size_t>(i),
                     sq_err[static_cast<std::size_t>(i)]);
  }
};

std::vector<SensorSeries> series_from(const ChunkStats& stats, int horizon,
                                      int sensors) {
  std::vector<SensorSeries> out(static_cast<std::size_t>(sensors));
  for (int i = 0; i < sensors; ++i) {
    auto& series = out[static_cast<std::size_t>(i)];
    series.mean.resize(static_cast<std::size_t>(horizon));
    series.stderr_of_mean.resize(static_cast<std::size_t>(horizon));
    for (int k = 0; k < horizon; ++k) {
      const std::size_t cell = static_cast<std::size_t>(k) *
                                   static_cast<std::size_t>(sensors) +
                               static_cast<std::size_t>(i);
      series.mean[static_cast<std::size_t>(k)] = stats.mean[cell];
      series.stderr_of_mean[static_cast<std::size_t>(k)] =
          stats.count >= 2
              ? std::sqrt(stats.m2[cell] /
                          (static_cast<double>(stats.count - 1) *
                           static_cast<double>(stats.count)))
              : 0.0;
    }
  }
  return out;
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char ch : name)
    out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' ||
            ch == '_')
               ? ch
               : '_';
  return out.empty() ? "policy" : out;
}

}  // namespace

RunTrace run_once(const config::SimulationConfig& cfg, int policy_index,
                  long long run_index) {
  if (policy_index < 0 ||
      policy_index >= static_cast<int>(cfg.policies.size()))
    throw ConfigError("policy index out of range");
  if (run_index < 0) throw ConfigError("run index must be non-negative");
  const Precomp pre = build_precomp(cfg);
  RecordingSink sink;
  simulate_run(pre, policy_index, run_index, sink);
  return std::move(sink.trace);
}

AggregateResult monte_carlo(const config::SimulationConfig& cfg, int threads) {
  if (threads < 0) throw ConfigError("thread count must be non-negative");
  const Precomp pre = build_precomp(cfg);
  const int num_policies = static_cast<int>(cfg.policies.size());
  if (num_policies == 0) throw ConfigError("config defines no policies");

  struct Task {
    int policy = 0;
    long long begin = 0, end = 0;
  };
  std::vector<Task> tasks;
  const long long chunks_per_policy =
      (cfg.runs + kChunkRuns - 1) / kChunkRuns;
  for (int p = 0; p < num_policies; ++p)
    for (long long c = 0; c < chunks_per_policy; ++c)
      tasks.push_back(
          {p, c * kChunkRuns, std::min(cfg.runs, (c + 1) * kChunkRuns)});

  std::vector<StatsSink> results(
      tasks.size(), StatsSink(pre.horizon, pre.num_sensors, pre.full_state));
  unsigned worker_count = threads == 0
                              ? std::max(1u, std::thread::hardware_concurrency())
                              : static_cast<unsigned>(threads);
  worker_count = std::min<unsigned>(
      worker_count, static_cast<unsigned>(tasks.size()));

  std::atomic<std::size_t> next_task{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next_task.fetch_add(1);
      if (t >= tasks.size() || failed.load()) return;
      try {
        for (long long r = tasks[t].begin; r < tasks[t].end; ++r)
          simulate_run(pre, tasks[t].policy, r, results[t]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  if (worker_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < worker_count; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  AggregateResult out;
  out.horizon = pre.horizon;
  out.full_state = pre.full_state;
  out.config_echo = config::config_echo(cfg);
  for (int p = 0; p < num_policies; ++p) {
    ChunkStats trace_total(static_cast<std::size_t>(pre.horizon) *
                           static_cast<std::size_t>(pre.num_sensors));
    ChunkStats sq_total(pre.full_state
                            ? static_cast<std::size_t>(pre.horizon) *
                                  static_cast<std::size_t>(pre.num_sensors)
                            : 0);
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (tasks[t].policy != p) continue;
      trace_total.combine(results[t].trace_stats);
      if (pre.full_state) sq_total.combine(results[t].sq_stats);
    }
    PolicyResult result;
    result.name = cfg.policies[static_cast<std::size_t>(p)].name;
    result.kind = cfg.policies[static_cast<std::size_t>(p)].kind;
    result.annotations =
        pre.policies[static_cast<std::size_t>(p)].annotations;
    result.runs = trace_total.count;
    result.expected_power =
        pre.policies[static_cast<std::size_t>(p)].expected_power;
    result.trace_stats =
        series_from(trace_total, pre.horizon, pre.num_sensors);
    if (pre.full_state)
      result.sq_err_stats = series_from(sq_total, pre.horizon, pre.num_sensors);
    out.policies.push_back(std::move(result));
  }
  return out;
}

nlohmann::ordered_json summary_json(const AggregateResult& result) {
  nlohmann::ordered_json doc;
  doc["schema"] = "remest-summary-v1";
  doc["config"] = result.config_echo;
  doc["policies"] = nlohmann::ordered_json::array();
  for (const PolicyResult& policy : result.policies) {
    nlohmann::ordered_json entry = policy.annotations;
    entry["runs"] = policy.runs;
    entry["expected_power"] = policy.expected_power;
    nlohmann::ordered_json terminal;
    terminal["step"] = result.horizon;
    nlohmann::ordered_json means = nlohmann::ordered_json::array();
    nlohmann::ordered_json errs = nlohmann::ordered_json::array();
    for (const SensorSeries& s : policy.trace_stats) {
      means.push_back(s.mean.back());
      errs.push_back(s.stderr_of_mean.back());
    }
    terminal["mean_trace"] = std::move(means);
    terminal["stderr"] = std::move(errs);
    entry["terminal"] = std::move(terminal);
    if (result.full_state && !policy.sq_err_stats.empty()) {
      nlohmann::ordered_json sq;
      nlohmann::ordered_json sq_means = nlohmann::ordered_json::array();
      nlohmann::ordered_json sq_errs = nlohmann::ordered_json::array();
      for (const SensorSeries& s : policy.sq_err_stats) {
        sq_means.push_back(s.mean.back());
        sq_errs.push_back(s.stderr_of_mean.back());
      }
      sq["mean_sq_err"] = std::move(sq_means);
      sq["stderr"] = std::move(sq_errs);
      entry["terminal_sq_err"] = std::move(sq);
    }
    doc["policies"].push_back(std::move(entry));
  }
  doc["gaps"] = nlohmann::ordered_json::array();
  for (const PolicyResult& ne : result.policies) {
    if (ne.kind != config::PolicySpec::Kind::ne) continue;
    for (const PolicyResult& ce : result.policies) {
      if (ce.kind != config::PolicySpec::Kind::ce) continue;
      nlohmann::ordered_json gap;
      gap["ne"] = ne.name;
      gap["ce"] = ce.name;
      nlohmann::ordered_json terminal = nlohmann::ordered_json::array();
      nlohmann::ordered_json stderrs = nlohmann::ordered_json::array();
      nlohmann::ordered_json ratio = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < ne.trace_stats.size(); ++i) {
        const double g = ne.trace_stats[i].mean.back() -
                         ce.trace_stats[i].mean.back();
        const double se =
            std::sqrt(std::pow(ne.trace_stats[i].stderr_of_mean.back(), 2) +
                      std::pow(ce.trace_stats[i].stderr_of_mean.back(), 2));
        terminal.push_back(g);
        stderrs.push_back(se);
        ratio.push_back(se > 0.0 ? g / se : 0.0);
      }
      gap["terminal_gap"] = std::move(terminal);
      gap["gap_stderr"] = std::move(stderrs);
      gap["gap_over_stderr"] = std::move(ratio);
      doc["gaps"].push_back(std::move(gap));
    }
  }
  return doc;
}

namespace {

void write_series_csv(const std::string& path, const char* value_column,
                      const std::vector<SensorSeries>& series, int horizon,
                      long long runs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << "step,sensor," << value_column << ",stderr,runs\n";
  char buf[64];
  for (int k = 0; k < horizon; ++k) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      out << (k + 1) << ',' << (i + 1) << ',';
      std::snprintf(buf, sizeof buf, "%.17g",
                    series[i].mean[static_cast<std::size_t>(k)]);
      out << buf << ',';
      std::snprintf(buf, sizeof buf, "%.17g",
                    series[i].stderr_of_mean[static_cast<std::size_t>(k)]);
      out << buf << ',' << runs << '\n';
    }
  }
  if (!out) throw IoError("failed while writing " + path);
}

}  // namespace

void emit_results(const AggregateResult& result, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
  for (const PolicyResult& policy : result.policies) {
    const std::string base =
        (std::filesystem::path(out_dir) / sanitize(policy.name)).string();
    write_series_csv(base + ".csv", "mean_trace", policy.trace_stats,
                     result.horizon, policy.runs);
    if (result.full_state && !policy.sq_err_stats.empty())
      write_series_csv(base + "_fullstate.csv", "mean_sq_err",
                       policy.sq_err_stats, result.horizon, policy.runs);
  }
  const std::string summary_path =
      (std::filesystem::path(out_dir) / "summary.json").string();
  std::ofstream out(summary_path);
  if (!out) throw IoError("cannot open output file: " + summary_path);
  out << summary_json(result).dump(2) << '\n';
  if (!out) throw IoError("failed while writing " + summary_path);
}

}  // namespace remest::sim
