#include "remest/channel.hpp"

#include <algorithm>
#include <cmath>

#include "remest/errors.hpp"

namespace remest::channel {

ChannelParams::ChannelParams(std::vector<double> gains_in,
                             double spreading_gain_in, double noise_in)
    : gains(std::move(gains_in)),
      spreading_gain(spreading_gain_in),
      noise(noise_in) {
  if (gains.empty()) throw ConfigError("channel needs at least one sensor");
  for (double h : gains)
    if (!(h > 0.0) || !std::isfinite(h))
      throw ConfigError("channel gains must be positive and finite");
  if (!(spreading_gain > 0.0) || !std::isfinite(spreading_gain))
    throw ConfigError("spreading gain must be positive and finite");
  if (!(noise > 0.0) || !std::isfinite(noise))
    throw ConfigError("noise power must be positive and finite");
}

SerCurve SerCurve::from_table(
    std::vector<std::pair<double, double>> points) {
  if (points.size() < 2)
    throw ConfigError("SER table needs at least two points");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& [g, s] = points[k];
    if (!std::isfinite(g) || g < 0.0)
      throw ConfigError("SER table SINR values must be finite and >= 0");
    if (!std::isfinite(s) || s < 0.0 || s > 1.0)
      throw ConfigError("SER table values must lie in [0, 1]");
    if (k > 0) {
      if (g <= points[k - 1].first)
        throw ConfigError("SER table SINR values must be strictly ascending");
      if (s > points[k - 1].second)
        throw ConfigError("SER table must be non-increasing");
    }
  }
  SerCurve curve;
  curve.kind = Kind::table;
  curve.table = std::move(points);
  return curve;
}

double sinr(int i, std::span<const double> powers,
            const ChannelParams& params) {
  const int n = params.num_sensors();
  if (static_cast<int>(powers.size()) != n)
    throw ConfigError("power vector length does not match the channel");
  if (i < 0 || i >= n) throw ConfigError("sensor index out of range");
  double interference = params.noise;
  for (int j = 0; j < n; ++j) {
    const double p = powers[j];
    if (!(p >= 0.0) || !std::isfinite(p))
      throw ConfigError("transmit powers must be non-negative and finite");
    if (j != i) interference += params.gains[j] * p;
  }
  return params.spreading_gain * params.gains[i] * powers[i] / interference;
}

double gaussian_q(double x) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  return 0.5 * std::erfc(x * inv_sqrt2);
}

namespace {

double builtin_ser(double gamma) {
  if (gamma <= 0.0) return 1.0;
  if (gamma > 4.0) return 0.0;
  return 1.0 - 2.0 * gaussian_q(std::sqrt(4.0 / gamma - 1.0));
}

double table_ser(double gamma, const SerCurve& curve) {
  const auto& t = curve.table;
  if (gamma <= t.front().first) return t.front().second;
  if (gamma >= t.back().first) return t.back().second;
  auto hi = std::upper_bound(
      t.begin(), t.end(), gamma,
      [](double g, const std::pair<double, double>& p) { return g < p.first; });
  auto lo = hi - 1;
  const double w = (gamma - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

}  // namespace

double ser(double gamma, const SerCurve& curve) {
  if (!std::isfinite(gamma) || gamma < 0.0)
    throw ConfigError("SINR must be finite and >= 0");
  return curve.kind == SerCurve::Kind::builtin ? builtin_ser(gamma)
                                               : table_ser(gamma, curve);
}

bool sample_arrival(double gamma, const SerCurve& curve, rng::Stream& stream) {
  return stream.bernoulli(arrival_probability(gamma, curve));
}

}  // namespace remest::channel
