#pragma once

#include <span>
#include <utility>
#include <vector>

#include "remest/rng.hpp"

namespace remest::channel {

// Shared interference channel: receiver-side gains, DS-CDMA spreading
// gain and additive noise power.
struct ChannelParams {
  std::vector<double> gains;  // h_i > 0, one per sensor
  double spreading_gain;      // L > 0
  double noise;               // sigma^2 > 0

  ChannelParams(std::vector<double> gains_in, double spreading_gain_in,
                double noise_in);

  int num_sensors() const { return static_cast<int>(gains.size()); }
};

// Symbol-error-rate curve. The built-in curve models BPSK with matched
// filtering at low SINR:
//   f(0) = 1,  f(g) = 1 - 2 Q(sqrt(4/g - 1)) for 0 < g <= 4,  f(g) = 0
//   for g > 4,
// continuous and non-increasing. A user table is interpolated linearly
// and clamped at both ends.
struct SerCurve {
  enum class Kind { builtin, table };

  Kind kind = Kind::builtin;
  std::vector<std::pair<double, double>> table;  // (sinr, ser), ascending

  static SerCurve builtin_bpsk() { return SerCurve{}; }
  static SerCurve from_table(std::vector<std::pair<double, double>> points);
};

// SINR of sensor i under transmit powers a:
//   L h_i a_i / (sum_{j != i} h_j a_j + sigma^2).
double sinr(int i, std::span<const double> powers, const ChannelParams& params);

// Gaussian tail Q(x) = P(N(0,1) > x).
double gaussian_q(double x);

double ser(double gamma, const SerCurve& curve);

inline double arrival_probability(double gamma, const SerCurve& curve) {
  return 1.0 - ser(gamma, curve);
}

// Bernoulli packet-arrival draw with success probability 1 - ser(gamma).
bool sample_arrival(double gamma, const SerCurve& curve, rng::Stream& stream);

}  // namespace remest::channel
