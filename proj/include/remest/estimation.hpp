#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace remest::estimation {

// Linear process observed by one sensor:
//   x(k+1) = a x(k) + w,  w ~ N(0, q)
//   y(k)   = c x(k) + v,  v ~ N(0, r)
struct ProcessModel {
  Eigen::MatrixXd a;
  Eigen::MatrixXd c;
  Eigen::MatrixXd q;
  Eigen::MatrixXd r;
  Eigen::MatrixXd initial_cov;

  ProcessModel(Eigen::MatrixXd a_in, Eigen::MatrixXd c_in,
               Eigen::MatrixXd q_in, Eigen::MatrixXd r_in,
               Eigen::MatrixXd initial_cov_in);

  int state_dim() const { return static_cast<int>(a.rows()); }
  int measurement_dim() const { return static_cast<int>(c.rows()); }
};

// Steady-state posterior error covariance of the local filter, i.e. the
// fixed point of the predict-then-update cycle P = update(predict(P)).
struct SteadyStateFilter {
  Eigen::MatrixXd p_bar;
  double residual = 0.0;  // sup-norm of cycle(p_bar) - p_bar
  int iterations = 0;
};

// Steps since the estimator last received a packet (0 on arrival).
struct HoldingTime {
  std::int64_t steps = 0;
};

struct KalmanState {
  Eigen::VectorXd x_hat;
  Eigen::MatrixXd p;
  Eigen::MatrixXd gain;  // gain applied in the step that produced this state
};

// Prediction map h(P) = a P a' + q.
Eigen::MatrixXd lyapunov_step(const Eigen::MatrixXd& p,
                              const ProcessModel& model);

// Measurement-update map g(P) = P - P c' (c P c' + r)^-1 c P.
Eigen::MatrixXd riccati_update(const Eigen::MatrixXd& p,
                               const ProcessModel& model);

// Iterates P <- g(h(P)) from initial_cov until the sup-norm residual
// drops below tol. Throws NumericError if max_iter is exhausted.
SteadyStateFilter steady_state_covariance(const ProcessModel& model,
                                          double tol = 1e-12,
                                          int max_iter = 100000);

// One full predict + update step of the local Kalman filter.
KalmanState local_kalman_step(const KalmanState& state,
                              const Eigen::VectorXd& measurement,
                              const ProcessModel& model);

// tau(k) = (1 - arrived) * (tau(k-1) + 1).
HoldingTime holding_time_update(HoldingTime tau, bool arrived);

// Remote estimator error covariance h^tau(p_bar).
Eigen::MatrixXd remote_error_covariance(HoldingTime tau,
                                        const SteadyStateFilter& filter,
                                        const ProcessModel& model);

// tr(p_bar) - tr(h^(tau+1)(p_bar)); the per-step value of a successful
// delivery given holding time tau. Non-positive for stable h.
double trace_gap(HoldingTime tau, const SteadyStateFilter& filter,
                 const ProcessModel& model);

}  // namespace remest::estimation
