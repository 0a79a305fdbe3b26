#include "remest/estimation.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>
#include <utility>

#include "remest/errors.hpp"
#include "remest/linalg.hpp"

namespace remest::estimation {

ProcessModel::ProcessModel(Eigen::MatrixXd a_in, Eigen::MatrixXd c_in,
                           Eigen::MatrixXd q_in, Eigen::MatrixXd r_in,
                           Eigen::MatrixXd initial_cov_in)
    : a(std::move(a_in)),
      c(std::move(c_in)),
      q(std::move(q_in)),
      r(std::move(r_in)),
      initial_cov(std::move(initial_cov_in)) {
  if (a.rows() == 0 || a.rows() != a.cols())
    throw ConfigError("state matrix a must be square and non-empty");
  if (!a.allFinite()) throw ConfigError("state matrix a has non-finite entries");
  if (c.rows() == 0 || c.cols() != a.rows())
    throw ConfigError("measurement matrix c must have a.rows() columns");
  if (!c.allFinite())
    throw ConfigError("measurement matrix c has non-finite entries");
  linalg::require_psd(q, "process noise covariance q");
  if (q.rows() != a.rows())
    throw ConfigError("q must match the state dimension");
  linalg::require_pd(r, "measurement noise covariance r");
  if (r.rows() != c.rows())
    throw ConfigError("r must match the measurement dimension");
  linalg::require_psd(initial_cov, "initial covariance");
  if (initial_cov.rows() != a.rows())
    throw ConfigError("initial covariance must match the state dimension");
}

Eigen::MatrixXd lyapunov_step(const Eigen::MatrixXd& p,
                              const ProcessModel& model) {
  if (p.rows() != model.a.rows() || p.cols() != model.a.rows())
    throw ConfigError("covariance dimension does not match the model");
  return linalg::symmetrize(model.a * p * model.a.transpose() + model.q);
}

namespace {

// Shared by riccati_update and local_kalman_step: innovation covariance
// and gain for a prior covariance.
struct UpdateTerms {
  Eigen::MatrixXd gain;
  Eigen::MatrixXd posterior;
};

UpdateTerms measurement_update(const Eigen::MatrixXd& prior,
                               const ProcessModel& model) {
  const Eigen::MatrixXd innovation_cov =
      linalg::symmetrize(model.c * prior * model.c.transpose() + model.r);
  Eigen::LLT<Eigen::MatrixXd> llt(innovation_cov);
  if (llt.info() != Eigen::Success)
    throw NumericError("innovation covariance is not positive definite");
  const Eigen::MatrixXd gain =
      llt.solve(model.c * prior).transpose();  // prior c' (c prior c' + r)^-1
  Eigen::MatrixXd posterior =
      linalg::symmetrize(prior - gain * model.c * prior);
  if (!posterior.allFinite())
    throw NumericError("measurement update produced non-finite covariance");
  return {gain, std::move(posterior)};
}

}  // namespace

Eigen::MatrixXd riccati_update(const Eigen::MatrixXd& p,
                               const ProcessModel& model) {
  if (p.rows() != model.a.rows() || p.cols() != model.a.rows())
    throw ConfigError("covariance dimension does not match the model");
  return measurement_update(p, model).posterior;
}

SteadyStateFilter steady_state_covariance(const ProcessModel& model,
                                          double tol, int max_iter) {
  if (tol <= 0.0) throw ConfigError("tolerance must be positive");
  if (max_iter <= 0) throw ConfigError("max_iter must be positive");
  Eigen::MatrixXd p = model.initial_cov;
  double residual = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXd next = riccati_update(lyapunov_step(p, model), model);
    residual = (next - p).cwiseAbs().maxCoeff();
    p = std::move(next);
    if (residual <= tol) {
      // Report the invariant quantity at the returned point.
      const Eigen::MatrixXd cycled =
          riccati_update(lyapunov_step(p, model), model);
      return {p, (cycled - p).cwiseAbs().maxCoeff(), it};
    }
  }
  throw NumericError(
      "steady-state covariance iteration did not converge (residual " +
      std::to_string(residual) + " after " + std::to_string(max_iter) +
      " iterations)");
}

KalmanState local_kalman_step(const KalmanState& state,
                              const Eigen::VectorXd& measurement,
                              const ProcessModel& model) {
  if (state.x_hat.size() != model.a.rows())
    throw ConfigError("state estimate dimension does not match the model");
  if (measurement.size() != model.c.rows())
    throw ConfigError("measurement dimension does not match the model");
  const Eigen::VectorXd x_pred = model.a * state.x_hat;
  const Eigen::MatrixXd p_pred = lyapunov_step(state.p, model);
  UpdateTerms terms = measurement_update(p_pred, model);
  KalmanState next;
  next.x_hat = x_pred + terms.gain * (measurement - model.c * x_pred);
  next.p = std::move(terms.posterior);
  next.gain = std::move(terms.gain);
  return next;
}

HoldingTime holding_time_update(HoldingTime tau, bool arrived) {
  if (tau.steps < 0) throw ConfigError("holding time must be non-negative");
  return {arrived ? 0 : tau.steps + 1};
}

Eigen::MatrixXd remote_error_covariance(HoldingTime tau,
                                        const SteadyStateFilter& filter,
                                        const ProcessModel& model) {
  if (tau.steps < 0) throw ConfigError("holding time must be non-negative");
  Eigen::MatrixXd p = filter.p_bar;
  for (std::int64_t t = 0; t < tau.steps; ++t) p = lyapunov_step(p, model);
  return p;
}

double trace_gap(HoldingTime tau, const SteadyStateFilter& filter,
                 const ProcessModel& model) {
  const Eigen::MatrixXd reached =
      remote_error_covariance({tau.steps + 1}, filter, model);
  return filter.p_bar.trace() - reached.trace();
}

}  // namespace remest::estimation
