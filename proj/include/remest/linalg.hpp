#pragma once

#include <Eigen/Dense>
#include <string>

namespace remest::linalg {

// Symmetry tolerance used by all construction-time checks.
inline constexpr double kSymmetryTol = 1e-12;

bool is_symmetric(const Eigen::MatrixXd& m, double tol = kSymmetryTol);

// Throws ConfigError unless `m` is square and symmetric to within tol.
void require_symmetric(const Eigen::MatrixXd& m, const std::string& name,
                       double tol = kSymmetryTol);

// Throws ConfigError unless symmetric positive semi-definite
// (eigenvalues >= -tol * scale).
void require_psd(const Eigen::MatrixXd& m, const std::string& name);

// Throws ConfigError unless symmetric positive definite.
void require_pd(const Eigen::MatrixXd& m, const std::string& name);

// Symmetric square root of a PSD matrix (negative eigenvalues from
// roundoff are clamped to zero).
Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m);

// 0.5 * (m + m'); applied after operations that should preserve
// symmetry but accumulate roundoff.
inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace remest::linalg
