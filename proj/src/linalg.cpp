#include "remest/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "remest/errors.hpp"

namespace remest::linalg {

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

void require_symmetric(const Eigen::MatrixXd& m, const std::string& name,
                       double tol) {
  if (m.rows() == 0 || m.cols() == 0)
    throw ConfigError(name + " must be non-empty");
  if (m.rows() != m.cols())
    throw ConfigError(name + " must be square");
  if (!m.allFinite())
    throw ConfigError(name + " has non-finite entries");
  if (!is_symmetric(m, tol))
    throw ConfigError(name + " is not symmetric (tolerance " +
                      std::to_string(tol) + ")");
}

namespace {

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

void require_psd(const Eigen::MatrixXd& m, const std::string& name) {
  require_symmetric(m, name);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (min_eigenvalue(m) < -kSymmetryTol * scale)
    throw ConfigError(name + " is not positive semi-definite");
}

void require_pd(const Eigen::MatrixXd& m, const std::string& name) {
  require_symmetric(m, name);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (min_eigenvalue(m) <= kSymmetryTol * scale)
    throw ConfigError(name + " is not positive definite");
}

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m));
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    ev[i] = ev[i] > 0.0 ? std::sqrt(ev[i]) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace remest::linalg
