#include "asuq/nipc.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace asuq {

Eigen::VectorXd project_coefficients(const Eigen::VectorXd& f_values,
                                     const Eigen::MatrixXd& basis_values,
                                     const Eigen::VectorXd& weights) {
  if (f_values.size() != basis_values.rows() || f_values.size() != weights.size()) {
    throw std::invalid_argument("project_coefficients: shape mismatch");
  }
  for (Eigen::Index i = 0; i < f_values.size(); ++i) {
    if (!std::isfinite(f_values[i])) {
      throw std::runtime_error("project_coefficients: non-finite model value at node " +
                               std::to_string(i));
    }
  }
  return basis_values.transpose() * weights.cwiseProduct(f_values);
}

double pce_mean(const Eigen::VectorXd& alpha) {
  if (alpha.size() < 1) throw std::invalid_argument("pce_mean: empty coefficient vector");
  return alpha[0];
}

double pce_variance(const Eigen::VectorXd& alpha) {
  if (alpha.size() < 1) throw std::invalid_argument("pce_variance: empty coefficient vector");
  const double v = alpha.tail(alpha.size() - 1).squaredNorm();
  return std::max(v, 0.0);
}

}  // namespace asuq
