#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace asuq {

// Maps an original-space input to the values of every basis function.
using BasisFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// alpha_j = sum_i w_i f_i Phi_j(node_i) for an orthonormal basis.
Eigen::VectorXd project_coefficients(const Eigen::VectorXd& f_values,
                                     const Eigen::MatrixXd& basis_values,
                                     const Eigen::VectorXd& weights);

double pce_mean(const Eigen::VectorXd& alpha);
double pce_variance(const Eigen::VectorXd& alpha);

struct PceSurrogate {
  Eigen::VectorXd alpha;
  BasisFn basis;
  std::vector<std::string> labels;  // one multi-index label per coefficient

  double mean() const { return pce_mean(alpha); }
  double variance() const { return pce_variance(alpha); }
  double eval(const Eigen::VectorXd& u) const { return alpha.dot(basis(u)); }
};

}  // namespace asuq
