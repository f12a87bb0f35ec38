#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "asuq/distributions.hpp"

namespace asuq {

// Both operate in the original input space.
using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Central differences taken in standardized coordinates with step
// 1e-6 * max(1, |z_i|), mapped back to an original-space gradient.
GradientFn finite_difference_gradient(ScalarFn f, const RandomVector& rv);

// (1/n) sum g g^T over seeded samples, with g converted to standardized
// variables so eigenvalues are comparable across differently scaled inputs.
Eigen::MatrixXd estimate_c_matrix(const GradientFn& grad_fn, const RandomVector& rv,
                                  int n, std::uint64_t seed);

struct ActiveSubspace {
  Eigen::VectorXd eigenvalues;  // descending; tiny negatives clipped to 0
  Eigen::MatrixXd W;            // orthogonal; each column's largest entry positive
  int m = 0;                    // active dimension, 0 until chosen

  Eigen::MatrixXd W1() const;
  Eigen::MatrixXd W2() const;
};

// Full symmetric eigendecomposition of C; m is left unset.
ActiveSubspace eigendecompose(const Eigen::MatrixXd& C);

struct DimPolicy {
  enum class Kind { Manual, Gap };
  Kind kind = Kind::Gap;
  int manual_m = 0;
  double ratio_threshold = 1e-2;

  static DimPolicy manual(int m);
  static DimPolicy gap(double ratio_threshold = 1e-2);
};

// Gap policy: smallest m with lambda_{m+1}/lambda_1 < threshold, else d.
int choose_dim(const Eigen::VectorXd& eigenvalues, const DimPolicy& policy);

// W1^T standardize(u) and W2^T standardize(u).
Eigen::VectorXd project_active(const ActiveSubspace& as, const RandomVector& rv,
                               const Eigen::VectorXd& u);
Eigen::VectorXd project_inactive(const ActiveSubspace& as, const RandomVector& rv,
                                 const Eigen::VectorXd& u);

}  // namespace asuq
