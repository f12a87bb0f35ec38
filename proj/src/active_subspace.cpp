#include "asuq/active_subspace.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace asuq {

GradientFn finite_difference_gradient(ScalarFn f, const RandomVector& rv) {
  return [f = std::move(f), rv](const Eigen::VectorXd& u) {
    const int d = rv.dim();
    if (u.size() != d) throw std::invalid_argument("finite_difference_gradient: dimension mismatch");
    Eigen::VectorXd z = rv.standardize(u);
    Eigen::VectorXd grad(d);
    for (int i = 0; i < d; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(z[i]));
      Eigen::VectorXd zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      const double df = f(rv.destandardize(zp)) - f(rv.destandardize(zm));
      // d/du = (d/dz) / scale.
      grad[i] = df / (2.0 * h) / rv.marginal(i).scale();
    }
    return grad;
  };
}

Eigen::MatrixXd estimate_c_matrix(const GradientFn& grad_fn, const RandomVector& rv,
                                  int n, std::uint64_t seed) {
  const int d = rv.dim();
  if (n < 1) throw std::invalid_argument("estimate_c_matrix: n must be >= 1");
  if (n < d) {
    std::cerr << "estimate_c_matrix: n = " << n << " samples for a " << d
              << "-dimensional input; the estimate will be rank-deficient\n";
  }
  const Eigen::MatrixXd samples = rv.sample(n, seed);
  Eigen::VectorXd scales(d);
  for (int i = 0; i < d; ++i) scales[i] = rv.marginal(i).scale();

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
  for (int s = 0; s < n; ++s) {
    const Eigen::VectorXd g_std = grad_fn(samples.row(s)).cwiseProduct(scales);
    if (!g_std.allFinite()) {
      throw std::runtime_error("estimate_c_matrix: non-finite gradient at sample " +
                               std::to_string(s));
    }
    c.selfadjointView<Eigen::Lower>().rankUpdate(g_std, 1.0);
  }
  c /= static_cast<double>(n);
  c = c.selfadjointView<Eigen::Lower>();
  return c;
}

Eigen::MatrixXd ActiveSubspace::W1() const {
  if (m < 1) throw std::logic_error("ActiveSubspace: active dimension not set");
  return W.leftCols(m);
}

Eigen::MatrixXd ActiveSubspace::W2() const {
  if (m < 1) throw std::logic_error("ActiveSubspace: active dimension not set");
  return W.rightCols(W.cols() - m);
}

ActiveSubspace eigendecompose(const Eigen::MatrixXd& C) {
  if (C.rows() != C.cols()) throw std::invalid_argument("eigendecompose: matrix not square");
  const double scale = std::max(1.0, C.cwiseAbs().maxCoeff());
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("eigendecompose: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(C);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecompose: eigensolver failed");

  const int d = static_cast<int>(C.rows());
  ActiveSubspace as;
  as.eigenvalues = solver.eigenvalues().reverse();
  as.W = solver.eigenvectors().rowwise().reverse();

  const double floor = -1e-12 * std::max(1.0, as.eigenvalues.cwiseAbs().maxCoeff());
  for (int i = 0; i < d; ++i) {
    if (as.eigenvalues[i] < floor) {
      throw std::runtime_error("eigendecompose: eigenvalue " + std::to_string(as.eigenvalues[i]) +
                               " is negative beyond numerical noise");
    }
    if (as.eigenvalues[i] < 0.0) as.eigenvalues[i] = 0.0;
  }

  // Largest-magnitude entry of each eigenvector made positive, so W is
  // reproducible across eigensolver implementations.
  for (int j = 0; j < d; ++j) {
    int arg = 0;
    as.W.col(j).cwiseAbs().maxCoeff(&arg);
    if (as.W(arg, j) < 0.0) as.W.col(j) = -as.W.col(j);
  }
  return as;
}

DimPolicy DimPolicy::manual(int m) {
  DimPolicy p;
  p.kind = Kind::Manual;
  p.manual_m = m;
  return p;
}

DimPolicy DimPolicy::gap(double ratio_threshold) {
  DimPolicy p;
  p.kind = Kind::Gap;
  p.ratio_threshold = ratio_threshold;
  return p;
}

int choose_dim(const Eigen::VectorXd& eigenvalues, const DimPolicy& policy) {
  const int d = static_cast<int>(eigenvalues.size());
  if (d < 1) throw std::invalid_argument("choose_dim: empty eigenvalue vector");
  if (policy.kind == DimPolicy::Kind::Manual) {
    if (policy.manual_m < 1 || policy.manual_m > d) {
      throw std::invalid_argument("choose_dim: manual m = " + std::to_string(policy.manual_m) +
                                  " outside [1, " + std::to_string(d) + "]");
    }
    return policy.manual_m;
  }
  for (int m = 1; m < d; ++m) {
    if (eigenvalues[m] / eigenvalues[0] < policy.ratio_threshold) return m;
  }
  return d;
}

Eigen::VectorXd project_active(const ActiveSubspace& as, const RandomVector& rv,
                               const Eigen::VectorXd& u) {
  if (u.size() != as.W.rows() || rv.dim() != as.W.rows()) {
    throw std::invalid_argument("project_active: dimension mismatch");
  }
  return as.W1().transpose() * rv.standardize(u);
}

Eigen::VectorXd project_inactive(const ActiveSubspace& as, const RandomVector& rv,
                                 const Eigen::VectorXd& u) {
  if (u.size() != as.W.rows() || rv.dim() != as.W.rows()) {
    throw std::invalid_argument("project_inactive: dimension mismatch");
  }
  return as.W2().transpose() * rv.standardize(u);
}

}  // namespace asuq
