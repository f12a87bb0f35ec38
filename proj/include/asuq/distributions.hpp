#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace asuq {

enum class MarginalKind { Normal, Uniform };

// One-dimensional input marginal. Standardized coordinates are N(0,1) for
// Normal marginals and U(-1,1) for Uniform ones; the map is affine,
// x = location + scale * z.
class Marginal {
 public:
  static Marginal normal(double mean, double stddev);
  static Marginal uniform(double lo, double hi);

  MarginalKind kind() const { return kind_; }
  double mean() const;
  double variance() const;
  double location() const;
  double scale() const;

  double pdf(double x) const;
  double standardize(double x) const;
  double destandardize(double z) const;
  bool in_support(double x) const;

  // Support bounds of the standardized variable (+-inf when unbounded).
  double std_lo() const;
  double std_hi() const;

 private:
  Marginal(MarginalKind kind, double a, double b);

  MarginalKind kind_;
  double a_;  // Normal: mean.   Uniform: lower bound.
  double b_;  // Normal: stddev. Uniform: upper bound.
};

// Independent product of marginals.
class RandomVector {
 public:
  explicit RandomVector(std::vector<Marginal> marginals);

  int dim() const { return static_cast<int>(marginals_.size()); }
  const Marginal& marginal(int i) const;
  bool all_normal() const;

  double pdf(const Eigen::VectorXd& u) const;
  bool in_support(const Eigen::VectorXd& u) const;
  Eigen::VectorXd standardize(const Eigen::VectorXd& u) const;
  Eigen::VectorXd destandardize(const Eigen::VectorXd& z) const;

  // n draws in original coordinates, one row per draw. A fixed seed
  // reproduces the exact same matrix.
  Eigen::MatrixXd sample(int n, std::uint64_t seed) const;

  // Marginals at the given positions, in the given order.
  RandomVector subset(const std::vector<int>& positions) const;

 private:
  std::vector<Marginal> marginals_;
};

}  // namespace asuq
