#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "asuq/distributions.hpp"

namespace asuq {

enum class UnivariateFamily { HermiteProbabilists, Legendre };

// Family whose weight function matches the standardized marginal.
UnivariateFamily family_for(MarginalKind kind);

// binomial(d+p, p), the size of a total-degree-p basis in d variables.
std::int64_t num_terms(int d, int p);

// Unnormalized value by three-term recurrence (He_n or P_n).
double eval_unnormalized(UnivariateFamily fam, int degree, double x);

// L2 norm of the unnormalized polynomial under the standardized density.
double family_norm(UnivariateFamily fam, int degree);

// Orthonormal value: eval_unnormalized / family_norm.
double eval_orthonormal(UnivariateFamily fam, int degree, double x);

// Derivative of the orthonormal polynomial.
double eval_orthonormal_deriv(UnivariateFamily fam, int degree, double x);

struct GaussRule {
  Eigen::VectorXd nodes;    // ascending, in the standardized variable
  Eigen::VectorXd weights;  // positive, sum to 1
};

// k-node Gauss rule for the family's probability weight, exact through
// degree 2k-1.  1 <= k <= 50.
GaussRule gauss_rule(UnivariateFamily fam, int k);

// All multi-indices with total degree <= p, in a fixed graded order:
// by total degree, then by max exponent, then reverse-lexicographic.
class MultiIndexSet {
 public:
  MultiIndexSet(int d, int p);

  int dim() const { return d_; }
  int max_total_degree() const { return p_; }
  std::int64_t size() const { return static_cast<std::int64_t>(indices_.size()); }
  const std::vector<int>& operator[](std::int64_t i) const { return indices_[static_cast<std::size_t>(i)]; }

  // Position of a multi-index in the set, or -1 if absent.
  std::int64_t find(const std::vector<int>& index) const;

 private:
  int d_;
  int p_;
  std::vector<std::vector<int>> indices_;
};

// Monomials prod_j u_j^{i_j} over the given index set; entry 0 is 1.
Eigen::VectorXd monomial_vector(const MultiIndexSet& set, const Eigen::VectorXd& u);
Eigen::VectorXd monomial_vector(const Eigen::VectorXd& u, int k);

// d/du_axis of monomial_vector.
Eigen::VectorXd monomial_vector_deriv(const MultiIndexSet& set, const Eigen::VectorXd& u, int axis);
Eigen::VectorXd monomial_vector_deriv(const Eigen::VectorXd& u, int k, int axis);

// Phi_i(u) = prod_j phi^{(fam_j)}_{i_j}(u_j) for every index in the set.
Eigen::VectorXd tensor_basis_eval(const MultiIndexSet& set,
                                  const std::vector<UnivariateFamily>& families,
                                  const Eigen::VectorXd& u);

}  // namespace asuq
