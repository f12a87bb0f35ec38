#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "asuq/active_subspace.hpp"
#include "asuq/distributions.hpp"
#include "asuq/whitening.hpp"

namespace asuq {

// Node budget for an m-dimensional degree-k rule: ceil(k^m / m) for m <= 2,
// ceil(0.9 (2m)^{k-1} / (k-1)!) above, floored at the size of the
// degree-floor((k-1)/2) basis and at 1.
std::int64_t node_count(int m, int k);

struct RuleFactor {
  std::vector<int> inputs;  // global uncertain-input indices, sorted
  Eigen::MatrixXd nodes;    // original input space, one row per factor node
  Eigen::VectorXd weights;
};

struct QuadratureRule {
  std::vector<int> inputs;  // global index of each node column
  Eigen::MatrixXd nodes;    // n x inputs.size(), original input space
  Eigen::VectorXd weights;  // strictly positive, sum 1
  double residual_norm = 0.0;
  std::vector<RuleFactor> factors;  // tensor structure when present
};

// Moment-matching residual over every basis row: r_j = sum_i w_i
// Phi_j(W1^T std(u_i)) - delta_{j0}.  Weights may be any sign here; the
// solver reparameterizes.
Eigen::VectorXd moment_residuals(const Eigen::MatrixXd& nodes, const Eigen::VectorXd& weights,
                                 const WhitenedBasis& basis, const Eigen::MatrixXd& W1,
                                 const RandomVector& rv);

struct SolveOptions {
  double tol = 1e-10;        // stop once the residual norm is below this
  int max_iters = 200;       // damped least-squares iterations per restart
  int restarts = 10;
  double accept_tol = 1e-8;  // best rule above this is an error
  std::uint64_t seed = 2026;
  bool fd_jacobian = false;  // finite-difference Jacobian, for cross-checks
};

// Damped least-squares fit of node coordinates (standardized space, bounded
// marginals squashed by tanh) and log-weights; multi-start keeps the best.
QuadratureRule solve_rule(const WhitenedBasis& basis, const Eigen::MatrixXd& W1,
                          const RandomVector& rv, std::int64_t n,
                          const SolveOptions& opts = {});

// Weighted sum of fn over the rule nodes.
double integrate(const QuadratureRule& rule, const ScalarFn& fn);

// Cartesian product of a core rule with per-input 1-D factors; weights
// multiply and factors are recorded for tensor-grid evaluation.
QuadratureRule tensor_product_rule(const QuadratureRule& core,
                                   const std::vector<RuleFactor>& sparse_factors);

}  // namespace asuq
