#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "asuq/distributions.hpp"
#include "asuq/orthopoly.hpp"

namespace asuq {

enum class GramEstimator { Auto, TensorGauss, MonteCarlo };

struct GramOptions {
  GramEstimator estimator = GramEstimator::Auto;  // Auto: tensor Gauss for d <= 4, else MC
  int nodes_per_dim = 0;                          // 0 picks k + 1 (exact for the integrand)
  std::int64_t mc_samples = 0;                    // 0 picks max(1e6, 10 (q+1)^2)
  std::uint64_t seed = 2026;
};

// G = E[ P_k(W1^T z) P_k(W1^T z)^T ] over the standardized input z.
Eigen::MatrixXd compute_gram(const Eigen::MatrixXd& W1, const RandomVector& rv, int k,
                             const GramOptions& opts = {});

// M = Q^{-1} from the Cholesky factorization G = Q Q^T; M G M^T = I.
Eigen::MatrixXd whiten(const Eigen::MatrixXd& G);

enum class BasisSource { Whitened, HermiteFastPath };

// Orthonormal polynomial basis of the active variables: Phi(t) = M P_k(t),
// with M lower triangular over the graded monomial order.
struct WhitenedBasis {
  int m;
  int k;
  MultiIndexSet set;  // multi_index_set(m, k)
  Eigen::MatrixXd M;
  BasisSource source;

  Eigen::VectorXd eval(const Eigen::VectorXd& u_tilde) const;
  // d eval / d u_tilde, shape (q+1) x m.
  Eigen::MatrixXd eval_jacobian(const Eigen::VectorXd& u_tilde) const;
  // Leading block of total degree <= p; valid because the order is graded.
  WhitenedBasis truncated(int p) const;
};

WhitenedBasis build_whitened_basis(const Eigen::MatrixXd& W1, const RandomVector& rv, int k,
                                   const GramOptions& opts = {});

// Analytic M from normalized probabilists' Hermite coefficients; requires
// every marginal Normal (W1's orthonormal columns then make the projection
// standard normal).
WhitenedBasis hermite_fast_path(const RandomVector& rv, int m, int k);

// Fast path when all marginals are Normal, the whitened path otherwise.
WhitenedBasis make_basis(const Eigen::MatrixXd& W1, const RandomVector& rv, int k,
                         const GramOptions& opts = {});

}  // namespace asuq
