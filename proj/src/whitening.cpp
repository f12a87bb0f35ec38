#include "asuq/whitening.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace asuq {

namespace {

Eigen::MatrixXd gram_tensor_gauss(const Eigen::MatrixXd& W1, const RandomVector& rv, int k,
                                  int nodes_per_dim) {
  const int d = rv.dim();
  const int m = static_cast<int>(W1.cols());
  const MultiIndexSet set(m, k);
  const std::int64_t q1 = set.size();

  std::vector<GaussRule> rules;
  rules.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    rules.push_back(gauss_rule(family_for(rv.marginal(i).kind()), nodes_per_dim));
  }

  // Full product rule in the standardized space; every Gram entry is a
  // polynomial of degree <= 2k in z, so nodes_per_dim >= k + 1 is exact.
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(q1, q1);
  std::vector<int> coord(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd z(d);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      z[i] = rules[static_cast<std::size_t>(i)].nodes[coord[static_cast<std::size_t>(i)]];
      w *= rules[static_cast<std::size_t>(i)].weights[coord[static_cast<std::size_t>(i)]];
    }
    const Eigen::VectorXd p = monomial_vector(set, W1.transpose() * z);
    g.selfadjointView<Eigen::Lower>().rankUpdate(p, w);

    int pos = d - 1;
    while (pos >= 0 && coord[static_cast<std::size_t>(pos)] + 1 == nodes_per_dim) {
      coord[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++coord[static_cast<std::size_t>(pos)];
  }
  return g.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd gram_monte_carlo(const Eigen::MatrixXd& W1, const RandomVector& rv, int k,
                                 std::int64_t n, std::uint64_t seed) {
  const int d = rv.dim();
  const int m = static_cast<int>(W1.cols());
  const MultiIndexSet set(m, k);
  const std::int64_t q1 = set.size();

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(q1, q1);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::VectorXd z(d);
  for (std::int64_t s = 0; s < n; ++s) {
    for (int i = 0; i < d; ++i) {
      z[i] = rv.marginal(i).kind() == MarginalKind::Normal ? normal(rng) : uniform(rng);
    }
    const Eigen::VectorXd p = monomial_vector(set, W1.transpose() * z);
    g.selfadjointView<Eigen::Lower>().rankUpdate(p, 1.0);
  }
  g /= static_cast<double>(n);
  return g.selfadjointView<Eigen::Lower>();
}

}  // namespace

Eigen::MatrixXd compute_gram(const Eigen::MatrixXd& W1, const RandomVector& rv, int k,
                             const GramOptions& opts) {
  const int d = rv.dim();
  if (W1.rows() != d) throw std::invalid_argument("compute_gram: W1 rows must match input dimension");
  if (k < 0) throw std::invalid_argument("compute_gram: negative degree");
  const int m = static_cast<int>(W1.cols());
  const std::int64_t q1 = num_terms(m, k);

  GramEstimator which = opts.estimator;
  if (which == GramEstimator::Auto) {
    which = d <= 4 ? GramEstimator::TensorGauss : GramEstimator::MonteCarlo;
  }

  Eigen::MatrixXd g;
  if (which == GramEstimator::TensorGauss) {
    const int nodes = opts.nodes_per_dim > 0 ? opts.nodes_per_dim : k + 1;
    g = gram_tensor_gauss(W1, rv, k, nodes);
  } else {
    const std::int64_t floor = 10 * q1 * q1;
    std::int64_t n = opts.mc_samples;
    if (n == 0) n = std::max<std::int64_t>(1000000, floor);
    if (n < floor) {
      throw std::invalid_argument("compute_gram: Monte Carlo needs at least " +
                                  std::to_string(floor) + " samples for this basis size");
    }
    g = gram_monte_carlo(W1, rv, k, n, opts.seed);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g);
  if (solver.eigenvalues().minCoeff() <= 1e-12) {
    throw std::runtime_error(
        "compute_gram: Gram matrix is numerically indefinite; increase the sample "
        "count or reduce the basis degree");
  }
  return g;
}

Eigen::MatrixXd whiten(const Eigen::MatrixXd& G) {
  if (G.rows() != G.cols()) throw std::invalid_argument("whiten: matrix not square");
  const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("whiten: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(G);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (lo <= 1e-12 || hi / lo > 1e12) {
    throw std::runtime_error(
        "whiten: Gram matrix is singular or ill-conditioned; increase the sample "
        "count or reduce the basis degree");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("whiten: Cholesky factorization failed");
  }
  const std::int64_t n = G.rows();
  return llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
}

Eigen::VectorXd WhitenedBasis::eval(const Eigen::VectorXd& u_tilde) const {
  return M * monomial_vector(set, u_tilde);
}

Eigen::MatrixXd WhitenedBasis::eval_jacobian(const Eigen::VectorXd& u_tilde) const {
  Eigen::MatrixXd jac(M.rows(), m);
  for (int axis = 0; axis < m; ++axis) {
    jac.col(axis) = M * monomial_vector_deriv(set, u_tilde, axis);
  }
  return jac;
}

WhitenedBasis WhitenedBasis::truncated(int p) const {
  if (p < 0 || p > k) throw std::invalid_argument("WhitenedBasis::truncated: p outside [0, k]");
  const std::int64_t t = num_terms(m, p);
  return WhitenedBasis{m, p, MultiIndexSet(m, p), M.topLeftCorner(t, t), source};
}

WhitenedBasis build_whitened_basis(const Eigen::MatrixXd& W1, const RandomVector& rv, int k,
                                   const GramOptions& opts) {
  const int m = static_cast<int>(W1.cols());
  const Eigen::MatrixXd g = compute_gram(W1, rv, k, opts);
  return WhitenedBasis{m, k, MultiIndexSet(m, k), whiten(g), BasisSource::Whitened};
}

WhitenedBasis hermite_fast_path(const RandomVector& rv, int m, int k) {
  if (!rv.all_normal()) {
    throw std::invalid_argument(
        "hermite_fast_path: non-Gaussian marginal present; use build_whitened_basis");
  }
  // Coefficient rows of He_0..He_k in the monomial basis.
  std::vector<std::vector<double>> he(static_cast<std::size_t>(k) + 1);
  he[0] = {1.0};
  if (k >= 1) he[1] = {0.0, 1.0};
  for (int n = 1; n < k; ++n) {
    std::vector<double> next(static_cast<std::size_t>(n) + 2, 0.0);
    for (std::size_t r = 0; r < he[static_cast<std::size_t>(n)].size(); ++r) {
      next[r + 1] += he[static_cast<std::size_t>(n)][r];
    }
    for (std::size_t r = 0; r < he[static_cast<std::size_t>(n) - 1].size(); ++r) {
      next[r] -= n * he[static_cast<std::size_t>(n) - 1][r];
    }
    he[static_cast<std::size_t>(n) + 1] = std::move(next);
  }

  // M[i][j] = coefficient of monomial j in Phi_i = prod_axis he_{i_axis} / norm.
  MultiIndexSet set(m, k);
  const std::int64_t q1 = set.size();
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(q1, q1);
  for (std::int64_t i = 0; i < q1; ++i) {
    const std::vector<int>& row = set[i];
    double norm = 1.0;
    for (int axis = 0; axis < m; ++axis) {
      norm *= family_norm(UnivariateFamily::HermiteProbabilists, row[static_cast<std::size_t>(axis)]);
    }
    for (std::int64_t j = 0; j < q1; ++j) {
      const std::vector<int>& mono = set[j];
      double c = 1.0;
      for (int axis = 0; axis < m; ++axis) {
        const std::vector<double>& poly = he[static_cast<std::size_t>(row[static_cast<std::size_t>(axis)])];
        const int e = mono[static_cast<std::size_t>(axis)];
        c *= e < static_cast<int>(poly.size()) ? poly[static_cast<std::size_t>(e)] : 0.0;
        if (c == 0.0) break;
      }
      coeff(i, j) = c / norm;
    }
  }
  return WhitenedBasis{m, k, std::move(set), std::move(coeff), BasisSource::HermiteFastPath};
}

WhitenedBasis make_basis(const Eigen::MatrixXd& W1, const RandomVector& rv, int k,
                         const GramOptions& opts) {
  if (rv.all_normal()) return hermite_fast_path(rv, static_cast<int>(W1.cols()), k);
  return build_whitened_basis(W1, rv, k, opts);
}

}  // namespace asuq
