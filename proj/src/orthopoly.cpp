#include "asuq/orthopoly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace asuq {

namespace {

// Monic three-term recurrence coefficient b_k (a_k = 0 for both families,
// the weights being symmetric about 0).
double recurrence_b(UnivariateFamily fam, int k) {
  if (fam == UnivariateFamily::HermiteProbabilists) {
    return static_cast<double>(k);
  }
  const double kk = static_cast<double>(k) * k;
  return kk / (4.0 * kk - 1.0);
}

struct ValueAndDeriv {
  double value;
  double deriv;
};

ValueAndDeriv eval_unnormalized_with_deriv(UnivariateFamily fam, int degree, double x) {
  if (degree == 0) return {1.0, 0.0};
  if (fam == UnivariateFamily::HermiteProbabilists) {
    // He_{n+1} = x He_n - n He_{n-1};  He_n' = n He_{n-1}.
    double prev = 1.0;
    double cur = x;
    for (int n = 1; n < degree; ++n) {
      const double next = x * cur - n * prev;
      prev = cur;
      cur = next;
    }
    return {cur, degree * prev};
  }
  // (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}, carried together with the
  // differentiated recurrence to stay finite at x = +-1.
  double prev = 1.0, dprev = 0.0;
  double cur = x, dcur = 1.0;
  for (int n = 1; n < degree; ++n) {
    const double next = ((2 * n + 1) * x * cur - n * prev) / (n + 1);
    const double dnext = ((2 * n + 1) * (cur + x * dcur) - n * dprev) / (n + 1);
    prev = cur;
    dprev = dcur;
    cur = next;
    dcur = dnext;
  }
  return {cur, dcur};
}

}  // namespace

UnivariateFamily family_for(MarginalKind kind) {
  return kind == MarginalKind::Normal ? UnivariateFamily::HermiteProbabilists
                                      : UnivariateFamily::Legendre;
}

std::int64_t num_terms(int d, int p) {
  if (d < 1) throw std::invalid_argument("num_terms: dimension must be >= 1");
  if (p < 0) throw std::invalid_argument("num_terms: degree must be >= 0");
  if (d + p > 60) {
    throw std::invalid_argument("num_terms: d + p = " + std::to_string(d + p) +
                                " exceeds the overflow guard of 60");
  }
  const int n = d + p;
  const int k = std::min(d, p);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double eval_unnormalized(UnivariateFamily fam, int degree, double x) {
  return eval_unnormalized_with_deriv(fam, degree, x).value;
}

double family_norm(UnivariateFamily fam, int degree) {
  if (fam == UnivariateFamily::HermiteProbabilists) {
    double fact = 1.0;
    for (int i = 2; i <= degree; ++i) fact *= i;
    return std::sqrt(fact);
  }
  return std::sqrt(1.0 / (2.0 * degree + 1.0));
}

double eval_orthonormal(UnivariateFamily fam, int degree, double x) {
  return eval_unnormalized(fam, degree, x) / family_norm(fam, degree);
}

double eval_orthonormal_deriv(UnivariateFamily fam, int degree, double x) {
  return eval_unnormalized_with_deriv(fam, degree, x).deriv / family_norm(fam, degree);
}

GaussRule gauss_rule(UnivariateFamily fam, int k) {
  if (k < 1 || k > 50) throw std::invalid_argument("gauss_rule: k must be in [1, 50]");
  if (k == 1) return {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)};

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(k, k);
  for (int i = 1; i < k; ++i) {
    const double off = std::sqrt(recurrence_b(fam, i));
    jacobi(i, i - 1) = off;
    jacobi(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  Eigen::VectorXd nodes = solver.eigenvalues();
  Eigen::VectorXd weights = solver.eigenvectors().row(0).array().square();

  // The true rule is symmetric about 0; pairing mirror nodes removes the
  // eigensolver's asymmetric roundoff so odd moments vanish exactly.
  Eigen::VectorXd rn = nodes.reverse();
  Eigen::VectorXd rw = weights.reverse();
  nodes = 0.5 * (nodes - rn);
  weights = 0.5 * (weights + rw);
  weights /= weights.sum();
  return {nodes, weights};
}

MultiIndexSet::MultiIndexSet(int d, int p) : d_(d), p_(p) {
  const std::int64_t count = num_terms(d, p);
  indices_.reserve(static_cast<std::size_t>(count));

  // Odometer over exponents bounded by remaining total degree.
  std::vector<int> index(static_cast<std::size_t>(d), 0);
  while (true) {
    indices_.push_back(index);
    int pos = d - 1;
    while (pos >= 0) {
      int total = 0;
      for (int j = 0; j < d; ++j) total += index[static_cast<std::size_t>(j)];
      if (total + 1 <= p) {
        ++index[static_cast<std::size_t>(pos)];
        break;
      }
      index[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }

  std::sort(indices_.begin(), indices_.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              int ta = 0, tb = 0, ma = 0, mb = 0;
              for (int v : a) { ta += v; ma = std::max(ma, v); }
              for (int v : b) { tb += v; mb = std::max(mb, v); }
              if (ta != tb) return ta < tb;
              if (ma != mb) return ma < mb;
              return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
            });
}

std::int64_t MultiIndexSet::find(const std::vector<int>& index) const {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] == index) return static_cast<std::int64_t>(i);
  }
  return -1;
}

Eigen::VectorXd monomial_vector(const MultiIndexSet& set, const Eigen::VectorXd& u) {
  if (u.size() != set.dim()) throw std::invalid_argument("monomial_vector: dimension mismatch");
  Eigen::VectorXd out(set.size());
  for (std::int64_t i = 0; i < set.size(); ++i) {
    double v = 1.0;
    const std::vector<int>& index = set[i];
    for (int j = 0; j < set.dim(); ++j) {
      for (int e = 0; e < index[static_cast<std::size_t>(j)]; ++e) v *= u[j];
    }
    out[i] = v;
  }
  return out;
}

Eigen::VectorXd monomial_vector(const Eigen::VectorXd& u, int k) {
  return monomial_vector(MultiIndexSet(static_cast<int>(u.size()), k), u);
}

Eigen::VectorXd monomial_vector_deriv(const MultiIndexSet& set, const Eigen::VectorXd& u, int axis) {
  if (u.size() != set.dim()) throw std::invalid_argument("monomial_vector_deriv: dimension mismatch");
  if (axis < 0 || axis >= set.dim()) throw std::invalid_argument("monomial_vector_deriv: bad axis");
  Eigen::VectorXd out(set.size());
  for (std::int64_t i = 0; i < set.size(); ++i) {
    const std::vector<int>& index = set[i];
    const int e_axis = index[static_cast<std::size_t>(axis)];
    if (e_axis == 0) {
      out[i] = 0.0;
      continue;
    }
    double v = static_cast<double>(e_axis);
    for (int j = 0; j < set.dim(); ++j) {
      const int e = index[static_cast<std::size_t>(j)] - (j == axis ? 1 : 0);
      for (int r = 0; r < e; ++r) v *= u[j];
    }
    out[i] = v;
  }
  return out;
}

Eigen::VectorXd monomial_vector_deriv(const Eigen::VectorXd& u, int k, int axis) {
  return monomial_vector_deriv(MultiIndexSet(static_cast<int>(u.size()), k), u, axis);
}

Eigen::VectorXd tensor_basis_eval(const MultiIndexSet& set,
                                  const std::vector<UnivariateFamily>& families,
                                  const Eigen::VectorXd& u) {
  const int d = set.dim();
  if (static_cast<int>(families.size()) != d || u.size() != d) {
    throw std::invalid_argument("tensor_basis_eval: dimension mismatch");
  }
  // Univariate values cached up to the max per-axis degree.
  const int p = set.max_total_degree();
  Eigen::MatrixXd values(d, p + 1);
  for (int j = 0; j < d; ++j) {
    for (int n = 0; n <= p; ++n) values(j, n) = eval_orthonormal(families[static_cast<std::size_t>(j)], n, u[j]);
  }
  Eigen::VectorXd out(set.size());
  for (std::int64_t i = 0; i < set.size(); ++i) {
    double v = 1.0;
    const std::vector<int>& index = set[i];
    for (int j = 0; j < d; ++j) v *= values(j, index[static_cast<std::size_t>(j)]);
    out[i] = v;
  }
  return out;
}

}  // namespace asuq
