#include "asuq/designed_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace asuq {

std::int64_t node_count(int m, int k) {
  if (m < 1 || k < 1) throw std::invalid_argument("node_count: need m >= 1 and k >= 1");
  double formula;
  if (m <= 2) {
    formula = std::pow(static_cast<double>(k), m) / m;
  } else {
    double fact = 1.0;
    for (int i = 2; i < k; ++i) fact *= i;
    formula = 0.9 * std::pow(2.0 * m, k - 1) / fact;
  }
  std::int64_t n = static_cast<std::int64_t>(std::ceil(formula - 1e-12));
  n = std::max(n, num_terms(m, (k - 1) / 2));
  return std::max<std::int64_t>(n, 1);
}

namespace {

// The solver's free variables are standardized node coordinates (tanh-squashed
// onto (-1,1) for bounded marginals) and log-weights.
struct Parameterization {
  const RandomVector& rv;
  int n;
  int d;

  Eigen::MatrixXd z_of(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd z(n, d);
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < d; ++l) {
        const double y = x[i * d + l];
        z(i, l) = rv.marginal(l).kind() == MarginalKind::Normal ? y : std::tanh(y);
      }
    }
    return z;
  }

  Eigen::VectorXd weights_of(const Eigen::VectorXd& x) const {
    return x.tail(n).array().exp();
  }

  // dz/dy per coordinate.
  double slope(const Eigen::VectorXd& x, int i, int l) const {
    if (rv.marginal(l).kind() == MarginalKind::Normal) return 1.0;
    const double t = std::tanh(x[i * d + l]);
    return 1.0 - t * t;
  }
};

Eigen::VectorXd residual_std(const Eigen::MatrixXd& z, const Eigen::VectorXd& weights,
                             const WhitenedBasis& basis, const Eigen::MatrixXd& W1) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(basis.set.size());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    r += weights[i] * basis.eval(W1.transpose() * z.row(i).transpose());
  }
  r[0] -= 1.0;
  return r;
}

Eigen::MatrixXd jacobian_analytic(const Parameterization& par, const Eigen::VectorXd& x,
                                  const WhitenedBasis& basis, const Eigen::MatrixXd& W1) {
  const int n = par.n;
  const int d = par.d;
  const Eigen::MatrixXd z = par.z_of(x);
  const Eigen::VectorXd w = par.weights_of(x);
  const std::int64_t rows = basis.set.size();

  Eigen::MatrixXd jac(rows, n * (d + 1));
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd ut = W1.transpose() * z.row(i).transpose();
    const Eigen::MatrixXd dphi = basis.eval_jacobian(ut);  // (q+1) x m
    for (int l = 0; l < d; ++l) {
      jac.col(i * d + l) = w[i] * par.slope(x, i, l) * (dphi * W1.row(l).transpose());
    }
    jac.col(n * d + i) = w[i] * basis.eval(ut);
  }
  return jac;
}

Eigen::MatrixXd jacobian_fd(const Parameterization& par, const Eigen::VectorXd& x,
                            const WhitenedBasis& basis, const Eigen::MatrixXd& W1) {
  const std::int64_t rows = basis.set.size();
  Eigen::MatrixXd jac(rows, x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    const double h = 1e-7 * std::max(1.0, std::abs(x[c]));
    Eigen::VectorXd xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    jac.col(c) = (residual_std(par.z_of(xp), par.weights_of(xp), basis, W1) -
                  residual_std(par.z_of(xm), par.weights_of(xm), basis, W1)) /
                 (2.0 * h);
  }
  return jac;
}

}  // namespace

Eigen::VectorXd moment_residuals(const Eigen::MatrixXd& nodes, const Eigen::VectorXd& weights,
                                 const WhitenedBasis& basis, const Eigen::MatrixXd& W1,
                                 const RandomVector& rv) {
  if (nodes.rows() != weights.size() || nodes.cols() != rv.dim()) {
    throw std::invalid_argument("moment_residuals: shape mismatch");
  }
  Eigen::MatrixXd z(nodes.rows(), nodes.cols());
  for (Eigen::Index i = 0; i < nodes.rows(); ++i) {
    z.row(i) = rv.standardize(nodes.row(i).transpose()).transpose();
  }
  return residual_std(z, weights, basis, W1);
}

QuadratureRule solve_rule(const WhitenedBasis& basis, const Eigen::MatrixXd& W1,
                          const RandomVector& rv, std::int64_t n, const SolveOptions& opts) {
  const int d = rv.dim();
  if (W1.rows() != d || W1.cols() != basis.m) {
    throw std::invalid_argument("solve_rule: W1 shape inconsistent with basis and inputs");
  }
  if (n < 1) throw std::invalid_argument("solve_rule: need at least one node");

  const Parameterization par{rv, static_cast<int>(n), d};
  const int nvars = static_cast<int>(n) * (d + 1);

  Eigen::VectorXd best_x;
  double best_norm = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < opts.restarts; ++restart) {
    // Nodes start as i.i.d. draws from the input distribution, weights at 1/n.
    const Eigen::MatrixXd samples = rv.sample(static_cast<int>(n), opts.seed + restart);
    Eigen::VectorXd x(nvars);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd z = rv.standardize(samples.row(i).transpose());
      for (int l = 0; l < d; ++l) {
        if (rv.marginal(l).kind() == MarginalKind::Normal) {
          x[i * d + l] = z[l];
        } else {
          x[i * d + l] = std::atanh(std::clamp(z[l], -1.0 + 1e-9, 1.0 - 1e-9));
        }
      }
    }
    x.tail(n).setConstant(std::log(1.0 / static_cast<double>(n)));

    Eigen::VectorXd r = residual_std(par.z_of(x), par.weights_of(x), basis, W1);
    double norm = r.norm();
    double lambda = 1e-3;
    bool refresh = true;
    const std::int64_t rows = basis.set.size();
    Eigen::MatrixXd jac;
    Eigen::VectorXd damping;
    for (int iter = 0; iter < opts.max_iters && norm > opts.tol; ++iter) {
      if (refresh) {
        jac = opts.fd_jacobian ? jacobian_fd(par, x, basis, W1)
                               : jacobian_analytic(par, x, basis, W1);
        damping = jac.colwise().squaredNorm().transpose().cwiseMax(1e-12);
        refresh = false;
      }
      Eigen::VectorXd step(nvars);
      if (rows < nvars) {
        // Woodbury form of (J^T J + lambda D) step = -J^T r; the inner solve
        // is rows x rows, so cost stays linear in the node count.
        const Eigen::VectorXd dinv = damping.cwiseInverse();
        Eigen::MatrixXd k = jac * dinv.asDiagonal() * jac.transpose() / lambda;
        k.diagonal().array() += 1.0;
        step = -(dinv.asDiagonal() * (jac.transpose() * k.ldlt().solve(r))) / lambda;
      } else {
        Eigen::MatrixXd h = jac.transpose() * jac;
        h.diagonal() += lambda * damping;
        step = h.ldlt().solve(-(jac.transpose() * r));
      }
      const Eigen::VectorXd x_trial = x + step;
      const Eigen::VectorXd r_trial = residual_std(par.z_of(x_trial), par.weights_of(x_trial), basis, W1);
      if (r_trial.norm() < norm) {
        x = x_trial;
        r = r_trial;
        norm = r_trial.norm();
        lambda = std::max(lambda / 3.0, 1e-12);
        refresh = true;
      } else {
        lambda *= 4.0;
        if (lambda > 1e12) break;  // stalled
      }
    }

    if (norm < best_norm) {
      best_norm = norm;
      best_x = x;
    }
    if (best_norm <= opts.tol) break;
  }

  if (best_norm > opts.accept_tol) {
    throw std::runtime_error("solve_rule: best residual norm " + std::to_string(best_norm) +
                             " exceeds accept_tol; try more nodes or more restarts");
  }

  const Eigen::MatrixXd z = par.z_of(best_x);
  Eigen::VectorXd w = par.weights_of(best_x);
  w /= w.sum();

  QuadratureRule rule;
  rule.inputs.resize(static_cast<std::size_t>(d));
  for (int l = 0; l < d; ++l) rule.inputs[static_cast<std::size_t>(l)] = l;
  rule.nodes.resize(n, d);
  for (int i = 0; i < n; ++i) {
    rule.nodes.row(i) = rv.destandardize(z.row(i).transpose()).transpose();
  }
  rule.weights = w;
  rule.residual_norm = residual_std(z, w, basis, W1).norm();
  return rule;
}

double integrate(const QuadratureRule& rule, const ScalarFn& fn) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.rows(); ++i) {
    const double v = fn(rule.nodes.row(i).transpose());
    if (!std::isfinite(v)) {
      throw std::runtime_error("integrate: non-finite model value at node " + std::to_string(i));
    }
    acc += rule.weights[i] * v;
  }
  return acc;
}

QuadratureRule tensor_product_rule(const QuadratureRule& core,
                                   const std::vector<RuleFactor>& sparse_factors) {
  if (sparse_factors.empty()) return core;

  std::vector<RuleFactor> factors;
  factors.push_back({core.inputs, core.nodes, core.weights});
  factors.insert(factors.end(), sparse_factors.begin(), sparse_factors.end());
  std::sort(factors.begin(), factors.end(), [](const RuleFactor& a, const RuleFactor& b) {
    return a.inputs.front() < b.inputs.front();
  });

  std::set<int> seen;
  for (const RuleFactor& f : factors) {
    if (f.inputs.empty() || f.nodes.rows() < 1 ||
        f.nodes.cols() != static_cast<Eigen::Index>(f.inputs.size()) ||
        f.weights.size() != f.nodes.rows()) {
      throw std::invalid_argument("tensor_product_rule: malformed factor");
    }
    for (int i : f.inputs) {
      if (!seen.insert(i).second) {
        throw std::invalid_argument("tensor_product_rule: input " + std::to_string(i) +
                                    " appears in more than one factor");
      }
    }
  }

  QuadratureRule rule;
  rule.inputs.assign(seen.begin(), seen.end());
  rule.residual_norm = core.residual_norm;
  rule.factors = factors;

  std::vector<std::vector<Eigen::Index>> col_of(factors.size());
  for (std::size_t f = 0; f < factors.size(); ++f) {
    for (int i : factors[f].inputs) {
      const auto pos = std::lower_bound(rule.inputs.begin(), rule.inputs.end(), i) - rule.inputs.begin();
      col_of[f].push_back(pos);
    }
  }

  std::int64_t total = 1;
  for (const RuleFactor& f : factors) total *= f.nodes.rows();
  rule.nodes.resize(total, static_cast<Eigen::Index>(rule.inputs.size()));
  rule.weights.resize(total);

  // Row-major over the sorted factors, first factor slowest; this matches the
  // axis layout TensorGrid uses, so values line up without reindexing.
  std::vector<Eigen::Index> coord(factors.size(), 0);
  for (std::int64_t row = 0; row < total; ++row) {
    double w = 1.0;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const RuleFactor& fac = factors[f];
      for (std::size_t c = 0; c < col_of[f].size(); ++c) {
        rule.nodes(row, col_of[f][c]) = fac.nodes(coord[f], static_cast<Eigen::Index>(c));
      }
      w *= fac.weights[coord[f]];
    }
    rule.weights[row] = w;

    int pos = static_cast<int>(factors.size()) - 1;
    while (pos >= 0 && coord[static_cast<std::size_t>(pos)] + 1 ==
                           factors[static_cast<std::size_t>(pos)].nodes.rows()) {
      coord[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos >= 0) ++coord[static_cast<std::size_t>(pos)];
  }
  return rule;
}

}  // namespace asuq
