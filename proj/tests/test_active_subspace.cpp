#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "asuq/active_subspace.hpp"
#include "asuq/distributions.hpp"

using namespace asuq;

namespace {

RandomVector standard_normals(int d) {
  return RandomVector(std::vector<Marginal>(static_cast<std::size_t>(d), Marginal::normal(0, 1)));
}

}  // namespace

TEST_CASE("a constant gradient gives the exact rank-one C matrix") {
  const RandomVector rv = standard_normals(3);
  Eigen::VectorXd a(3);
  a << 1.0, 2.0, 3.0;
  const GradientFn grad = [a](const Eigen::VectorXd&) { return a; };
  const Eigen::MatrixXd c = estimate_c_matrix(grad, rv, 5, 1);
  CHECK((c - a * a.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("standardization rescales gradients inside C") {
  // f linear with du-gradient a; in standardized variables the gradient picks
  // up the marginal scales.
  RandomVector rv({Marginal::normal(0.0, 2.0), Marginal::normal(1.0, 0.5)});
  Eigen::VectorXd a(2);
  a << 1.0, 4.0;
  const GradientFn grad = [a](const Eigen::VectorXd&) { return a; };
  const Eigen::MatrixXd c = estimate_c_matrix(grad, rv, 3, 1);
  Eigen::VectorXd az(2);
  az << 1.0 * 2.0, 4.0 * 0.5;
  CHECK((c - az * az.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("non-finite gradients are reported with their sample index") {
  const RandomVector rv = standard_normals(2);
  const GradientFn bad = [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Constant(2, std::numeric_limits<double>::quiet_NaN()).eval();
  };
  CHECK_THROWS_WITH_AS(estimate_c_matrix(bad, rv, 3, 1),
                       doctest::Contains("sample"), std::runtime_error);
}

TEST_CASE("eigendecomposition recovers analytic eigenpairs") {
  const Eigen::MatrixXd id3 = Eigen::MatrixXd::Identity(3, 3);
  const ActiveSubspace as_id = eigendecompose(id3);
  CHECK((as_id.eigenvalues - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);

  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag(0, 0) = 4.0;
  diag(1, 1) = 1.0;
  const ActiveSubspace as_diag = eigendecompose(diag);
  CHECK(as_diag.eigenvalues[0] == doctest::Approx(4.0));
  CHECK(as_diag.eigenvalues[1] == doctest::Approx(1.0));
  CHECK((as_diag.W - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);

  Eigen::VectorXd a(2);
  a << 0.6, 0.8;
  const ActiveSubspace as_r1 = eigendecompose(25.0 * a * a.transpose());
  CHECK(as_r1.eigenvalues[0] == doctest::Approx(25.0).epsilon(1e-10));
  CHECK(std::abs(as_r1.eigenvalues[1]) <= 1e-10);
  // Sign convention: the largest-magnitude entry of each column is positive.
  CHECK(as_r1.W(0, 0) == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(as_r1.W(1, 0) == doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("eigendecomposition validates its input") {
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(eigendecompose(asym), std::invalid_argument);
  CHECK_THROWS_AS(eigendecompose(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);

  // Noise-scale negatives are clipped, genuine ones rejected.
  Eigen::MatrixXd tiny = Eigen::MatrixXd::Zero(2, 2);
  tiny(0, 0) = 1.0;
  tiny(1, 1) = -1e-13;
  CHECK(eigendecompose(tiny).eigenvalues[1] == 0.0);
  Eigen::MatrixXd indef = Eigen::MatrixXd::Zero(2, 2);
  indef(0, 0) = 1.0;
  indef(1, 1) = -1.0;
  CHECK_THROWS_AS(eigendecompose(indef), std::runtime_error);
}

TEST_CASE("reconstruction error of the eigendecomposition is tiny") {
  Eigen::MatrixXd b(5, 5);
  std::uint64_t state = 9;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    b(i / 5, i % 5) = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
  }
  const Eigen::MatrixXd c = b * b.transpose();
  const ActiveSubspace as = eigendecompose(c);
  const Eigen::MatrixXd rebuilt = as.W * as.eigenvalues.asDiagonal() * as.W.transpose();
  CHECK((rebuilt - c).norm() / c.norm() <= 1e-10);
  CHECK((as.W.transpose() * as.W - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("gap policy picks the first spectral drop") {
  Eigen::VectorXd lam(3);
  lam << 1.0, 0.05, 1e-9;
  CHECK(choose_dim(lam, DimPolicy::gap(1e-2)) == 2);
  CHECK(choose_dim(Eigen::VectorXd::Ones(4), DimPolicy::gap(1e-2)) == 4);
  CHECK(choose_dim(lam, DimPolicy::manual(2)) == 2);
  CHECK_THROWS_AS(choose_dim(lam, DimPolicy::manual(0)), std::invalid_argument);
  CHECK_THROWS_AS(choose_dim(lam, DimPolicy::manual(4)), std::invalid_argument);
}

TEST_CASE("projections split the standardized vector orthogonally") {
  RandomVector rv({Marginal::normal(1.0, 2.0), Marginal::normal(0.0, 1.0),
                   Marginal::normal(-3.0, 0.5)});
  Eigen::MatrixXd b(3, 3);
  b << 2, 1, 0, 1, 3, 1, 0, 1, 2;
  ActiveSubspace as = eigendecompose(b * b.transpose());
  as.m = 1;

  const Eigen::MatrixXd draws = rv.sample(20, 3);
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    const Eigen::VectorXd u = draws.row(i).transpose();
    const Eigen::VectorXd act = project_active(as, rv, u);
    const Eigen::VectorXd ina = project_inactive(as, rv, u);
    REQUIRE(act.size() == 1);
    REQUIRE(ina.size() == 2);
    const double z2 = rv.standardize(u).squaredNorm();
    CHECK(act.squaredNorm() + ina.squaredNorm() == doctest::Approx(z2).epsilon(1e-12));
  }

  // W1 = e1 reduces the active variable to the first standardized input.
  ActiveSubspace trivial;
  trivial.eigenvalues = Eigen::VectorXd::Ones(3);
  trivial.W = Eigen::MatrixXd::Identity(3, 3);
  trivial.m = 1;
  Eigen::VectorXd u(3);
  u << 5.0, 0.2, -2.9;
  CHECK(project_active(trivial, rv, u)[0] ==
        doctest::Approx(rv.standardize(u)[0]).epsilon(1e-14));
}

TEST_CASE("the active direction of a squared ridge aligns with the ridge") {
  const RandomVector rv = standard_normals(4);
  Eigen::VectorXd a(4);
  a << 0.5, -0.3, 0.8, 0.1;
  // f = (a^T u)^2, gradient 2 (a^T u) a; every sample gradient is parallel to
  // a, so the leading eigenvector matches it to rounding error.
  const GradientFn grad = [a](const Eigen::VectorXd& u) {
    return (2.0 * a.dot(u) * a).eval();
  };
  const Eigen::MatrixXd c = estimate_c_matrix(grad, rv, 100000, 17);
  const ActiveSubspace as = eigendecompose(c);
  const Eigen::VectorXd lead = as.W.col(0);
  const double cosang = std::abs(lead.dot(a) / a.norm());
  CHECK(std::acos(std::min(1.0, cosang)) <= 1e-2);
  CHECK(as.eigenvalues[1] / as.eigenvalues[0] <= 1e-12);
  CHECK(choose_dim(as.eigenvalues, DimPolicy::gap()) == 1);
}

TEST_CASE("finite differences reproduce closed-form gradients") {
  const RandomVector rv = standard_normals(3);
  Eigen::VectorXd a(3);
  a << 0.4, -1.1, 0.7;
  const ScalarFn f = [a](const Eigen::VectorXd& u) {
    const double t = a.dot(u);
    return t * t + std::sin(u[2]);
  };
  const GradientFn closed = [a](const Eigen::VectorXd& u) {
    Eigen::VectorXd g = 2.0 * a.dot(u) * a;
    g[2] += std::cos(u[2]);
    return g;
  };
  const GradientFn fd = finite_difference_gradient(f, rv);
  const Eigen::MatrixXd draws = rv.sample(20, 5);
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    const Eigen::VectorXd u = draws.row(i).transpose();
    const Eigen::VectorXd gc = closed(u);
    const Eigen::VectorXd gf = fd(u);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(gf[j] - gc[j]) <= 1e-5 * std::max(1.0, std::abs(gc[j])));
    }
  }
}

TEST_CASE("W1 and W2 require a chosen dimension") {
  const ActiveSubspace as = eigendecompose(Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS_AS(as.W1(), std::logic_error);
  ActiveSubspace set = as;
  set.m = 1;
  CHECK(set.W1().cols() == 1);
  CHECK(set.W2().cols() == 1);
}
