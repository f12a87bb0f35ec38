#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "asuq/active_subspace.hpp"
#include "asuq/models.hpp"
#include "asuq/pipelines.hpp"

using namespace asuq;

namespace {

Eigen::VectorXd piston_means() {
  Eigen::VectorXd u(7);
  u << 45.0, 0.01, 0.010, 3000.0, 90000.0, 290.0, 340.0;
  return u;
}

// Independent re-derivation of the cycle time, A then V then C.
double local_a(const Eigen::VectorXd& u) {
  return u[4] * u[1] + 19.62 * u[0] - u[3] * u[2] / u[1];
}

double local_cycle(const Eigen::VectorXd& u) {
  const double a = local_a(u);
  const double disc = a * a + 4.0 * u[3] * (u[4] * u[2] / u[6]) * u[5];
  const double v = u[1] / (2.0 * u[3]) * (std::sqrt(disc) - a);
  const double e = u[3] + u[1] * u[1] * u[4] * u[2] * u[5] / (u[6] * v * v);
  return 2.0 * M_PI * std::sqrt(u[0] / e);
}

}  // namespace

TEST_CASE("the cycle time at the mean inputs is pinned") {
  const double c = piston_eval(piston_means());
  CHECK(c == doctest::Approx(0.63741012095799898).epsilon(1e-10));
  CHECK(std::abs(c - 0.6374) <= 2e-4);
}

TEST_CASE("the intermediate force balance matches the hand computation") {
  const Eigen::VectorXd u = piston_means();
  // 900 + 882.9 - 3000.
  CHECK(local_a(u) == doctest::Approx(-1217.1).epsilon(1e-12));
  Eigen::VectorXd doubled = u;
  doubled[0] *= 2.0;
  CHECK(local_a(doubled) - local_a(u) == doctest::Approx(19.62 * 45.0).epsilon(1e-12));
}

TEST_CASE("the closed form agrees with an independent re-derivation") {
  const RandomVector rv = piston_random_vector();
  const Eigen::MatrixXd xs = rv.sample(100, 21);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const Eigen::VectorXd u = xs.row(i).transpose();
    CHECK(std::abs(piston_eval(u) - local_cycle(u)) <= 1e-12);
  }
}

TEST_CASE("the Monte Carlo mean stays near the mean-input value") {
  const UqResult mc =
      run_mc(piston_eval, piston_random_vector(), 100000, derive_seed(2026, kSeedOracle));
  const double point = piston_eval(piston_means());
  CHECK(std::abs(mc.mean - point) <= 0.05 * point);
}

TEST_CASE("the gradient is finite, nonzero, and matches finite differences") {
  const Eigen::VectorXd g0 = piston_gradient(piston_means());
  REQUIRE(g0.size() == 7);
  for (Eigen::Index j = 0; j < 7; ++j) {
    CHECK(std::isfinite(g0[j]));
    CHECK(g0[j] != 0.0);
  }

  const RandomVector rv = piston_random_vector();
  const GradientFn fd = finite_difference_gradient(piston_eval, rv);
  const Eigen::MatrixXd xs = rv.sample(20, 22);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const Eigen::VectorXd u = xs.row(i).transpose();
    const Eigen::VectorXd g = piston_gradient(u);
    const Eigen::VectorXd approx = fd(u);
    for (Eigen::Index j = 0; j < 7; ++j) {
      CHECK(std::abs(g[j] - approx[j]) <= 1e-5 * std::max(1.0, std::abs(g[j])));
    }
  }
}

TEST_CASE("the piston graph reproduces the closed form") {
  ExprGraph graph = piston_graph();
  graph.analyze_dependencies();
  const RandomVector rv = piston_random_vector();
  const Eigen::MatrixXd xs = rv.sample(100, 23);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const Eigen::VectorXd u = xs.row(i).transpose();
    CHECK(std::abs(graph.eval_pointwise(u) - piston_eval(u)) <= 1e-12);
  }
}

TEST_CASE("every piston input reaches the output and none is sparse") {
  ExprGraph graph = piston_graph();
  graph.analyze_dependencies();
  const std::vector<int>& dep = graph.node(graph.output()).dep_set;
  CHECK((dep == std::vector<int>{0, 1, 2, 3, 4, 5, 6}));
  for (int i = 0; i < 7; ++i) {
    CHECK(graph.sparsity_ratio(i) > 0.3);
  }
  CHECK(graph.identify_sparse_inputs(0.05).first.empty());
}

TEST_CASE("the sparse tail inputs are cheap and the core carries a ridge") {
  ExprGraph graph = sparse_tail_graph();
  graph.analyze_dependencies();
  for (int i = 0; i < 10; ++i) {
    CHECK(graph.sparsity_ratio(i) > 0.3);
  }
  CHECK(graph.sparsity_ratio(10) < 0.05);
  CHECK(graph.sparsity_ratio(11) < 0.05);
  const auto [sparse, dense] = graph.identify_sparse_inputs(0.05);
  CHECK((sparse == std::vector<int>{10, 11}));
  CHECK(dense.size() == 10);

  const ModelBundle st = make_model("sparse-tail");
  const Eigen::MatrixXd c = estimate_c_matrix(st.gradient, st.rv, 300, 77);
  const Eigen::MatrixXd restricted = c.topLeftCorner(10, 10);
  const ActiveSubspace ed = eigendecompose(restricted);
  CHECK(ed.eigenvalues[1] / ed.eigenvalues[0] < 0.1);
}

TEST_CASE("a chain too short for the tail is rejected") {
  SparseTailSpec spec;
  spec.chain_length = 30;  // below 20 * d_s = 40
  CHECK_THROWS_WITH_AS(sparse_tail_graph(spec), doctest::Contains("chain_length"),
                       std::invalid_argument);
}

TEST_CASE("the model registry exposes both benchmarks") {
  const ModelBundle piston = make_model("piston");
  CHECK(piston.name == "piston");
  CHECK(piston.rv.dim() == 7);
  REQUIRE(piston.graph != nullptr);
  const Eigen::VectorXd u = piston_means();
  CHECK(piston.eval(u) == doctest::Approx(piston_eval(u)).epsilon(1e-14));
  CHECK((piston.gradient(u) - piston_gradient(u)).cwiseAbs().maxCoeff() <= 1e-12);

  const ModelBundle st = make_model("sparse-tail");
  CHECK(st.name == "sparse-tail");
  CHECK(st.rv.dim() == 12);
  REQUIRE(st.graph != nullptr);
  const Eigen::MatrixXd xs = st.rv.sample(5, 24);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const Eigen::VectorXd x = xs.row(i).transpose();
    CHECK(std::isfinite(st.eval(x)));
  }

  CHECK_THROWS_WITH_AS(make_model("warp-drive"), doctest::Contains("unknown model"),
                       std::invalid_argument);
}
