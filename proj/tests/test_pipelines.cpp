#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>

#include "asuq/models.hpp"
#include "asuq/pipelines.hpp"

using namespace asuq;

namespace {

RandomVector standard_normals(int d) {
  return RandomVector(std::vector<Marginal>(static_cast<std::size_t>(d), Marginal::normal(0, 1)));
}

ModelBundle sparse_tail_one() {
  SparseTailSpec spec;
  spec.d_s = 1;
  return make_model("sparse-tail", spec);
}

double mean_rel_error(const std::vector<ConvergenceRow>& rows, const std::string& method,
                      std::int64_t budget) {
  double acc = 0.0;
  int count = 0;
  for (const ConvergenceRow& r : rows) {
    if (r.method == method && r.budget == budget) {
      acc += r.rel_error;
      ++count;
    }
  }
  REQUIRE(count > 0);
  return acc / count;
}

}  // namespace

TEST_CASE("seed derivation is deterministic and stream-separated") {
  CHECK(derive_seed(2026, kSeedGradients) == derive_seed(2026, kSeedGradients));
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream : {kSeedGradients, kSeedRule, kSeedGram, kSeedMc, kSeedOracle}) {
    seen.insert(derive_seed(2026, stream));
  }
  CHECK(seen.size() == 5);
  CHECK(derive_seed(1, kSeedMc) != derive_seed(2, kSeedMc));
}

TEST_CASE("Monte Carlo recovers the first coordinate's moments") {
  const RandomVector rv = standard_normals(2);
  const UqResult res = run_mc([](const Eigen::VectorXd& u) { return u[0]; }, rv, 100000,
                              derive_seed(2026, kSeedMc));
  CHECK(res.method == "mc");
  CHECK(res.n_model_evals == 100000);
  CHECK(res.seed == derive_seed(2026, kSeedMc));
  CHECK(std::abs(res.mean) <= 0.01);
  CHECK(std::abs(res.variance - 1.0) <= 0.05);
}

TEST_CASE("Monte Carlo is exact for a constant and checks its inputs") {
  const RandomVector rv = standard_normals(1);
  const UqResult res = run_mc([](const Eigen::VectorXd&) { return 5.0; }, rv, 100, 3);
  CHECK(res.mean == 5.0);
  CHECK(res.variance == 0.0);
  CHECK_THROWS_AS(run_mc([](const Eigen::VectorXd&) { return 0.0; }, rv, 0, 3),
                  std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      run_mc([](const Eigen::VectorXd&) -> double { throw std::runtime_error("boom"); }, rv, 10, 3),
      doctest::Contains("sample"), std::runtime_error);
}

TEST_CASE("five piston evaluations estimate the mean within one percent") {
  const ModelBundle piston = make_model("piston");
  AsNipcOptions opts;
  opts.policy = DimPolicy::manual(1);
  const UqResult res = run_as_nipc(piston.eval, piston.gradient, piston.rv, opts);
  CHECK(res.method == "as-nipc");
  CHECK(res.n_model_evals == 5);
  CHECK(res.n_gradient_samples == 100);
  CHECK(res.rule.nodes.rows() == 5);
  REQUIRE(res.eigenvalues.size() == 7);
  for (Eigen::Index i = 1; i < 7; ++i) CHECK(res.eigenvalues[i] <= res.eigenvalues[i - 1]);
  CHECK(res.surrogate.labels.size() == 3);

  const UqResult oracle =
      run_mc(piston.eval, piston.rv, 100000, derive_seed(2026, kSeedOracle));
  CHECK(std::abs(res.mean - oracle.mean) <= 1e-2 * std::abs(oracle.mean));

  const UqResult again = run_as_nipc(piston.eval, piston.gradient, piston.rv, opts);
  CHECK(res.mean == again.mean);
  CHECK(res.variance == again.variance);
}

TEST_CASE("an exact one-dimensional ridge integrates to machine-level accuracy") {
  Eigen::VectorXd a(3);
  a << 0.3, 0.3, 0.2;
  const RandomVector rv = standard_normals(3);
  const ScalarFn f = [a](const Eigen::VectorXd& u) { return std::exp(a.dot(u)); };
  const GradientFn g = [a, f](const Eigen::VectorXd& u) { return Eigen::VectorXd(a * f(u)); };
  AsNipcOptions opts;
  opts.k = 7;
  const UqResult res = run_as_nipc(f, g, rv, opts);
  CHECK(res.n_model_evals == 7);  // gap policy finds m = 1
  const double exact = std::exp(0.5 * a.squaredNorm());
  CHECK(std::abs(res.mean - exact) <= 1e-4 * exact);
}

TEST_CASE("a linear model's variance is recovered exactly") {
  const RandomVector rv = standard_normals(2);
  const ScalarFn f = [](const Eigen::VectorXd& u) { return 2.0 * u[0] + 3.0 * u[1] + 1.0; };
  const GradientFn g = [](const Eigen::VectorXd&) {
    Eigen::VectorXd out(2);
    out << 2.0, 3.0;
    return out;
  };
  AsNipcOptions opts;
  opts.k = 3;
  const UqResult res = run_as_nipc(f, g, rv, opts);
  CHECK(std::abs(res.mean - 1.0) <= 1e-8);
  CHECK(std::abs(res.variance - 13.0) <= 1e-8 * 13.0);
}

TEST_CASE("failures are tagged with the pipeline stage") {
  const ModelBundle piston = make_model("piston");
  const ScalarFn bad = [](const Eigen::VectorXd&) -> double { throw std::runtime_error("boom"); };
  AsNipcOptions opts;
  opts.policy = DimPolicy::manual(1);
  CHECK_THROWS_WITH_AS(run_as_nipc(bad, piston.gradient, piston.rv, opts),
                       doctest::Contains("evaluation stage"), std::runtime_error);
}

TEST_CASE("option validation rejects degenerate requests") {
  const ModelBundle piston = make_model("piston");
  AsNipcOptions opts;
  opts.k = 0;
  CHECK_THROWS_AS(run_as_nipc(piston.eval, piston.gradient, piston.rv, opts),
                  std::invalid_argument);
  opts.k = 5;
  opts.pce_degree = 9;
  CHECK_THROWS_WITH_AS(run_as_nipc(piston.eval, piston.gradient, piston.rv, opts),
                       doctest::Contains("surrogate degree"), std::invalid_argument);
}

TEST_CASE("the deduplicated grid halves the op cost and keeps the projection") {
  const ModelBundle st = sparse_tail_one();
  AsAmtcOptions opts;
  opts.n_core_nodes = 10;
  const UqResult res = run_as_amtc(*st.graph, st.gradient, st.rv, opts);
  CHECK(res.method == "as-amtc");
  CHECK(res.n_model_evals == 30);  // 10 core nodes times 3 Gauss nodes
  CHECK(res.eigenvalues.size() == 10);
  CHECK(res.weighted_op_cost <= 0.5 * res.naive_op_cost);

  // Re-project from a naive full-grid evaluation; coefficients must agree.
  const TensorGrid grid = rule_to_grid(res.rule);
  const GridEvalResult naive = st.graph->eval_tensor_grid_naive(grid);
  std::vector<int> col_of(static_cast<std::size_t>(st.rv.dim()), -1);
  for (std::size_t c = 0; c < res.rule.inputs.size(); ++c) {
    col_of[static_cast<std::size_t>(res.rule.inputs[c])] = static_cast<int>(c);
  }
  Eigen::MatrixXd basis_values(res.rule.nodes.rows(), res.surrogate.alpha.size());
  for (Eigen::Index i = 0; i < res.rule.nodes.rows(); ++i) {
    Eigen::VectorXd u(st.rv.dim());
    for (int g = 0; g < st.rv.dim(); ++g) {
      u[g] = res.rule.nodes(i, col_of[static_cast<std::size_t>(g)]);
    }
    basis_values.row(i) = res.surrogate.basis(u).transpose();
  }
  const Eigen::VectorXd alpha =
      project_coefficients(naive.values, basis_values, res.rule.weights);
  CHECK((alpha - res.surrogate.alpha).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("a single sparse node degenerates to the core rule") {
  const ModelBundle st = sparse_tail_one();
  AsAmtcOptions opts;
  opts.n_core_nodes = 10;
  opts.k_sparse = 1;
  const UqResult res = run_as_amtc(*st.graph, st.gradient, st.rv, opts);
  CHECK(res.n_model_evals == 10);
  CHECK(res.weighted_op_cost <= res.naive_op_cost);

  // With the tail clamped to its single Gauss node (the mean), the estimate
  // should track a Monte Carlo run of the clamped model.
  const ScalarFn clamped = [&st](const Eigen::VectorXd& u) {
    Eigen::VectorXd v = u;
    v[10] = 0.0;
    return st.eval(v);
  };
  const UqResult mc = run_mc(clamped, st.rv, 200000, 99);
  CHECK(std::abs(res.mean - mc.mean) <= 0.02 * std::abs(mc.mean));
}

TEST_CASE("a graph with no sparse inputs falls back to plain projection") {
  const ModelBundle piston = make_model("piston");
  AsAmtcOptions opts;
  opts.policy = DimPolicy::manual(1);
  const UqResult res = run_as_amtc(*piston.graph, piston.gradient, piston.rv, opts);
  CHECK(res.method == "as-amtc");
  CHECK(res.notes.find("fell back") != std::string::npos);
  CHECK(res.weighted_op_cost == res.naive_op_cost);

  // piston_graph() analyzes on construction, so build one by hand.
  ExprGraph unanalyzed;
  const NodeId a = unanalyzed.input(0);
  const NodeId b = unanalyzed.input(1);
  unanalyzed.set_output(unanalyzed.add(a, b));
  CHECK_THROWS_AS(run_as_amtc(unanalyzed, piston.gradient, piston.rv, opts),
                  std::invalid_argument);
}

TEST_CASE("rules map onto tensor grids with matching shapes") {
  const ModelBundle st = sparse_tail_one();
  AsAmtcOptions opts;
  opts.n_core_nodes = 10;
  const UqResult res = run_as_amtc(*st.graph, st.gradient, st.rv, opts);
  const TensorGrid factored = rule_to_grid(res.rule);
  REQUIRE(factored.axes().size() == 2);
  CHECK(factored.axes()[0].inputs.size() == 10);
  CHECK(factored.axes()[0].nodes.rows() == 10);
  CHECK((factored.axes()[1].inputs == std::vector<int>{10}));
  CHECK(factored.axes()[1].nodes.rows() == 3);
  CHECK(factored.total_points() == 30);

  const ModelBundle piston = make_model("piston");
  AsNipcOptions nopts;
  nopts.policy = DimPolicy::manual(1);
  const UqResult nres = run_as_nipc(piston.eval, piston.gradient, piston.rv, nopts);
  const TensorGrid flat = rule_to_grid(nres.rule);
  REQUIRE(flat.axes().size() == 1);
  CHECK(flat.axes()[0].nodes.rows() == 5);
  CHECK(flat.total_points() == 5);
}

TEST_CASE("the study replays deterministic methods and shrinks MC error") {
  const ModelBundle piston = make_model("piston");

  ConvergenceOptions mc;
  mc.methods = {"mc"};
  mc.budgets = {100, 10000};
  mc.repeats = 5;
  const std::vector<ConvergenceRow> mc_rows = convergence_study(piston, mc);
  CHECK(mc_rows.size() == 10);
  CHECK(mean_rel_error(mc_rows, "mc", 10000) < mean_rel_error(mc_rows, "mc", 100));

  ConvergenceOptions as;
  as.methods = {"as-nipc"};
  as.budgets = {5, 15};
  as.repeats = 2;
  const std::vector<ConvergenceRow> as_rows = convergence_study(piston, as);
  CHECK(as_rows.size() == 4);
  for (const ConvergenceRow& row : as_rows) {
    CHECK(row.method == "as-nipc");
    CHECK(row.evals == row.budget);
  }
  // Deterministic methods replicate the same numbers across repeats.
  CHECK(mean_rel_error(as_rows, "as-nipc", 5) ==
        doctest::Approx(as_rows[0].rel_error).epsilon(1e-15));
  // Error plateaus rather than decaying; a larger budget must stay comparable.
  CHECK(mean_rel_error(as_rows, "as-nipc", 15) <= 3.0 * mean_rel_error(as_rows, "as-nipc", 5));
}

TEST_CASE("parallel studies reproduce the serial rows") {
  const ModelBundle piston = make_model("piston");
  ConvergenceOptions opts;
  opts.methods = {"mc", "as-nipc"};
  opts.budgets = {50, 200};
  opts.repeats = 3;
  const std::vector<ConvergenceRow> serial = convergence_study(piston, opts);
  opts.jobs = 3;
  const std::vector<ConvergenceRow> parallel = convergence_study(piston, opts);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].method == parallel[i].method);
    CHECK(serial[i].budget == parallel[i].budget);
    CHECK(serial[i].repeat == parallel[i].repeat);
    CHECK(serial[i].mean == parallel[i].mean);
    CHECK(serial[i].variance == parallel[i].variance);
    CHECK(serial[i].rel_error == parallel[i].rel_error);
    CHECK(serial[i].evals == parallel[i].evals);
  }
}

TEST_CASE("study options are validated up front") {
  const ModelBundle piston = make_model("piston");
  ConvergenceOptions opts;
  opts.budgets = {100};
  CHECK_THROWS_WITH_AS(convergence_study(piston, opts), doctest::Contains("no methods"),
                       std::invalid_argument);
  opts.methods = {"mc"};
  opts.budgets = {};
  CHECK_THROWS_WITH_AS(convergence_study(piston, opts), doctest::Contains("no budgets"),
                       std::invalid_argument);
  opts.budgets = {100};
  opts.methods = {"kriging"};
  CHECK_THROWS_WITH_AS(convergence_study(piston, opts), doctest::Contains("unknown method"),
                       std::invalid_argument);
  opts.methods = {"as-amtc"};
  ModelBundle graphless = piston;
  graphless.graph = nullptr;
  CHECK_THROWS_WITH_AS(convergence_study(graphless, opts), doctest::Contains("graph"),
                       std::invalid_argument);
}
