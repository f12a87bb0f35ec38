#include "asuq/pipelines.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>
#include <utility>

namespace asuq {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename Fn>
auto stage(const char* method, const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(method) + " " + name + " stage: " + e.what());
  }
}

std::string index_label(const std::vector<int>& index) {
  std::string s = "(";
  for (std::size_t j = 0; j < index.size(); ++j) {
    if (j > 0) s += ' ';
    s += std::to_string(index[j]);
  }
  s += ')';
  return s;
}

double per_point_cost(const ExprGraph& graph) {
  double total = 0.0;
  for (std::int64_t id = 0; id < graph.node_count(); ++id) {
    const OpNode& n = graph.node(static_cast<NodeId>(id));
    if (n.live) total += n.unit_cost;
  }
  return total;
}

// C over a block of inputs only: full-space gradient samples, block
// components standardized by their marginal scales.
Eigen::MatrixXd restricted_c_matrix(const GradientFn& grad, const RandomVector& rv,
                                    const std::vector<int>& block, int n, std::uint64_t seed) {
  const int d_block = static_cast<int>(block.size());
  if (n < d_block) {
    std::fprintf(stderr, "warning: %d gradient samples for a %d-dimensional block\n", n, d_block);
  }
  const Eigen::MatrixXd samples = rv.sample(n, seed);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d_block, d_block);
  Eigen::VectorXd g_block(d_block);
  for (int r = 0; r < n; ++r) {
    const Eigen::VectorXd g = grad(samples.row(r).transpose());
    if (g.size() != rv.dim()) throw std::runtime_error("gradient has the wrong dimension");
    for (int i = 0; i < d_block; ++i) {
      const int gi = block[static_cast<std::size_t>(i)];
      g_block[i] = g[gi] * rv.marginal(gi).scale();
    }
    if (!g_block.allFinite()) {
      throw std::runtime_error("gradient sample " + std::to_string(r) + " is not finite");
    }
    c.selfadjointView<Eigen::Lower>().rankUpdate(g_block, 1.0 / n);
  }
  return Eigen::MatrixXd(c.selfadjointView<Eigen::Lower>());
}

// Largest degree whose node budget fits, so studies never request a rule with
// more moment rows than the nodes can match.
int feasible_degree(int m, std::int64_t n_nodes, int cap = 7) {
  int k = 1;
  for (int kk = 2; kk <= cap; ++kk) {
    if (node_count(m, kk) <= n_nodes) k = kk;
  }
  return k;
}

// Active-variable basis and the projection pipeline shared by the NIPC paths.
struct ActiveBasis {
  Eigen::MatrixXd W1;
  RandomVector rv;  // the inputs W1's rows refer to
  WhitenedBasis basis;

  Eigen::VectorXd operator()(const Eigen::VectorXd& u) const {
    return basis.eval(W1.transpose() * rv.standardize(u));
  }
};

// Tensor basis of an AS-AMTC split: whitened active-variable polynomials over
// the core inputs times orthonormal univariate polynomials per sparse input.
struct SplitBasis {
  std::vector<int> core_inputs;
  std::vector<int> sparse_inputs;
  std::vector<Marginal> core_marginals;
  std::vector<Marginal> sparse_marginals;
  std::vector<UnivariateFamily> sparse_families;
  Eigen::MatrixXd W1;  // |core_inputs| x m
  WhitenedBasis core;
  int p_sparse = 0;

  std::int64_t sparse_combinations() const {
    std::int64_t s = 1;
    for (std::size_t j = 0; j < sparse_inputs.size(); ++j) s *= p_sparse + 1;
    return s;
  }

  std::int64_t size() const { return core.set.size() * sparse_combinations(); }

  // get(global_input_index) -> coordinate in the original input space.
  template <typename Getter>
  Eigen::VectorXd eval_with(Getter&& get) const {
    Eigen::VectorXd zc(static_cast<Eigen::Index>(core_inputs.size()));
    for (std::size_t i = 0; i < core_inputs.size(); ++i) {
      zc[static_cast<Eigen::Index>(i)] = core_marginals[i].standardize(get(core_inputs[i]));
    }
    const Eigen::VectorXd phi_core = core.eval(W1.transpose() * zc);

    const int ds = static_cast<int>(sparse_inputs.size());
    Eigen::MatrixXd sv(ds, p_sparse + 1);
    for (int j = 0; j < ds; ++j) {
      const double z = sparse_marginals[static_cast<std::size_t>(j)].standardize(
          get(sparse_inputs[static_cast<std::size_t>(j)]));
      for (int n = 0; n <= p_sparse; ++n) {
        sv(j, n) = eval_orthonormal(sparse_families[static_cast<std::size_t>(j)], n, z);
      }
    }

    // Core index slowest, sparse inputs in ascending global order, last fastest.
    const std::int64_t s_count = sparse_combinations();
    Eigen::VectorXd out(phi_core.size() * s_count);
    for (Eigen::Index c = 0; c < phi_core.size(); ++c) {
      for (std::int64_t s = 0; s < s_count; ++s) {
        double v = phi_core[c];
        std::int64_t rem = s;
        for (int j = ds - 1; j >= 0; --j) {
          v *= sv(j, static_cast<int>(rem % (p_sparse + 1)));
          rem /= p_sparse + 1;
        }
        out[c * s_count + s] = v;
      }
    }
    return out;
  }

  Eigen::VectorXd eval_full(const Eigen::VectorXd& u) const {
    return eval_with([&](int g) { return u[g]; });
  }

  std::vector<std::string> labels() const {
    const std::int64_t s_count = sparse_combinations();
    const int ds = static_cast<int>(sparse_inputs.size());
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (std::int64_t c = 0; c < core.set.size(); ++c) {
      const std::string head = index_label(core.set[c]);
      for (std::int64_t s = 0; s < s_count; ++s) {
        std::vector<int> digits(static_cast<std::size_t>(ds), 0);
        std::int64_t rem = s;
        for (int j = ds - 1; j >= 0; --j) {
          digits[static_cast<std::size_t>(j)] = static_cast<int>(rem % (p_sparse + 1));
          rem /= p_sparse + 1;
        }
        out.push_back(head + "x" + index_label(digits));
      }
    }
    return out;
  }
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

UqResult run_mc(const ScalarFn& model, const RandomVector& rv, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("run_mc: sample count must be positive");
  const auto t0 = Clock::now();

  const Eigen::MatrixXd samples = rv.sample(static_cast<int>(n), seed);
  Eigen::VectorXd f(n);
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      f[i] = model(samples.row(i).transpose());
    } catch (const std::exception& e) {
      throw std::runtime_error("run_mc: model failed at sample " + std::to_string(i) + ": " + e.what());
    }
    if (!std::isfinite(f[i])) {
      throw std::runtime_error("run_mc: model returned a non-finite value at sample " + std::to_string(i));
    }
  }

  UqResult res;
  res.method = "mc";
  res.seed = seed;
  res.mean = f.mean();
  res.variance = n > 1 ? (f.array() - res.mean).matrix().squaredNorm() / static_cast<double>(n - 1) : 0.0;
  res.n_model_evals = n;
  res.seconds = seconds_since(t0);
  return res;
}

UqResult run_as_nipc(const ScalarFn& model, const GradientFn& grad, const RandomVector& rv,
                     const AsNipcOptions& opts) {
  if (opts.k < 1) throw std::invalid_argument("run_as_nipc: rule degree must be >= 1");
  if (opts.n_gradient_samples < 1) {
    throw std::invalid_argument("run_as_nipc: gradient sample count must be positive");
  }
  const int p = opts.pce_degree < 0 ? (opts.k - 1) / 2 : opts.pce_degree;
  if (p > opts.k) throw std::invalid_argument("run_as_nipc: surrogate degree exceeds the rule basis degree");
  const auto t0 = Clock::now();

  const Eigen::MatrixXd C = stage("as-nipc", "gradient", [&] {
    return estimate_c_matrix(grad, rv, opts.n_gradient_samples, derive_seed(opts.seed, kSeedGradients));
  });
  ActiveSubspace as = stage("as-nipc", "subspace", [&] {
    ActiveSubspace a = eigendecompose(C);
    a.m = choose_dim(a.eigenvalues, opts.policy);
    return a;
  });
  const Eigen::MatrixXd W1 = as.W1();

  GramOptions gram = opts.gram;
  gram.seed = derive_seed(opts.seed, kSeedGram);
  const WhitenedBasis basis = stage("as-nipc", "basis", [&] { return make_basis(W1, rv, opts.k, gram); });

  SolveOptions solve = opts.solve;
  solve.seed = derive_seed(opts.seed, kSeedRule);
  const std::int64_t n = opts.n_nodes > 0 ? opts.n_nodes : node_count(as.m, opts.k);
  const QuadratureRule rule =
      stage("as-nipc", "rule", [&] { return solve_rule(basis, W1, rv, n, solve); });

  ActiveBasis proj{W1, rv, basis.truncated(p)};
  Eigen::VectorXd f(rule.nodes.rows());
  Eigen::MatrixXd B(rule.nodes.rows(), proj.basis.set.size());
  stage("as-nipc", "evaluation", [&] {
    for (Eigen::Index i = 0; i < rule.nodes.rows(); ++i) {
      const Eigen::VectorXd u = rule.nodes.row(i).transpose();
      f[i] = model(u);
      B.row(i) = proj(u).transpose();
    }
  });
  const Eigen::VectorXd alpha =
      stage("as-nipc", "projection", [&] { return project_coefficients(f, B, rule.weights); });

  UqResult res;
  res.method = "as-nipc";
  res.seed = opts.seed;
  res.mean = pce_mean(alpha);
  res.variance = pce_variance(alpha);
  res.n_model_evals = rule.nodes.rows();
  res.n_gradient_samples = opts.n_gradient_samples;
  res.eigenvalues = as.eigenvalues;
  res.rule = rule;
  res.surrogate.alpha = alpha;
  res.surrogate.basis = [proj](const Eigen::VectorXd& u) { return proj(u); };
  res.surrogate.labels.reserve(static_cast<std::size_t>(proj.basis.set.size()));
  for (std::int64_t i = 0; i < proj.basis.set.size(); ++i) {
    res.surrogate.labels.push_back(index_label(proj.basis.set[i]));
  }
  res.seconds = seconds_since(t0);
  return res;
}

UqResult run_as_amtc(const ExprGraph& graph, const GradientFn& grad, const RandomVector& rv,
                     const AsAmtcOptions& opts) {
  if (!graph.analyzed()) throw std::invalid_argument("run_as_amtc: graph has not been analyzed");
  if (opts.k_core < 1 || opts.k_sparse < 1) {
    throw std::invalid_argument("run_as_amtc: rule degrees must be >= 1");
  }
  if (opts.n_gradient_samples < 1) {
    throw std::invalid_argument("run_as_amtc: gradient sample count must be positive");
  }
  const auto t0 = Clock::now();

  const auto [sparse_inputs, core_inputs] = graph.identify_sparse_inputs(opts.sr_threshold);

  if (sparse_inputs.empty()) {
    AsNipcOptions fb;
    fb.policy = opts.policy;
    fb.k = opts.k_core;
    fb.pce_degree = opts.pce_degree;
    fb.n_nodes = opts.n_core_nodes;
    fb.n_gradient_samples = opts.n_gradient_samples;
    fb.solve = opts.solve;
    fb.gram = opts.gram;
    fb.seed = opts.seed;
    UqResult res = run_as_nipc([&graph](const Eigen::VectorXd& u) { return graph.eval_pointwise(u); },
                               grad, rv, fb);
    res.method = "as-amtc";
    res.notes = "no input fell below the sparsity threshold; fell back to as-nipc on the full space";
    res.naive_op_cost = per_point_cost(graph) * static_cast<double>(res.n_model_evals);
    res.weighted_op_cost = res.naive_op_cost;
    res.seconds = seconds_since(t0);
    return res;
  }

  // Active subspace over the core block only.
  const Eigen::MatrixXd C = stage("as-amtc", "gradient", [&] {
    return restricted_c_matrix(grad, rv, core_inputs, opts.n_gradient_samples,
                               derive_seed(opts.seed, kSeedGradients));
  });

  ActiveSubspace as = stage("as-amtc", "subspace", [&] {
    ActiveSubspace a = eigendecompose(C);
    a.m = choose_dim(a.eigenvalues, opts.policy);
    return a;
  });
  const Eigen::MatrixXd W1 = as.W1();
  const RandomVector rv_core = rv.subset(core_inputs);

  GramOptions gram = opts.gram;
  gram.seed = derive_seed(opts.seed, kSeedGram);
  const WhitenedBasis basis =
      stage("as-amtc", "basis", [&] { return make_basis(W1, rv_core, opts.k_core, gram); });

  SolveOptions solve = opts.solve;
  solve.seed = derive_seed(opts.seed, kSeedRule);
  const std::int64_t n_core = opts.n_core_nodes > 0 ? opts.n_core_nodes : node_count(as.m, opts.k_core);
  QuadratureRule core_rule =
      stage("as-amtc", "rule", [&] { return solve_rule(basis, W1, rv_core, n_core, solve); });
  core_rule.inputs = core_inputs;  // relabel local columns with global indices

  const QuadratureRule full_rule = stage("as-amtc", "tensor", [&] {
    std::vector<RuleFactor> factors;
    factors.reserve(sparse_inputs.size());
    for (int g : sparse_inputs) {
      const Marginal& marg = rv.marginal(g);
      const GaussRule gauss = gauss_rule(family_for(marg.kind()), opts.k_sparse);
      RuleFactor f;
      f.inputs = {g};
      f.nodes.resize(gauss.nodes.size(), 1);
      for (Eigen::Index i = 0; i < gauss.nodes.size(); ++i) {
        f.nodes(i, 0) = marg.destandardize(gauss.nodes[i]);
      }
      f.weights = gauss.weights;
      factors.push_back(std::move(f));
    }
    return tensor_product_rule(core_rule, factors);
  });

  const TensorGrid grid = rule_to_grid(full_rule);
  const GridEvalResult eval = stage("as-amtc", "evaluation", [&] { return graph.eval_tensor_grid_amtc(grid); });

  const int p_core = opts.pce_degree < 0 ? (opts.k_core - 1) / 2 : opts.pce_degree;
  if (p_core > opts.k_core) {
    throw std::invalid_argument("run_as_amtc: surrogate degree exceeds the rule basis degree");
  }
  std::vector<Marginal> core_marginals, sparse_marginals;
  std::vector<UnivariateFamily> sparse_families;
  for (int g : core_inputs) core_marginals.push_back(rv.marginal(g));
  for (int g : sparse_inputs) {
    sparse_marginals.push_back(rv.marginal(g));
    sparse_families.push_back(family_for(rv.marginal(g).kind()));
  }
  const SplitBasis proj{core_inputs,
                        sparse_inputs,
                        std::move(core_marginals),
                        std::move(sparse_marginals),
                        std::move(sparse_families),
                        W1,
                        basis.truncated(p_core),
                        opts.pce_degree_sparse < 0 ? opts.k_sparse - 1 : opts.pce_degree_sparse};

  const Eigen::VectorXd alpha = stage("as-amtc", "projection", [&] {
    std::vector<int> col_of(static_cast<std::size_t>(rv.dim()), -1);
    for (std::size_t c = 0; c < full_rule.inputs.size(); ++c) {
      col_of[static_cast<std::size_t>(full_rule.inputs[c])] = static_cast<int>(c);
    }
    Eigen::MatrixXd B(full_rule.nodes.rows(), proj.size());
    for (Eigen::Index i = 0; i < full_rule.nodes.rows(); ++i) {
      B.row(i) = proj.eval_with([&](int g) { return full_rule.nodes(i, col_of[static_cast<std::size_t>(g)]); })
                     .transpose();
    }
    return project_coefficients(eval.values, B, full_rule.weights);
  });

  UqResult res;
  res.method = "as-amtc";
  res.seed = opts.seed;
  res.mean = pce_mean(alpha);
  res.variance = pce_variance(alpha);
  res.n_model_evals = eval.total_points;
  res.n_gradient_samples = opts.n_gradient_samples;
  res.weighted_op_cost = eval.weighted_cost;
  res.naive_op_cost = per_point_cost(graph) * static_cast<double>(eval.total_points);
  res.eigenvalues = as.eigenvalues;
  res.rule = full_rule;
  res.surrogate.alpha = alpha;
  res.surrogate.basis = [proj](const Eigen::VectorXd& u) { return proj.eval_full(u); };
  res.surrogate.labels = proj.labels();
  res.seconds = seconds_since(t0);
  return res;
}

TensorGrid rule_to_grid(const QuadratureRule& rule) {
  std::vector<TensorGridAxis> axes;
  if (rule.factors.empty()) {
    axes.push_back({rule.inputs, rule.nodes});
  } else {
    for (const RuleFactor& f : rule.factors) axes.push_back({f.inputs, f.nodes});
  }
  return TensorGrid(std::move(axes));
}

std::vector<ConvergenceRow> convergence_study(const ModelBundle& model, const ConvergenceOptions& opts) {
  if (opts.methods.empty()) throw std::invalid_argument("convergence_study: no methods given");
  if (opts.budgets.empty()) throw std::invalid_argument("convergence_study: no budgets given");
  if (opts.repeats < 1) throw std::invalid_argument("convergence_study: repeats must be >= 1");
  if (opts.oracle_samples < 2) throw std::invalid_argument("convergence_study: oracle needs >= 2 samples");
  for (const std::string& m : opts.methods) {
    if (m != "mc" && m != "as-nipc" && m != "as-amtc") {
      throw std::invalid_argument("convergence_study: unknown method '" + m + "'");
    }
    if (m == "as-amtc" && !model.graph) {
      throw std::invalid_argument("convergence_study: as-amtc needs a graph model");
    }
  }
  for (std::int64_t b : opts.budgets) {
    if (b < 1) throw std::invalid_argument("convergence_study: budgets must be positive");
  }

  const UqResult oracle =
      run_mc(model.eval, model.rv, opts.oracle_samples, derive_seed(opts.seed, kSeedOracle));
  const double denom = std::max(std::abs(oracle.mean), 1e-300);

  // Budget mapping for the quadrature methods: nodes = budget, degree = the
  // largest k whose node_count fits.  The active dimension that mapping needs
  // is pinned here once, from the same seeded gradients the runs will use.
  const bool wants_nipc =
      std::find(opts.methods.begin(), opts.methods.end(), "as-nipc") != opts.methods.end();
  const bool wants_amtc =
      std::find(opts.methods.begin(), opts.methods.end(), "as-amtc") != opts.methods.end();
  std::vector<int> sparse_split;
  if (wants_amtc) sparse_split = model.graph->identify_sparse_inputs(AsAmtcOptions{}.sr_threshold).first;
  const int n_grad = AsNipcOptions{}.n_gradient_samples;
  int m_full = 0;
  if (wants_nipc || (wants_amtc && sparse_split.empty())) {
    const Eigen::MatrixXd c =
        estimate_c_matrix(model.gradient, model.rv, n_grad, derive_seed(opts.seed, kSeedGradients));
    m_full = choose_dim(eigendecompose(c).eigenvalues, DimPolicy::gap());
  }
  int m_core = 0;
  if (wants_amtc && !sparse_split.empty()) {
    std::vector<int> core_block;
    for (int g : model.graph->input_indices()) {
      if (!std::binary_search(sparse_split.begin(), sparse_split.end(), g)) core_block.push_back(g);
    }
    const Eigen::MatrixXd c = restricted_c_matrix(model.gradient, model.rv, core_block, n_grad,
                                                  derive_seed(opts.seed, kSeedGradients));
    m_core = choose_dim(eigendecompose(c).eigenvalues, DimPolicy::gap());
  }

  // One computed cell per stochastic repeat; deterministic methods get a
  // single cell whose row is replicated across repeats.
  struct Cell {
    std::string method;
    std::int64_t budget = 0;
    std::size_t budget_index = 0;
    int repeat = 0;      // -1 for deterministic cells
    std::size_t row = 0; // first output row
    int copies = 1;
  };
  std::vector<Cell> cells;
  std::size_t total_rows = 0;
  for (const std::string& m : opts.methods) {
    for (std::size_t bi = 0; bi < opts.budgets.size(); ++bi) {
      const std::int64_t b = opts.budgets[bi];
      if (m == "mc") {
        for (int r = 0; r < opts.repeats; ++r) {
          cells.push_back({m, b, bi, r, total_rows, 1});
          ++total_rows;
        }
      } else {
        cells.push_back({m, b, bi, -1, total_rows, opts.repeats});
        total_rows += static_cast<std::size_t>(opts.repeats);
      }
    }
  }

  std::vector<ConvergenceRow> rows(total_rows);
  const auto run_cell = [&](const Cell& cell) {
    ConvergenceRow row;
    row.method = cell.method;
    row.budget = cell.budget;
    try {
      UqResult r;
      if (cell.method == "mc") {
        const std::uint64_t s =
            derive_seed(derive_seed(derive_seed(opts.seed, kSeedMc), cell.budget_index),
                        static_cast<std::uint64_t>(cell.repeat));
        r = run_mc(model.eval, model.rv, cell.budget, s);
      } else if (cell.method == "as-nipc") {
        AsNipcOptions o;
        o.seed = opts.seed;
        o.n_nodes = cell.budget;
        o.k = feasible_degree(m_full, cell.budget);
        r = run_as_nipc(model.eval, model.gradient, model.rv, o);
      } else {
        AsAmtcOptions o;
        o.seed = opts.seed;
        std::int64_t per_core = 1;
        for (std::size_t j = 0; j < sparse_split.size(); ++j) per_core *= o.k_sparse;
        o.n_core_nodes = (cell.budget + per_core - 1) / per_core;
        o.k_core = feasible_degree(sparse_split.empty() ? m_full : m_core, o.n_core_nodes);
        r = run_as_amtc(*model.graph, model.gradient, model.rv, o);
      }
      row.mean = r.mean;
      row.variance = r.variance;
      row.rel_error = std::abs(r.mean - oracle.mean) / denom;
      row.evals = r.n_model_evals;
      row.op_cost = r.weighted_op_cost;
      row.seconds = r.seconds;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "convergence cell %s budget %lld failed: %s\n", cell.method.c_str(),
                   static_cast<long long>(cell.budget), e.what());
      row.mean = row.variance = row.rel_error = std::numeric_limits<double>::quiet_NaN();
    }
    for (int c = 0; c < cell.copies; ++c) {
      rows[cell.row + static_cast<std::size_t>(c)] = row;
      rows[cell.row + static_cast<std::size_t>(c)].repeat = cell.repeat < 0 ? c : cell.repeat;
    }
  };

  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1 || cells.size() <= 1) {
    for (const Cell& cell : cells) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), cells.size()));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cells.size()) return;
          run_cell(cells[i]);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

}  // namespace asuq
