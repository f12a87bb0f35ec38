#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "asuq/active_subspace.hpp"
#include "asuq/designed_quadrature.hpp"
#include "asuq/distributions.hpp"
#include "asuq/graph.hpp"
#include "asuq/models.hpp"
#include "asuq/nipc.hpp"
#include "asuq/whitening.hpp"

namespace asuq {

// Decorrelated per-stage seeds from one master seed (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Stage stream ids, so reordering stages never shifts another stage's draw.
inline constexpr std::uint64_t kSeedGradients = 1;
inline constexpr std::uint64_t kSeedRule = 2;
inline constexpr std::uint64_t kSeedGram = 3;
inline constexpr std::uint64_t kSeedMc = 4;
inline constexpr std::uint64_t kSeedOracle = 5;

struct UqResult {
  std::string method;
  double mean = 0.0;
  double variance = 0.0;
  std::int64_t n_model_evals = 0;       // quadrature / sample evaluations only
  std::int64_t n_gradient_samples = 0;  // reported separately from model evals
  double weighted_op_cost = 0.0;        // graph models; 0 for closed-form paths
  double naive_op_cost = 0.0;           // cost had the same grid been evaluated naively
  double seconds = 0.0;
  std::uint64_t seed = 0;
  std::string notes;

  // Method-specific extras, empty when not applicable.
  Eigen::VectorXd eigenvalues;
  PceSurrogate surrogate;
  QuadratureRule rule;
};

UqResult run_mc(const ScalarFn& model, const RandomVector& rv, std::int64_t n, std::uint64_t seed);

struct AsNipcOptions {
  DimPolicy policy = DimPolicy::gap();
  int k = 5;                     // rule degree
  int pce_degree = -1;           // -1 picks (k - 1) / 2
  std::int64_t n_nodes = 0;      // 0 picks node_count(m, k)
  int n_gradient_samples = 100;
  SolveOptions solve;
  GramOptions gram;
  std::uint64_t seed = 2026;
};

UqResult run_as_nipc(const ScalarFn& model, const GradientFn& grad, const RandomVector& rv,
                     const AsNipcOptions& opts = {});

struct AsAmtcOptions {
  double sr_threshold = 0.05;
  DimPolicy policy = DimPolicy::gap();
  int k_core = 5;
  int k_sparse = 3;               // Gauss nodes per sparse input
  int pce_degree = -1;            // core degree; -1 picks (k_core - 1) / 2
  int pce_degree_sparse = -1;     // per sparse input; -1 picks k_sparse - 1
  std::int64_t n_core_nodes = 0;  // 0 picks node_count(m, k_core)
  int n_gradient_samples = 100;
  SolveOptions solve;
  GramOptions gram;
  std::uint64_t seed = 2026;
};

UqResult run_as_amtc(const ExprGraph& graph, const GradientFn& grad, const RandomVector& rv,
                     const AsAmtcOptions& opts = {});

// Tensor grid matching a rule's factor structure (single axis when the rule
// has none); values from the grid evaluators line up with rule.nodes rows.
TensorGrid rule_to_grid(const QuadratureRule& rule);

struct ConvergenceRow {
  std::string method;
  std::int64_t budget = 0;
  int repeat = 0;
  double mean = 0.0;
  double variance = 0.0;
  double rel_error = 0.0;
  std::int64_t evals = 0;
  double op_cost = 0.0;
  double seconds = 0.0;
};

struct ConvergenceOptions {
  std::vector<std::string> methods;  // of "mc", "as-nipc", "as-amtc"
  std::vector<std::int64_t> budgets;
  int repeats = 20;
  std::int64_t oracle_samples = 100000;
  std::uint64_t seed = 2026;
  int jobs = 1;
};

// Relative-error table against a seeded MC oracle.  Stochastic methods are
// re-run per repeat; deterministic ones are computed once per budget and the
// row replicated, mirroring how their spread is genuinely zero.
std::vector<ConvergenceRow> convergence_study(const ModelBundle& model,
                                              const ConvergenceOptions& opts);

}  // namespace asuq
