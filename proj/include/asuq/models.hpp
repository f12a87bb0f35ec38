#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>

#include "asuq/active_subspace.hpp"
#include "asuq/distributions.hpp"
#include "asuq/graph.hpp"

namespace asuq {

// Piston cycle time; u = (M, S, V0, k, P0, Ta, T0).
double piston_eval(const Eigen::VectorXd& u);
Eigen::VectorXd piston_gradient(const Eigen::VectorXd& u);
RandomVector piston_random_vector();
ExprGraph piston_graph();

// Synthetic benchmark with a long non-sparse core chain carrying a dominant
// ridge direction, plus a handful of cheap sparse tail inputs.  All inputs
// standard normal; sparse inputs occupy the trailing indices.
struct SparseTailSpec {
  int d_ns = 10;
  int d_s = 2;
  int chain_length = 200;  // must be >= 20 * d_s so the tail stays cheap
  std::uint64_t seed = 7;  // fixes the mix directions
};

RandomVector sparse_tail_random_vector(const SparseTailSpec& spec = {});
ExprGraph sparse_tail_graph(const SparseTailSpec& spec = {});

struct ModelBundle {
  std::string name;
  RandomVector rv;
  ScalarFn eval;
  GradientFn gradient;
  std::shared_ptr<ExprGraph> graph;
};

// Models registered for the CLI: "piston" and "sparse-tail".
ModelBundle make_model(const std::string& name, const SparseTailSpec& spec = {});

}  // namespace asuq
