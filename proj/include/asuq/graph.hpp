#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace asuq {

enum class OpKind {
  Input,
  Const,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Cos,
  Sin,
  Exp,
  Sqrt,
  Power,  // payload = exponent
  Scale,  // payload = factor
  SumOf,
};

const char* op_kind_name(OpKind kind);

using NodeId = std::int32_t;

struct OpNode {
  OpKind kind;
  std::vector<NodeId> parents;
  double payload = 0.0;  // Const value, Power exponent, Scale factor
  double unit_cost = 0.0;
  int input_index = -1;     // uncertain-input index, Input nodes only
  std::vector<int> dep_set; // sorted uncertain-input indices, set by analyze_dependencies
  bool live = true;         // false once dead-code flagging removes the node
};

struct TensorGridAxis {
  std::vector<int> inputs;  // sorted uncertain-input indices, disjoint across axes
  Eigen::MatrixXd nodes;    // one row per grid node, one column per input
};

// Product grid over groups of inputs.  Axes are re-sorted by smallest input
// index on construction; that order fixes the flat row-major layout of every
// tensor the evaluators return (first axis slowest).
class TensorGrid {
 public:
  explicit TensorGrid(std::vector<TensorGridAxis> axes);

  const std::vector<TensorGridAxis>& axes() const { return axes_; }
  std::int64_t total_points() const;
  std::vector<int> covered_inputs() const;  // sorted union over axes

 private:
  std::vector<TensorGridAxis> axes_;
};

struct GridEvalResult {
  Eigen::VectorXd values;              // output over the full grid, flat row-major
  std::vector<std::int64_t> counters;  // evaluations per node id; dead nodes stay 0
  double weighted_cost = 0.0;          // sum of unit_cost * counter over live nodes
  std::int64_t total_points = 0;
};

// Computational model as a DAG of elementary operations.  Node ids are
// append-only and parents must already exist, so the id order is topological.
class ExprGraph {
 public:
  ExprGraph();

  NodeId input(int uncertain_index);
  NodeId constant(double value);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId div(NodeId a, NodeId b);
  NodeId neg(NodeId a);
  NodeId cos(NodeId a);
  NodeId sin(NodeId a);
  NodeId exp(NodeId a);
  NodeId sqrt(NodeId a);
  NodeId power(NodeId a, double exponent);
  NodeId scale(double factor, NodeId a);
  NodeId sum_of(const std::vector<NodeId>& terms);

  void set_output(NodeId id);

  // Applies to existing nodes of the kind and to nodes created afterwards.
  void set_unit_cost(OpKind kind, double cost);

  // Dead-code flagging plus forward dep_set propagation.  Must run before
  // evaluation or sparsity queries; safe to call again after edits.
  void analyze_dependencies();

  bool analyzed() const { return analyzed_; }
  NodeId output() const { return output_; }
  std::int64_t node_count() const { return static_cast<std::int64_t>(nodes_.size()); }
  const OpNode& node(NodeId id) const;
  std::vector<int> input_indices() const;  // sorted distinct uncertain-input indices

  // u is indexed by uncertain-input index.
  double eval_pointwise(const Eigen::VectorXd& u) const;

  // Every node evaluated once per full-grid point.
  GridEvalResult eval_tensor_grid_naive(const TensorGrid& grid) const;

  // Each node evaluated only over the axes its dep_set touches; parent values
  // are broadcast (stride-0 index expansion) into the child's axis space.
  GridEvalResult eval_tensor_grid_amtc(const TensorGrid& grid) const;

  // Influenced share of the weighted op cost, in (0,1] for live inputs.
  double sparsity_ratio(int input_index) const;

  // Inputs with sparsity_ratio < threshold, and the rest; both sorted.
  std::pair<std::vector<int>, std::vector<int>> identify_sparse_inputs(double threshold = 0.05) const;

  std::string to_json(int indent = 2) const;

 private:
  NodeId append(OpNode node);
  NodeId unary(OpKind kind, NodeId a, double payload = 0.0);
  void check_id(NodeId id) const;
  void require_analyzed() const;
  double apply_scalar(const OpNode& n, const std::vector<double>& values,
                      const Eigen::VectorXd& u) const;

  std::vector<OpNode> nodes_;
  std::vector<double> cost_table_;
  NodeId output_ = -1;
  bool analyzed_ = false;
};

}  // namespace asuq
