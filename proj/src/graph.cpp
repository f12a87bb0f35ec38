#include "asuq/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace asuq {

namespace {

constexpr int kNumOpKinds = 14;

int arity_of(OpKind kind) {
  switch (kind) {
    case OpKind::Input:
    case OpKind::Const:
      return 0;
    case OpKind::Add:
    case OpKind::Sub:
    case OpKind::Mul:
    case OpKind::Div:
      return 2;
    case OpKind::SumOf:
      return -1;  // any
    default:
      return 1;
  }
}

}  // namespace

const char* op_kind_name(OpKind kind) {
  switch (kind) {
    case OpKind::Input: return "input";
    case OpKind::Const: return "const";
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Div: return "div";
    case OpKind::Neg: return "neg";
    case OpKind::Cos: return "cos";
    case OpKind::Sin: return "sin";
    case OpKind::Exp: return "exp";
    case OpKind::Sqrt: return "sqrt";
    case OpKind::Power: return "power";
    case OpKind::Scale: return "scale";
    case OpKind::SumOf: return "sum_of";
  }
  return "?";
}

TensorGrid::TensorGrid(std::vector<TensorGridAxis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("TensorGrid: no axes");
  for (TensorGridAxis& axis : axes_) {
    if (axis.inputs.empty()) throw std::invalid_argument("TensorGrid: axis with no inputs");
    std::sort(axis.inputs.begin(), axis.inputs.end());
    if (axis.nodes.rows() < 1 || axis.nodes.cols() != static_cast<Eigen::Index>(axis.inputs.size())) {
      throw std::invalid_argument("TensorGrid: node table shape does not match axis inputs");
    }
  }
  std::sort(axes_.begin(), axes_.end(), [](const TensorGridAxis& a, const TensorGridAxis& b) {
    return a.inputs.front() < b.inputs.front();
  });
  std::set<int> seen;
  for (const TensorGridAxis& axis : axes_) {
    for (int i : axis.inputs) {
      if (!seen.insert(i).second) {
        throw std::invalid_argument("TensorGrid: input " + std::to_string(i) +
                                    " appears on more than one axis");
      }
    }
  }
}

std::int64_t TensorGrid::total_points() const {
  std::int64_t n = 1;
  for (const TensorGridAxis& axis : axes_) n *= axis.nodes.rows();
  return n;
}

std::vector<int> TensorGrid::covered_inputs() const {
  std::vector<int> out;
  for (const TensorGridAxis& axis : axes_) out.insert(out.end(), axis.inputs.begin(), axis.inputs.end());
  std::sort(out.begin(), out.end());
  return out;
}

ExprGraph::ExprGraph() : cost_table_(kNumOpKinds, 1.0) {
  cost_table_[static_cast<int>(OpKind::Input)] = 0.0;
  cost_table_[static_cast<int>(OpKind::Const)] = 0.0;
}

NodeId ExprGraph::append(OpNode node) {
  node.unit_cost = cost_table_[static_cast<int>(node.kind)];
  nodes_.push_back(std::move(node));
  analyzed_ = false;
  return static_cast<NodeId>(nodes_.size() - 1);
}

void ExprGraph::check_id(NodeId id) const {
  if (id < 0 || id >= static_cast<NodeId>(nodes_.size())) {
    throw std::invalid_argument("ExprGraph: node id " + std::to_string(id) + " does not exist");
  }
}

NodeId ExprGraph::input(int uncertain_index) {
  if (uncertain_index < 0) throw std::invalid_argument("ExprGraph: negative input index");
  OpNode n{OpKind::Input, {}, 0.0, 0.0, uncertain_index, {}, true};
  return append(std::move(n));
}

NodeId ExprGraph::constant(double value) {
  OpNode n{OpKind::Const, {}, value, 0.0, -1, {}, true};
  return append(std::move(n));
}

NodeId ExprGraph::unary(OpKind kind, NodeId a, double payload) {
  check_id(a);
  OpNode n{kind, {a}, payload, 0.0, -1, {}, true};
  return append(std::move(n));
}

NodeId ExprGraph::add(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  return append(OpNode{OpKind::Add, {a, b}, 0.0, 0.0, -1, {}, true});
}

NodeId ExprGraph::sub(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  return append(OpNode{OpKind::Sub, {a, b}, 0.0, 0.0, -1, {}, true});
}

NodeId ExprGraph::mul(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  return append(OpNode{OpKind::Mul, {a, b}, 0.0, 0.0, -1, {}, true});
}

NodeId ExprGraph::div(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  return append(OpNode{OpKind::Div, {a, b}, 0.0, 0.0, -1, {}, true});
}

NodeId ExprGraph::neg(NodeId a) { return unary(OpKind::Neg, a); }
NodeId ExprGraph::cos(NodeId a) { return unary(OpKind::Cos, a); }
NodeId ExprGraph::sin(NodeId a) { return unary(OpKind::Sin, a); }
NodeId ExprGraph::exp(NodeId a) { return unary(OpKind::Exp, a); }
NodeId ExprGraph::sqrt(NodeId a) { return unary(OpKind::Sqrt, a); }
NodeId ExprGraph::power(NodeId a, double exponent) { return unary(OpKind::Power, a, exponent); }
NodeId ExprGraph::scale(double factor, NodeId a) { return unary(OpKind::Scale, a, factor); }

NodeId ExprGraph::sum_of(const std::vector<NodeId>& terms) {
  if (terms.empty()) throw std::invalid_argument("ExprGraph: sum_of needs at least one term");
  for (NodeId t : terms) check_id(t);
  return append(OpNode{OpKind::SumOf, terms, 0.0, 0.0, -1, {}, true});
}

void ExprGraph::set_output(NodeId id) {
  check_id(id);
  output_ = id;
  analyzed_ = false;
}

void ExprGraph::set_unit_cost(OpKind kind, double cost) {
  if (!(cost >= 0.0) || !std::isfinite(cost)) {
    throw std::invalid_argument("ExprGraph: unit cost must be finite and >= 0");
  }
  cost_table_[static_cast<int>(kind)] = cost;
  for (OpNode& n : nodes_) {
    if (n.kind == kind) n.unit_cost = cost;
  }
}

void ExprGraph::analyze_dependencies() {
  if (output_ < 0) throw std::logic_error("ExprGraph: output not set");

  // Dead-code flagging: keep only ancestors of the output.
  for (OpNode& n : nodes_) n.live = false;
  std::vector<NodeId> stack{output_};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (nodes_[static_cast<std::size_t>(id)].live) continue;
    nodes_[static_cast<std::size_t>(id)].live = true;
    for (NodeId p : nodes_[static_cast<std::size_t>(id)].parents) stack.push_back(p);
  }

  // Ids are topological, so one forward pass settles every dep_set.
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    OpNode& n = nodes_[id];
    n.dep_set.clear();
    if (!n.live) continue;
    if (n.kind == OpKind::Input) {
      n.dep_set = {n.input_index};
      continue;
    }
    std::set<int> deps;
    for (NodeId p : n.parents) {
      const std::vector<int>& pd = nodes_[static_cast<std::size_t>(p)].dep_set;
      deps.insert(pd.begin(), pd.end());
    }
    n.dep_set.assign(deps.begin(), deps.end());
  }
  analyzed_ = true;
}

const OpNode& ExprGraph::node(NodeId id) const {
  check_id(id);
  return nodes_[static_cast<std::size_t>(id)];
}

std::vector<int> ExprGraph::input_indices() const {
  std::set<int> seen;
  for (const OpNode& n : nodes_) {
    if (n.kind == OpKind::Input) seen.insert(n.input_index);
  }
  return {seen.begin(), seen.end()};
}

void ExprGraph::require_analyzed() const {
  if (!analyzed_) throw std::logic_error("ExprGraph: call analyze_dependencies() first");
}

double ExprGraph::apply_scalar(const OpNode& n, const std::vector<double>& values,
                               const Eigen::VectorXd& u) const {
  auto p = [&](int i) { return values[static_cast<std::size_t>(n.parents[static_cast<std::size_t>(i)])]; };
  switch (n.kind) {
    case OpKind::Input:
      if (n.input_index >= u.size()) {
        throw std::invalid_argument("ExprGraph: point has no coordinate for input " +
                                    std::to_string(n.input_index));
      }
      return u[n.input_index];
    case OpKind::Const: return n.payload;
    case OpKind::Add: return p(0) + p(1);
    case OpKind::Sub: return p(0) - p(1);
    case OpKind::Mul: return p(0) * p(1);
    case OpKind::Div: return p(0) / p(1);
    case OpKind::Neg: return -p(0);
    case OpKind::Cos: return std::cos(p(0));
    case OpKind::Sin: return std::sin(p(0));
    case OpKind::Exp: return std::exp(p(0));
    case OpKind::Sqrt: return std::sqrt(p(0));
    case OpKind::Power: return std::pow(p(0), n.payload);
    case OpKind::Scale: return n.payload * p(0);
    case OpKind::SumOf: {
      double s = 0.0;
      for (std::size_t i = 0; i < n.parents.size(); ++i) s += p(static_cast<int>(i));
      return s;
    }
  }
  throw std::logic_error("ExprGraph: unhandled op kind");
}

double ExprGraph::eval_pointwise(const Eigen::VectorXd& u) const {
  require_analyzed();
  std::vector<double> values(nodes_.size(), 0.0);
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const OpNode& n = nodes_[id];
    if (n.live) values[id] = apply_scalar(n, values, u);
  }
  return values[static_cast<std::size_t>(output_)];
}

namespace {

// Maps a live-input index to the axis holding it; throws when uncovered.
std::vector<int> axis_of_input(const TensorGrid& grid, const std::vector<OpNode>& nodes) {
  int max_input = -1;
  for (const OpNode& n : nodes) {
    if (n.live && n.kind == OpKind::Input) max_input = std::max(max_input, n.input_index);
  }
  std::vector<int> axis(static_cast<std::size_t>(max_input + 1), -1);
  for (std::size_t a = 0; a < grid.axes().size(); ++a) {
    for (int i : grid.axes()[a].inputs) {
      if (i <= max_input) axis[static_cast<std::size_t>(i)] = static_cast<int>(a);
    }
  }
  for (const OpNode& n : nodes) {
    if (n.live && n.kind == OpKind::Input && axis[static_cast<std::size_t>(n.input_index)] < 0) {
      throw std::invalid_argument("tensor grid covers no axis for input " +
                                  std::to_string(n.input_index));
    }
  }
  return axis;
}

}  // namespace

GridEvalResult ExprGraph::eval_tensor_grid_naive(const TensorGrid& grid) const {
  require_analyzed();
  const std::vector<int> input_axis = axis_of_input(grid, nodes_);
  const std::int64_t total = grid.total_points();
  const int num_axes = static_cast<int>(grid.axes().size());

  int max_input = -1;
  for (int i : grid.covered_inputs()) max_input = std::max(max_input, i);
  Eigen::VectorXd u(max_input + 1);

  GridEvalResult result;
  result.values.resize(total);
  result.counters.assign(nodes_.size(), 0);
  result.total_points = total;

  std::vector<std::int64_t> coord(static_cast<std::size_t>(num_axes), 0);
  std::vector<double> values(nodes_.size(), 0.0);
  for (std::int64_t point = 0; point < total; ++point) {
    std::int64_t rem = point;
    for (int a = num_axes - 1; a >= 0; --a) {
      const std::int64_t count = grid.axes()[static_cast<std::size_t>(a)].nodes.rows();
      coord[static_cast<std::size_t>(a)] = rem % count;
      rem /= count;
    }
    for (int a = 0; a < num_axes; ++a) {
      const TensorGridAxis& axis = grid.axes()[static_cast<std::size_t>(a)];
      for (std::size_t j = 0; j < axis.inputs.size(); ++j) {
        u[axis.inputs[j]] = axis.nodes(coord[static_cast<std::size_t>(a)], static_cast<Eigen::Index>(j));
      }
    }
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
      if (nodes_[id].live) values[id] = apply_scalar(nodes_[id], values, u);
    }
    result.values[point] = values[static_cast<std::size_t>(output_)];
  }

  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    if (!nodes_[id].live) continue;
    result.counters[id] = total;
    result.weighted_cost += nodes_[id].unit_cost * static_cast<double>(total);
  }
  return result;
}

GridEvalResult ExprGraph::eval_tensor_grid_amtc(const TensorGrid& grid) const {
  require_analyzed();
  const std::vector<int> input_axis = axis_of_input(grid, nodes_);
  const int num_axes = static_cast<int>(grid.axes().size());
  std::vector<std::int64_t> axis_count(static_cast<std::size_t>(num_axes));
  for (int a = 0; a < num_axes; ++a) {
    axis_count[static_cast<std::size_t>(a)] = grid.axes()[static_cast<std::size_t>(a)].nodes.rows();
  }

  GridEvalResult result;
  result.counters.assign(nodes_.size(), 0);
  result.total_points = grid.total_points();

  // Per node: the sorted axes its dep_set touches, and its value array over
  // the product of those axes (row-major, first axis slowest).
  std::vector<std::vector<int>> node_axes(nodes_.size());
  std::vector<Eigen::VectorXd> arrays(nodes_.size());

  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const OpNode& n = nodes_[id];
    if (!n.live) continue;

    if (n.kind == OpKind::Input) {
      const int a = input_axis[static_cast<std::size_t>(n.input_index)];
      const TensorGridAxis& axis = grid.axes()[static_cast<std::size_t>(a)];
      const auto col = std::find(axis.inputs.begin(), axis.inputs.end(), n.input_index) - axis.inputs.begin();
      node_axes[id] = {a};
      arrays[id] = axis.nodes.col(col);
    } else if (n.kind == OpKind::Const) {
      node_axes[id] = {};
      arrays[id] = Eigen::VectorXd::Constant(1, n.payload);
    } else {
      std::set<int> merged;
      for (NodeId p : n.parents) {
        merged.insert(node_axes[static_cast<std::size_t>(p)].begin(),
                      node_axes[static_cast<std::size_t>(p)].end());
      }
      node_axes[id].assign(merged.begin(), merged.end());
      const std::vector<int>& axes = node_axes[id];

      std::int64_t size = 1;
      for (int a : axes) size *= axis_count[static_cast<std::size_t>(a)];

      // Stride of each child axis inside every parent's flat layout; 0 for
      // axes the parent lacks, which is the broadcast.
      std::vector<std::vector<std::int64_t>> pstride(n.parents.size());
      for (std::size_t pi = 0; pi < n.parents.size(); ++pi) {
        const std::vector<int>& paxes = node_axes[static_cast<std::size_t>(n.parents[pi])];
        std::vector<std::int64_t> stride(axes.size(), 0);
        std::int64_t s = 1;
        for (auto it = paxes.rbegin(); it != paxes.rend(); ++it) {
          const auto pos = std::find(axes.begin(), axes.end(), *it) - axes.begin();
          stride[static_cast<std::size_t>(pos)] = s;
          s *= axis_count[static_cast<std::size_t>(*it)];
        }
        pstride[pi] = std::move(stride);
      }

      Eigen::VectorXd out(size);
      std::vector<std::int64_t> coord(axes.size(), 0);
      std::vector<std::int64_t> pindex(n.parents.size(), 0);
      std::vector<double> pvals(n.parents.size(), 0.0);
      for (std::int64_t pos = 0; pos < size; ++pos) {
        std::int64_t rem = pos;
        for (int j = static_cast<int>(axes.size()) - 1; j >= 0; --j) {
          const std::int64_t count = axis_count[static_cast<std::size_t>(axes[static_cast<std::size_t>(j)])];
          coord[static_cast<std::size_t>(j)] = rem % count;
          rem /= count;
        }
        for (std::size_t pi = 0; pi < n.parents.size(); ++pi) {
          std::int64_t flat = 0;
          for (std::size_t j = 0; j < axes.size(); ++j) flat += coord[j] * pstride[pi][j];
          pvals[pi] = arrays[static_cast<std::size_t>(n.parents[pi])][flat];
        }
        double v = 0.0;
        switch (n.kind) {
          case OpKind::Add: v = pvals[0] + pvals[1]; break;
          case OpKind::Sub: v = pvals[0] - pvals[1]; break;
          case OpKind::Mul: v = pvals[0] * pvals[1]; break;
          case OpKind::Div: v = pvals[0] / pvals[1]; break;
          case OpKind::Neg: v = -pvals[0]; break;
          case OpKind::Cos: v = std::cos(pvals[0]); break;
          case OpKind::Sin: v = std::sin(pvals[0]); break;
          case OpKind::Exp: v = std::exp(pvals[0]); break;
          case OpKind::Sqrt: v = std::sqrt(pvals[0]); break;
          case OpKind::Power: v = std::pow(pvals[0], n.payload); break;
          case OpKind::Scale: v = n.payload * pvals[0]; break;
          case OpKind::SumOf: {
            for (double pv : pvals) v += pv;
            break;
          }
          default: throw std::logic_error("ExprGraph: unhandled op kind");
        }
        out[pos] = v;
      }
      arrays[id] = std::move(out);
    }

    result.counters[id] = arrays[id].size();
    result.weighted_cost += n.unit_cost * static_cast<double>(arrays[id].size());
  }

  // Broadcast the output array over any axes it does not depend on.
  const std::vector<int>& oaxes = node_axes[static_cast<std::size_t>(output_)];
  std::vector<std::int64_t> ostride(static_cast<std::size_t>(num_axes), 0);
  std::int64_t s = 1;
  for (auto it = oaxes.rbegin(); it != oaxes.rend(); ++it) {
    ostride[static_cast<std::size_t>(*it)] = s;
    s *= axis_count[static_cast<std::size_t>(*it)];
  }
  const std::int64_t total = result.total_points;
  result.values.resize(total);
  const Eigen::VectorXd& oarr = arrays[static_cast<std::size_t>(output_)];
  for (std::int64_t point = 0; point < total; ++point) {
    std::int64_t rem = point;
    std::int64_t flat = 0;
    for (int a = num_axes - 1; a >= 0; --a) {
      const std::int64_t count = axis_count[static_cast<std::size_t>(a)];
      flat += (rem % count) * ostride[static_cast<std::size_t>(a)];
      rem /= count;
    }
    result.values[point] = oarr[flat];
  }
  return result;
}

double ExprGraph::sparsity_ratio(int input_index) const {
  require_analyzed();
  const std::vector<int> known = input_indices();
  if (!std::binary_search(known.begin(), known.end(), input_index)) {
    throw std::invalid_argument("sparsity_ratio: unknown input index " + std::to_string(input_index));
  }
  double influenced = 0.0;
  double total = 0.0;
  for (const OpNode& n : nodes_) {
    if (!n.live || n.kind == OpKind::Input) continue;
    total += n.unit_cost;
    if (std::binary_search(n.dep_set.begin(), n.dep_set.end(), input_index)) influenced += n.unit_cost;
  }
  if (total <= 0.0) return 0.0;
  return influenced / total;
}

std::pair<std::vector<int>, std::vector<int>> ExprGraph::identify_sparse_inputs(double threshold) const {
  require_analyzed();
  std::vector<int> sparse, dense;
  for (int i : input_indices()) {
    (sparsity_ratio(i) < threshold ? sparse : dense).push_back(i);
  }
  return {sparse, dense};
}

std::string ExprGraph::to_json(int indent) const {
  nlohmann::json doc;
  doc["output"] = output_;
  doc["nodes"] = nlohmann::json::array();
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const OpNode& n = nodes_[id];
    nlohmann::json jn;
    jn["id"] = id;
    jn["op"] = op_kind_name(n.kind);
    jn["parents"] = n.parents;
    jn["unit_cost"] = n.unit_cost;
    jn["live"] = n.live;
    if (n.kind == OpKind::Input) jn["input_index"] = n.input_index;
    if (n.kind == OpKind::Const || n.kind == OpKind::Power || n.kind == OpKind::Scale) {
      jn["payload"] = n.payload;
    }
    if (analyzed_) jn["dep_set"] = n.dep_set;
    doc["nodes"].push_back(std::move(jn));
  }
  return doc.dump(indent);
}

}  // namespace asuq
