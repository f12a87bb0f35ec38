#include "asuq/models.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace asuq {

namespace {

struct PistonParts {
  double a;
  double disc;
  double v;
  double e;  // k + S^2 P0 V0 Ta / (T0 V^2)
};

PistonParts piston_parts(const Eigen::VectorXd& u) {
  if (u.size() != 7) throw std::invalid_argument("piston: expected 7 inputs");
  const double m = u[0], s = u[1], v0 = u[2], k = u[3], p0 = u[4], ta = u[5], t0 = u[6];
  const double a = p0 * s + 19.62 * m - k * v0 / s;
  const double disc = a * a + 4.0 * k * (p0 * v0 / t0) * ta;
  if (disc < 0.0) throw std::domain_error("piston: negative discriminant");
  const double v = s / (2.0 * k) * (std::sqrt(disc) - a);
  if (!(v > 0.0)) throw std::domain_error("piston: non-physical chamber volume");
  const double e = k + s * s * p0 * v0 * ta / (t0 * v * v);
  if (!(m > 0.0) || !(e > 0.0)) throw std::domain_error("piston: non-physical cycle argument");
  return {a, disc, v, e};
}

}  // namespace

double piston_eval(const Eigen::VectorXd& u) {
  const PistonParts p = piston_parts(u);
  return 2.0 * std::numbers::pi * std::sqrt(u[0] / p.e);
}

Eigen::VectorXd piston_gradient(const Eigen::VectorXd& u) {
  const PistonParts p = piston_parts(u);
  const double m = u[0], s = u[1], v0 = u[2], k = u[3], p0 = u[4], ta = u[5], t0 = u[6];
  const double r = std::sqrt(p.disc);
  const double f = p.e - k;  // S^2 P0 V0 Ta / (T0 V^2)

  Eigen::VectorXd grad(7);
  for (int i = 0; i < 7; ++i) {
    const double dm = i == 0, ds = i == 1, dv0 = i == 2, dk = i == 3;
    const double dp0 = i == 4, dta = i == 5, dt0 = i == 6;

    const double da = dp0 * s + p0 * ds + 19.62 * dm - (dk * v0 + k * dv0) / s + k * v0 * ds / (s * s);
    // b = 4 k p0 v0 ta / t0
    const double b = 4.0 * k * p0 * v0 * ta / t0;
    const double db = b * (dk / k + dp0 / p0 + dv0 / v0 + dta / ta - dt0 / t0);
    const double dr = (2.0 * p.a * da + db) / (2.0 * r);
    const double dv = ds / (2.0 * k) * (r - p.a) - s * dk / (2.0 * k * k) * (r - p.a) +
                      s / (2.0 * k) * (dr - da);
    const double df = f * (2.0 * ds / s + dp0 / p0 + dv0 / v0 + dta / ta - dt0 / t0 - 2.0 * dv / p.v);
    const double de = dk + df;
    // C = 2 pi sqrt(m / e)
    grad[i] = std::numbers::pi * (dm * p.e - m * de) / (p.e * p.e * std::sqrt(m / p.e));
  }
  return grad;
}

RandomVector piston_random_vector() {
  return RandomVector({
      Marginal::normal(45.0, 3.0),       // M
      Marginal::normal(0.01, 0.001),     // S
      Marginal::normal(0.010, 0.001),    // V0
      Marginal::normal(3000.0, 200.0),   // k
      Marginal::normal(90000.0, 5000.0), // P0
      Marginal::normal(290.0, 20.0),     // Ta
      Marginal::normal(340.0, 20.0),     // T0
  });
}

ExprGraph piston_graph() {
  ExprGraph g;
  const NodeId m = g.input(0);
  const NodeId s = g.input(1);
  const NodeId v0 = g.input(2);
  const NodeId k = g.input(3);
  const NodeId p0 = g.input(4);
  const NodeId ta = g.input(5);
  const NodeId t0 = g.input(6);

  const NodeId p0s = g.mul(p0, s);
  const NodeId m19 = g.scale(19.62, m);
  const NodeId kv0 = g.mul(k, v0);
  const NodeId kv0_s = g.div(kv0, s);
  const NodeId p0s_m19 = g.add(p0s, m19);
  const NodeId a = g.sub(p0s_m19, kv0_s);

  const NodeId pv = g.mul(p0, v0);
  const NodeId pv_t0 = g.div(pv, t0);
  const NodeId kpv = g.mul(k, pv_t0);
  const NodeId kpvta = g.mul(kpv, ta);
  const NodeId b = g.scale(4.0, kpvta);
  const NodeId a2 = g.power(a, 2.0);
  const NodeId disc = g.add(a2, b);
  const NodeId r = g.sqrt(disc);

  const NodeId r_a = g.sub(r, a);
  const NodeId k2 = g.scale(2.0, k);
  const NodeId s_2k = g.div(s, k2);
  const NodeId v = g.mul(s_2k, r_a);

  const NodeId s2 = g.power(s, 2.0);
  const NodeId s2pv = g.mul(s2, pv_t0);
  const NodeId s2pvta = g.mul(s2pv, ta);
  const NodeId v2 = g.power(v, 2.0);
  const NodeId f = g.div(s2pvta, v2);
  const NodeId e = g.add(k, f);
  const NodeId me = g.div(m, e);
  const NodeId root = g.sqrt(me);
  const NodeId c = g.scale(2.0 * std::numbers::pi, root);

  g.set_output(c);
  g.analyze_dependencies();
  return g;
}

RandomVector sparse_tail_random_vector(const SparseTailSpec& spec) {
  if (spec.d_ns < 2 || spec.d_s < 0) throw std::invalid_argument("sparse_tail: bad dimensions");
  std::vector<Marginal> marginals(static_cast<std::size_t>(spec.d_ns + spec.d_s),
                                  Marginal::normal(0.0, 1.0));
  return RandomVector(std::move(marginals));
}

ExprGraph sparse_tail_graph(const SparseTailSpec& spec) {
  if (spec.d_ns < 2 || spec.d_s < 0) throw std::invalid_argument("sparse_tail: bad dimensions");
  if (spec.d_s > 0 && spec.chain_length < 20 * spec.d_s) {
    throw std::invalid_argument("sparse_tail: chain_length must be >= 20 * d_s");
  }
  const int d_ns = spec.d_ns;

  // Fixed mix directions: a dominant unit ridge a, plus two slight tilts of
  // it, so the core has a one-dimensional active subspace by construction.
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd a(d_ns);
  for (int l = 0; l < d_ns; ++l) a[l] = 1.0 + 0.3 * normal(rng);
  a.normalize();
  Eigen::MatrixXd mixes(3, d_ns);
  mixes.row(0) = a.transpose();
  for (int r = 1; r < 3; ++r) {
    Eigen::VectorXd perp(d_ns);
    for (int l = 0; l < d_ns; ++l) perp[l] = normal(rng);
    perp -= perp.dot(a) * a;
    perp.normalize();
    mixes.row(r) = (a + 0.05 * perp).normalized().transpose();
  }

  ExprGraph g;
  std::vector<NodeId> ns_inputs(static_cast<std::size_t>(d_ns));
  for (int l = 0; l < d_ns; ++l) ns_inputs[static_cast<std::size_t>(l)] = g.input(l);
  std::vector<NodeId> s_inputs(static_cast<std::size_t>(spec.d_s));
  for (int j = 0; j < spec.d_s; ++j) s_inputs[static_cast<std::size_t>(j)] = g.input(d_ns + j);

  NodeId z[3];
  for (int r = 0; r < 3; ++r) {
    std::vector<NodeId> terms(static_cast<std::size_t>(d_ns));
    for (int l = 0; l < d_ns; ++l) {
      terms[static_cast<std::size_t>(l)] = g.scale(mixes(r, l), ns_inputs[static_cast<std::size_t>(l)]);
    }
    z[r] = g.sum_of(terms);
  }

  // Core chain: cycles of cos -> add(z1|z2) -> scale -> exp, exactly
  // chain_length nodes long.  The 0.35 damping keeps values bounded.
  NodeId c = z[0];
  for (int i = 0; i < spec.chain_length; ++i) {
    switch (i % 4) {
      case 0: c = g.cos(c); break;
      case 1: c = g.add(c, z[1 + (i / 4) % 2]); break;
      case 2: c = g.scale(0.35, c); break;
      case 3: c = g.exp(c); break;
    }
  }
  const NodeId ridge = g.scale(0.6, z[0]);
  const NodeId y = g.add(c, ridge);

  if (spec.d_s == 0) {
    g.set_output(y);
    g.analyze_dependencies();
    return g;
  }

  // f = y * (1 + sum_j c_j u_sj) + sum_j sin(u_sj); each sparse input touches
  // only a handful of nodes, so its cost share stays far below the core's.
  std::vector<NodeId> amp_terms;
  amp_terms.push_back(g.constant(1.0));
  for (int j = 0; j < spec.d_s; ++j) {
    amp_terms.push_back(g.scale(0.15 * (j + 1), s_inputs[static_cast<std::size_t>(j)]));
  }
  const NodeId amp = g.sum_of(amp_terms);
  const NodeId prod = g.mul(y, amp);
  std::vector<NodeId> sin_terms(static_cast<std::size_t>(spec.d_s));
  for (int j = 0; j < spec.d_s; ++j) {
    sin_terms[static_cast<std::size_t>(j)] = g.sin(s_inputs[static_cast<std::size_t>(j)]);
  }
  const NodeId tail = g.sum_of(sin_terms);
  const NodeId out = g.add(prod, tail);

  g.set_output(out);
  g.analyze_dependencies();
  return g;
}

ModelBundle make_model(const std::string& name, const SparseTailSpec& spec) {
  if (name == "piston") {
    auto graph = std::make_shared<ExprGraph>(piston_graph());
    return ModelBundle{name, piston_random_vector(), piston_eval, piston_gradient, graph};
  }
  if (name == "sparse-tail") {
    auto graph = std::make_shared<ExprGraph>(sparse_tail_graph(spec));
    RandomVector rv = sparse_tail_random_vector(spec);
    ScalarFn eval = [graph](const Eigen::VectorXd& u) { return graph->eval_pointwise(u); };
    GradientFn grad = finite_difference_gradient(eval, rv);
    return ModelBundle{name, std::move(rv), std::move(eval), std::move(grad), graph};
  }
  throw std::invalid_argument("unknown model '" + name + "'; expected piston or sparse-tail");
}

}  // namespace asuq
