#include "asuq/distributions.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace asuq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

Marginal::Marginal(MarginalKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

Marginal Marginal::normal(double mean, double stddev) {
  if (!(stddev > 0.0)) throw std::invalid_argument("normal marginal: stddev must be positive");
  if (!std::isfinite(mean) || !std::isfinite(stddev))
    throw std::invalid_argument("normal marginal: parameters must be finite");
  return Marginal(MarginalKind::Normal, mean, stddev);
}

Marginal Marginal::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("uniform marginal: parameters must be finite");
  if (!(lo < hi)) throw std::invalid_argument("uniform marginal: requires lo < hi");
  return Marginal(MarginalKind::Uniform, lo, hi);
}

double Marginal::mean() const {
  return kind_ == MarginalKind::Normal ? a_ : 0.5 * (a_ + b_);
}

double Marginal::variance() const {
  if (kind_ == MarginalKind::Normal) return b_ * b_;
  double w = b_ - a_;
  return w * w / 12.0;
}

double Marginal::location() const { return mean(); }

double Marginal::scale() const {
  return kind_ == MarginalKind::Normal ? b_ : 0.5 * (b_ - a_);
}

double Marginal::pdf(double x) const {
  if (kind_ == MarginalKind::Normal) {
    double z = (x - a_) / b_;
    return kInvSqrt2Pi / b_ * std::exp(-0.5 * z * z);
  }
  return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0;
}

double Marginal::standardize(double x) const { return (x - location()) / scale(); }

double Marginal::destandardize(double z) const { return location() + scale() * z; }

bool Marginal::in_support(double x) const {
  if (kind_ == MarginalKind::Normal) return std::isfinite(x);
  return x >= a_ && x <= b_;
}

double Marginal::std_lo() const { return kind_ == MarginalKind::Normal ? -kInf : -1.0; }

double Marginal::std_hi() const { return kind_ == MarginalKind::Normal ? kInf : 1.0; }

RandomVector::RandomVector(std::vector<Marginal> marginals) : marginals_(std::move(marginals)) {
  if (marginals_.empty()) throw std::invalid_argument("random vector: needs at least one marginal");
}

const Marginal& RandomVector::marginal(int i) const {
  if (i < 0 || i >= dim()) throw std::invalid_argument("random vector: marginal index out of range");
  return marginals_[i];
}

bool RandomVector::all_normal() const {
  for (const auto& m : marginals_)
    if (m.kind() != MarginalKind::Normal) return false;
  return true;
}

double RandomVector::pdf(const Eigen::VectorXd& u) const {
  if (u.size() != dim()) throw std::invalid_argument("random vector: pdf argument has wrong dimension");
  double p = 1.0;
  for (int i = 0; i < dim(); ++i) p *= marginals_[i].pdf(u[i]);
  return p;
}

bool RandomVector::in_support(const Eigen::VectorXd& u) const {
  if (u.size() != dim()) throw std::invalid_argument("random vector: in_support argument has wrong dimension");
  for (int i = 0; i < dim(); ++i) {
    if (!marginals_[i].in_support(u[i])) return false;
  }
  return true;
}

Eigen::VectorXd RandomVector::standardize(const Eigen::VectorXd& u) const {
  if (u.size() != dim()) throw std::invalid_argument("random vector: standardize argument has wrong dimension");
  Eigen::VectorXd z(dim());
  for (int i = 0; i < dim(); ++i) z[i] = marginals_[i].standardize(u[i]);
  return z;
}

Eigen::VectorXd RandomVector::destandardize(const Eigen::VectorXd& z) const {
  if (z.size() != dim()) throw std::invalid_argument("random vector: destandardize argument has wrong dimension");
  Eigen::VectorXd u(dim());
  for (int i = 0; i < dim(); ++i) u[i] = marginals_[i].destandardize(z[i]);
  return u;
}

Eigen::MatrixXd RandomVector::sample(int n, std::uint64_t seed) const {
  if (n <= 0) throw std::invalid_argument("random vector: sample count must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  Eigen::MatrixXd out(n, dim());
  // Row by row so that adding draws never changes earlier ones.
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < dim(); ++c) {
      double z = marginals_[c].kind() == MarginalKind::Normal ? gauss(rng) : box(rng);
      out(r, c) = marginals_[c].destandardize(z);
    }
  return out;
}

RandomVector RandomVector::subset(const std::vector<int>& positions) const {
  std::vector<Marginal> sel;
  sel.reserve(positions.size());
  for (int p : positions) sel.push_back(marginal(p));
  return RandomVector(std::move(sel));
}

}  // namespace asuq
