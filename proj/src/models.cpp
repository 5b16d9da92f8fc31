#include "isir/models.hpp"

#include <cmath>
#include <stdexcept>

namespace isir {

namespace {
double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}
}  // namespace

GaussianMixtureTarget::GaussianMixtureTarget(std::vector<VectorXd> modes_,
                                             VectorXd weights_)
    : modes(std::move(modes_)), weights(std::move(weights_)) {
  if (modes.empty() || weights.size() != static_cast<long>(modes.size()))
    throw std::invalid_argument("mixture: modes/weights size mismatch");
  if (std::abs(weights.sum() - 1.0) > 1e-12 || (weights.array() <= 0).any())
    throw std::invalid_argument("mixture: weights must be positive, sum to 1");
  for (const auto& m : modes)
    if (m.size() != modes.front().size())
      throw std::invalid_argument("mixture: modes must share dimension");
}

double GaussianMixtureTarget::log_density(const VectorXd& x) const {
  const double c = -0.5 * dim() * std::log(2.0 * M_PI);
  double acc = kNegInf;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const double lj =
        std::log(weights[j]) + c - 0.5 * (x - modes[j]).squaredNorm();
    acc = log_sum_exp(acc, lj);
  }
  return acc;
}

VectorXd GaussianMixtureTarget::sample(RandomStream& rs) const {
  std::vector<double> w(weights.data(), weights.data() + weights.size());
  const int j = rs.categorical(w);
  VectorXd x = modes[j];
  for (int i = 0; i < x.size(); ++i) x[i] += rs.normal();
  return x;
}

StudentTProposal::StudentTProposal(double dof_, VectorXd location_)
    : dof(dof_), location(std::move(location_)) {
  if (!(dof > 0)) throw std::invalid_argument("student-t: dof must be > 0");
  const double d = static_cast<double>(dim());
  log_norm_const_ = std::lgamma(0.5 * (dof + d)) - std::lgamma(0.5 * dof) -
                    0.5 * d * std::log(dof * M_PI);
}

double StudentTProposal::log_density(const VectorXd& x) const {
  const double d = static_cast<double>(dim());
  const double r2 = (x - location).squaredNorm();
  return log_norm_const_ - 0.5 * (dof + d) * std::log1p(r2 / dof);
}

VectorXd StudentTProposal::sample(RandomStream& rs) const {
  // scale mixture: z / sqrt(V / dof), V ~ chi^2(dof)
  const double v = rs.chi_square(dof);
  const double scale = std::sqrt(dof / v);
  VectorXd x = location;
  for (int i = 0; i < x.size(); ++i) x[i] += scale * rs.normal();
  return x;
}

MixtureTModel make_mixture_example(int dim) {
  VectorXd m1 = VectorXd::Ones(dim);
  VectorXd m2 = VectorXd::Zero(dim);
  m2[0] = -2.0;
  VectorXd w(2);
  w << 0.5, 0.5;
  GaussianMixtureTarget target({m1, m2}, w);
  StudentTProposal proposal(3.0, VectorXd::Zero(dim));
  return MixtureTModel{std::move(target), std::move(proposal)};
}

double mixture_f1(const VectorXd& x) { return x[0]; }

double mixture_f2(const VectorXd& x) {
  // A = [-2,6] x [-1,1]^6, B = [0.75,1.25] x [1,2] x [-0.1,0.1]^5
  bool in_a = x[0] >= -2.0 && x[0] <= 6.0;
  for (int i = 1; i < x.size() && in_a; ++i)
    in_a = x[i] >= -1.0 && x[i] <= 1.0;
  bool in_b = x[0] >= 0.75 && x[0] <= 1.25 && x.size() >= 2 && x[1] >= 1.0 &&
              x[1] <= 2.0;
  for (int i = 2; i < x.size() && in_b; ++i)
    in_b = x[i] >= -0.1 && x[i] <= 0.1;
  return (in_a ? 1.0 : 0.0) - (in_b ? 1.0 : 0.0);
}

}  // namespace isir
