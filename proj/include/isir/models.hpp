// Concrete continuous models: Gaussian mixture target with student-t
// proposal, and multivariate Gaussian / student-t building blocks.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "isir/model.hpp"
#include "isir/rng.hpp"

namespace isir {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Mixture of isotropic unit-covariance Gaussians.
struct GaussianMixtureTarget {
  std::vector<VectorXd> modes;
  VectorXd weights;  // must sum to 1

  GaussianMixtureTarget(std::vector<VectorXd> modes_, VectorXd weights_);
  int dim() const { return static_cast<int>(modes.front().size()); }
  double log_density(const VectorXd& x) const;
  VectorXd sample(RandomStream& rs) const;
};

// Multivariate student-t with identity shape.
struct StudentTProposal {
  double dof;
  VectorXd location;

  StudentTProposal(double dof_, VectorXd location_);
  int dim() const { return static_cast<int>(location.size()); }
  double log_density(const VectorXd& x) const;
  VectorXd sample(RandomStream& rs) const;

 private:
  double log_norm_const_;
};

// Target/proposal pair for the mixture experiment.
struct MixtureTModel {
  using State = VectorXd;
  GaussianMixtureTarget target;
  StudentTProposal proposal;

  double log_target_u(const State& x) const { return target.log_density(x); }
  double log_proposal(const State& x) const { return proposal.log_density(x); }
  State sample_proposal(RandomStream& rs) const { return proposal.sample(rs); }
};

// The 7-d two-mode example: modes (1,...,1) and (-2,0,...,0), equal weights,
// student-t(3) proposal at the origin.
MixtureTModel make_mixture_example(int dim = 7);

// Test functions of the mixture experiment: f1(x) = x_1 and
// f2(x) = 1{x in A} - 1{x in B}.
double mixture_f1(const VectorXd& x);
double mixture_f2(const VectorXd& x);

}  // namespace isir
