// Bayesian logistic regression with Gaussian prior, its Laplace
// approximation, and the defensive mixture proposal built from both.
#pragma once

#include <Eigen/Dense>

#include "isir/model.hpp"
#include "isir/rng.hpp"

namespace isir {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct LogisticPosterior {
  MatrixXd design;  // n_obs x (p+1), intercept column prepended
  VectorXd labels;  // entries in {0,1}
  double prior_variance;

  LogisticPosterior(MatrixXd design_, VectorXd labels_, double prior_variance_);
  int dim() const { return static_cast<int>(design.cols()); }
  double log_density(const VectorXd& beta) const;  // unnormalised log posterior
  VectorXd gradient(const VectorXd& beta) const;
  MatrixXd hessian(const VectorXd& beta) const;
};

struct LaplaceApproximation {
  VectorXd mu;
  MatrixXd sigma;
  Eigen::LLT<MatrixXd> chol;  // of sigma

  double log_density(const VectorXd& x) const;
  VectorXd sample(RandomStream& rs) const;
  double log_det_sigma;
};

// Damped Newton with step halving on the log posterior.
LaplaceApproximation fit_laplace(const LogisticPosterior& post,
                                 const VectorXd& init, double tol = 1e-8,
                                 int max_iter = 200);

// q(x) = w_prior * N(0, prior_variance I) + (1 - w_prior) * laplace
struct DefensiveMixtureProposal {
  double w_prior;
  double prior_variance;
  LaplaceApproximation laplace;

  DefensiveMixtureProposal(double w_prior_, double prior_variance_,
                           LaplaceApproximation laplace_);
  double log_density(const VectorXd& x) const;
  VectorXd sample(RandomStream& rs) const;
};

struct LogisticModel {
  using State = VectorXd;
  LogisticPosterior posterior;
  DefensiveMixtureProposal proposal;

  double log_target_u(const State& x) const { return posterior.log_density(x); }
  double log_proposal(const State& x) const { return proposal.log_density(x); }
  State sample_proposal(RandomStream& rs) const { return proposal.sample(rs); }
};

// Standard setup: fit the Laplace approximation from the prior mode and mix
// 0.1 prior + 0.9 Laplace.
LogisticModel make_logistic_model(MatrixXd design, VectorXd labels,
                                  double prior_variance = 20.0);

}  // namespace isir
