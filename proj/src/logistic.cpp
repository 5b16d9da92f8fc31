#include "isir/logistic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace isir {

namespace {
double softplus(double t) {
  if (t > 35.0) return t;
  if (t < -35.0) return 0.0;
  return std::log1p(std::exp(t));
}
}  // namespace

LogisticPosterior::LogisticPosterior(MatrixXd design_, VectorXd labels_,
                                     double prior_variance_)
    : design(std::move(design_)),
      labels(std::move(labels_)),
      prior_variance(prior_variance_) {
  if (design.rows() != labels.size())
    throw std::invalid_argument("logistic: design/labels size mismatch");
  if (!design.allFinite())
    throw std::invalid_argument("logistic: non-finite design entries");
  for (int i = 0; i < labels.size(); ++i)
    if (labels[i] != 0.0 && labels[i] != 1.0)
      throw std::invalid_argument("logistic: labels must be 0/1");
  if (!(prior_variance > 0))
    throw std::invalid_argument("logistic: prior variance must be > 0");
}

double LogisticPosterior::log_density(const VectorXd& beta) const {
  const VectorXd t = design * beta;
  double ll = 0.0;
  for (int i = 0; i < t.size(); ++i)
    ll -= labels[i] > 0.5 ? softplus(-t[i]) : softplus(t[i]);
  return ll - 0.5 * beta.squaredNorm() / prior_variance;
}

VectorXd LogisticPosterior::gradient(const VectorXd& beta) const {
  const VectorXd t = design * beta;
  VectorXd p(t.size());
  for (int i = 0; i < t.size(); ++i) p[i] = 1.0 / (1.0 + std::exp(-t[i]));
  return design.transpose() * (labels - p) - beta / prior_variance;
}

MatrixXd LogisticPosterior::hessian(const VectorXd& beta) const {
  const VectorXd t = design * beta;
  VectorXd d(t.size());
  for (int i = 0; i < t.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-t[i]));
    d[i] = p * (1.0 - p);
  }
  MatrixXd h = -(design.transpose() * d.asDiagonal() * design);
  h.diagonal().array() -= 1.0 / prior_variance;
  return h;
}

double LaplaceApproximation::log_density(const VectorXd& x) const {
  const VectorXd z = chol.matrixL().solve(x - mu);
  return -0.5 * (mu.size() * std::log(2.0 * M_PI) + log_det_sigma +
                 z.squaredNorm());
}

VectorXd LaplaceApproximation::sample(RandomStream& rs) const {
  VectorXd z(mu.size());
  for (int i = 0; i < z.size(); ++i) z[i] = rs.normal();
  return mu + chol.matrixL() * z;
}

LaplaceApproximation fit_laplace(const LogisticPosterior& post,
                                 const VectorXd& init, double tol,
                                 int max_iter) {
  if (!(tol > 0)) throw std::invalid_argument("fit_laplace: tol must be > 0");
  VectorXd beta = init;
  double lp = post.log_density(beta);
  double gnorm = post.gradient(beta).lpNorm<Eigen::Infinity>();
  for (int it = 0; it < max_iter; ++it) {
    const VectorXd g = post.gradient(beta);
    gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= tol) break;
    const MatrixXd h = post.hessian(beta);
    Eigen::LLT<MatrixXd> neg_h((-h).eval());
    if (neg_h.info() != Eigen::Success)
      throw std::runtime_error("fit_laplace: negative Hessian not positive definite");
    VectorXd step = neg_h.solve(g);
    // step halving on the log posterior
    double scale = 1.0;
    for (int half = 0; half < 60; ++half) {
      const VectorXd cand = beta + scale * step;
      const double lp_cand = post.log_density(cand);
      if (lp_cand > lp - 1e-14) {
        beta = cand;
        lp = lp_cand;
        break;
      }
      scale *= 0.5;
      if (half == 59)
        throw std::runtime_error("fit_laplace: line search failed");
    }
  }
  gnorm = post.gradient(beta).lpNorm<Eigen::Infinity>();
  if (gnorm > tol) {
    std::ostringstream os;
    os << "fit_laplace: no convergence in " << max_iter
       << " iterations; last gradient sup-norm " << gnorm;
    throw std::runtime_error(os.str());
  }
  LaplaceApproximation out;
  out.mu = beta;
  const MatrixXd h = post.hessian(beta);
  Eigen::LLT<MatrixXd> neg_h((-h).eval());
  if (neg_h.info() != Eigen::Success)
    throw std::runtime_error("fit_laplace: singular Hessian at the mode");
  out.sigma = neg_h.solve(MatrixXd::Identity(beta.size(), beta.size()));
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
  out.chol = Eigen::LLT<MatrixXd>(out.sigma);
  if (out.chol.info() != Eigen::Success)
    throw std::runtime_error("fit_laplace: covariance not positive definite");
  out.log_det_sigma =
      2.0 * out.chol.matrixLLT().diagonal().array().log().sum();
  return out;
}

DefensiveMixtureProposal::DefensiveMixtureProposal(double w_prior_,
                                                   double prior_variance_,
                                                   LaplaceApproximation laplace_)
    : w_prior(w_prior_),
      prior_variance(prior_variance_),
      laplace(std::move(laplace_)) {
  if (!(w_prior > 0 && w_prior < 1))
    throw std::invalid_argument("defensive mixture: weight must be in (0,1)");
}

double DefensiveMixtureProposal::log_density(const VectorXd& x) const {
  const double d = static_cast<double>(x.size());
  const double lp_prior = -0.5 * (d * std::log(2.0 * M_PI * prior_variance) +
                                  x.squaredNorm() / prior_variance);
  const double lp_lap = laplace.log_density(x);
  const double a = std::log(w_prior) + lp_prior;
  const double b = std::log1p(-w_prior) + lp_lap;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

VectorXd DefensiveMixtureProposal::sample(RandomStream& rs) const {
  if (rs.uniform() < w_prior) {
    VectorXd x(laplace.mu.size());
    const double sd = std::sqrt(prior_variance);
    for (int i = 0; i < x.size(); ++i) x[i] = sd * rs.normal();
    return x;
  }
  return laplace.sample(rs);
}

LogisticModel make_logistic_model(MatrixXd design, VectorXd labels,
                                  double prior_variance) {
  LogisticPosterior post(std::move(design), std::move(labels), prior_variance);
  const VectorXd init = VectorXd::Zero(post.dim());
  LaplaceApproximation lap = fit_laplace(post, init);
  DefensiveMixtureProposal prop(0.1, prior_variance, std::move(lap));
  return LogisticModel{std::move(post), std::move(prop)};
}

}  // namespace isir
