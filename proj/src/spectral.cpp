#include "isir/spectral.hpp"

#include <cmath>
#include <sstream>

namespace isir {

SpectralDecomposition::SpectralDecomposition(const VectorXd& pi,
                                             const MatrixXd& P,
                                             const SpectralOptions& opts)
    : pi_(pi), sqrt_pi_(pi.array().sqrt()) {
  const int n = static_cast<int>(pi.size());
  db_residual_ = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      db_residual_ = std::max(
          db_residual_, std::abs(pi[i] * P(i, j) - pi[j] * P(j, i)));
  if (db_residual_ > opts.db_tol) {
    std::ostringstream os;
    os << "spectral_asvar: detailed-balance residual " << db_residual_
       << " exceeds tolerance " << opts.db_tol;
    throw std::runtime_error(os.str());
  }
  MatrixXd S = sqrt_pi_.asDiagonal() * P * sqrt_pi_.cwiseInverse().asDiagonal();
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_asvar: eigendecomposition failed");
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
  // eigenvalues are ascending; the Perron root is the last
  perron_index_ = n - 1;
  if (std::abs(eigenvalues_[perron_index_] - 1.0) > opts.perron_tol) {
    std::ostringstream os;
    os << "spectral_asvar: leading eigenvalue " << eigenvalues_[perron_index_]
       << " not within " << opts.perron_tol << " of 1";
    throw std::runtime_error(os.str());
  }
  for (int i = 0; i < n - 1; ++i)
    if (eigenvalues_[i] >= 1.0 - 1e-12)
      throw std::runtime_error(
          "spectral_asvar: non-Perron eigenvalue at 1 (chain not ergodic?)");
}

double SpectralDecomposition::asvar(const VectorXd& f) const {
  const VectorXd fbar = f.array() - pi_.dot(f);
  const VectorXd coords = eigenvectors_.transpose() * (sqrt_pi_.asDiagonal() * fbar);
  double var = 0.0;
  for (int i = 0; i < eigenvalues_.size(); ++i) {
    if (i == perron_index_) continue;
    const double l = eigenvalues_[i];
    var += coords[i] * coords[i] * (1.0 + l) / (1.0 - l);
  }
  return var;
}

double fundamental_asvar(const VectorXd& pi, const MatrixXd& P,
                         const VectorXd& f) {
  const int n = static_cast<int>(pi.size());
  const VectorXd fbar = f.array() - pi.dot(f);
  MatrixXd A = MatrixXd::Identity(n, n) - P +
               VectorXd::Ones(n) * pi.transpose();
  const VectorXd h = A.partialPivLu().solve(fbar);
  const double ff = fbar.cwiseProduct(fbar).dot(pi);
  return 2.0 * fbar.cwiseProduct(h).dot(pi) - ff;
}

double spectral_asvar(const VectorXd& pi, const MatrixXd& P, const VectorXd& f,
                      const SpectralOptions& opts) {
  SpectralDecomposition dec(pi, P, opts);
  const double v = dec.asvar(f);
  if (opts.cross_check) {
    const double v2 = fundamental_asvar(pi, P, f);
    const double scale = std::max(1.0, std::abs(v));
    if (std::abs(v - v2) > opts.route_tol * scale) {
      std::ostringstream os;
      os << "spectral_asvar: route disagreement " << v << " vs " << v2;
      throw std::runtime_error(os.str());
    }
  }
  return v;
}

}  // namespace isir
