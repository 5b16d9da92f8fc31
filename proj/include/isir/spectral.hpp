// Asymptotic variance of a reversible finite chain, two independent routes:
// symmetric eigendecomposition and the fundamental-matrix solve.
#pragma once

#include <Eigen/Dense>

#include "isir/discrete.hpp"

namespace isir {

struct SpectralOptions {
  double db_tol = 1e-10;        // detailed-balance residual tolerance
  double perron_tol = 1e-10;    // |largest eigenvalue - 1| tolerance
  double route_tol = 1e-8;      // agreement between the two routes
  bool cross_check = true;
};

// var(P, f - pi(f)) for a pi-reversible row-stochastic P. Throws on
// detailed-balance violation, on a non-Perron eigenvalue >= 1 - 1e-12, or
// when the two routes disagree.
double spectral_asvar(const VectorXd& pi, const MatrixXd& P, const VectorXd& f,
                      const SpectralOptions& opts = {});

// Fundamental-matrix route alone: solve (I - P + 1 pi^T) h = fbar,
// var = 2 <fbar|h>_pi - <fbar|fbar>_pi.
double fundamental_asvar(const VectorXd& pi, const MatrixXd& P,
                         const VectorXd& f);

// One decomposition, many test functions.
class SpectralDecomposition {
 public:
  SpectralDecomposition(const VectorXd& pi, const MatrixXd& P,
                        const SpectralOptions& opts = {});
  double asvar(const VectorXd& f) const;  // f centred internally
  double max_detailed_balance_residual() const { return db_residual_; }

 private:
  VectorXd pi_, sqrt_pi_;
  VectorXd eigenvalues_;
  MatrixXd eigenvectors_;  // of the symmetrised similarity transform
  int perron_index_;
  double db_residual_;
};

}  // namespace isir
