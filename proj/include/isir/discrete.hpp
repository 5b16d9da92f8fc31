// Finite-state analysis: exact transition matrices, rejection/holding
// probabilities, and everything the grid reports are built from.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isir/model.hpp"
#include "isir/rng.hpp"

namespace isir {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct DiscreteModel {
  VectorXd states;   // real labels s_1..s_n
  VectorXd pi;       // target masses, sum 1
  VectorXd q;        // proposal masses on the states
  double q_outside;  // proposal mass outside supp(pi)
  VectorXd weights;  // pi_i / q_i
  double w_hat;
  std::optional<double> level_upper;  // M threshold for superlevel set
  std::optional<double> level_lower;  // m threshold for sublevel set

  DiscreteModel(VectorXd states_, VectorXd pi_, VectorXd q_,
                double q_outside_ = 0.0);
  int n() const { return static_cast<int>(pi.size()); }
};

DiscreteModel discrete_model_from_json(const std::string& path);
void discrete_model_to_json(const DiscreteModel& m, const std::string& path,
                            const std::string& note);

// LogModel adapter so the sampler can run on finite models. States are
// indices into the state list; q_outside is materialised as one extra
// zero-weight pseudo-state (index n).
struct DiscreteLogModel {
  using State = int;
  const DiscreteModel* model;
  std::vector<double> cumq;  // cumulative proposal masses incl. outside

  explicit DiscreteLogModel(const DiscreteModel& m);
  double log_target_u(const State& i) const {
    return i < model->n() && model->pi[i] > 0 ? std::log(model->pi[i])
                                              : kNegInf;
  }
  double log_proposal(const State& i) const;
  State sample_proposal(RandomStream& rs) const;
};

struct LambdaGrid {
  double lo = 2.0;
  double hi = 150.0;
  double step = 0.01;

  LambdaGrid() = default;
  LambdaGrid(double lo_, double hi_, double step_);
  int size() const { return static_cast<int>(std::lround((hi - lo) / step)) + 1; }
  double operator[](int i) const { return std::round((lo + i * step) * 100.0) / 100.0; }
  int max_integer_n() const { return static_cast<int>(std::floor(hi)) + 1; }
};

// Everything downstream needs at integer N, however obtained (exact
// quadrature, exact enumeration, or Monte Carlo).
struct IntegerCurves {
  int n_hi = 0;                  // curves cover N = 1..n_hi
  std::vector<MatrixXd> P;       // P_N, index N-1
  VectorXd eps;                  // average rejection eps(N), index N-1
  MatrixXd eps_state;            // eps(N, s_i), (n_hi x n)
  VectorXd eps_sq_a;             // E[(w(Y)/S_N)^2], index N-1, length n_hi+1
  VectorXd eps_sq_b;             // E[w(Y)^2/(S_N S_{N+1})], index N-1
  std::string source;            // "exact", "enumeration", or "mc"

  double eps_lambda(double lambda) const;
  double eps_prime(double lambda) const;       // cadlag step derivative
  double eps_s(double lambda) const;           // beta-weighted Jensen bound
  MatrixXd transition(double lambda) const;    // interpolated matrix
  double psi(double lambda, const DiscreteModel& m) const;
};

// Exact curves via semi-analytic integration (Gauss-Legendre panels on the
// Laplace representation of E[1/(x+S_m)]). Cross-check against the
// enumeration oracle below; they agree to ~1e-12.
IntegerCurves exact_curves(const DiscreteModel& m, int n_hi);

// Enumeration over the multinomial support; the budget is the number of
// compositions visited.
struct EnumerationBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
std::uint64_t enumeration_term_count(const DiscreteModel& m, int n);
MatrixXd exact_transition_matrix(const DiscreteModel& m, int n,
                                 std::uint64_t budget = 100000000ULL);
IntegerCurves enumerated_curves(const DiscreteModel& m, int n_hi,
                                std::uint64_t budget = 100000000ULL);

// Coupled Monte-Carlo estimates: one multinomial stream per sample, extended
// one categorical draw at a time so P_N and P_{N+1} share samples.
IntegerCurves mc_curves(const DiscreteModel& m, int n_hi, long samples,
                        std::uint64_t seed, int workers = 1);

// Project an estimated matrix onto the pi-reversible cone (symmetrise the
// similarity transform). Exact matrices are unchanged up to rounding.
MatrixXd reversibilize(const VectorXd& pi, const MatrixXd& P);

}  // namespace isir
