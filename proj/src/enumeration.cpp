#include <cmath>
#include <functional>
#include <limits>

#include "isir/discrete.hpp"

namespace isir {

namespace {

std::uint64_t compositions(int cats, int draws) {
  // C(draws + cats - 1, cats - 1) with saturation
  long double acc = 1.0L;
  for (int i = 1; i <= cats - 1; ++i)
    acc = acc * (draws + i) / i;
  if (acc > 1e18L) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(acc + 0.5L);
}

// Depth-first walk over count vectors v of `draws` across the categories,
// carrying the multinomial pmf incrementally.
struct CompositionWalker {
  const std::vector<double>& probs;
  std::vector<int> v;
  std::function<void(const std::vector<int>&, double)> visit;

  void run(int draws) {
    v.assign(probs.size(), 0);
    descend(0, draws, 1.0);
  }

  void descend(std::size_t cat, int rem, double pmf) {
    if (cat + 1 == probs.size()) {
      v[cat] = rem;
      visit(v, pmf * std::pow(probs[cat], rem));
      v[cat] = 0;
      return;
    }
    // factor for v[cat] = k: C(rem, k) p^k, updated multiplicatively
    double f = 1.0;
    for (int k = 0; k <= rem; ++k) {
      v[cat] = k;
      descend(cat + 1, rem - k, pmf * f);
      f *= probs[cat] * (rem - k) / (k + 1.0);
    }
    v[cat] = 0;
  }
};

std::vector<double> category_probs(const DiscreteModel& m) {
  std::vector<double> probs(m.q.data(), m.q.data() + m.q.size());
  if (m.q_outside > 0) probs.push_back(m.q_outside);
  return probs;
}

}  // namespace

std::uint64_t enumeration_term_count(const DiscreteModel& m, int n) {
  const int cats = m.n() + (m.q_outside > 0 ? 1 : 0);
  return compositions(cats, n - 1);
}

MatrixXd exact_transition_matrix(const DiscreteModel& m, int n,
                                 std::uint64_t budget) {
  if (n < 1) throw std::invalid_argument("exact_transition_matrix: n >= 1");
  const int ns = m.n();
  if (n == 1) return MatrixXd::Identity(ns, ns);
  if (enumeration_term_count(m, n) > budget)
    throw EnumerationBudgetError(
        "exact_transition_matrix: enumeration budget exceeded; use "
        "mc_transition_and_rejection");
  const VectorXd& w = m.weights;
  const std::vector<double> probs = category_probs(m);
  MatrixXd P = MatrixXd::Zero(ns, ns);
  CompositionWalker walker{probs, {}, {}};
  walker.visit = [&](const std::vector<int>& v, double pmf) {
    double s = 0.0;
    for (int k = 0; k < ns; ++k) s += v[k] * w[k];
    for (int i = 0; i < ns; ++i) {
      const double denom = w[i] + s;
      P(i, i) += pmf * w[i] / denom;
      for (int j = 0; j < ns; ++j)
        if (v[j] > 0) P(i, j) += pmf * v[j] * w[j] / denom;
    }
  };
  walker.run(n - 1);
  return P;
}

IntegerCurves enumerated_curves(const DiscreteModel& m, int n_hi,
                                std::uint64_t budget) {
  const int ns = m.n();
  const VectorXd& w = m.weights;
  const std::vector<double> probs = category_probs(m);
  // eps_sq_a at n_hi+1 needs compositions of n_hi draws
  if (compositions(static_cast<int>(probs.size()), n_hi) > budget)
    throw EnumerationBudgetError(
        "enumerated_curves: enumeration budget exceeded; use exact_curves "
        "or mc_transition_and_rejection");
  IntegerCurves c;
  c.n_hi = n_hi;
  c.source = "enumeration";
  c.P.resize(n_hi);
  c.eps.resize(n_hi);
  c.eps_state.resize(n_hi, ns);
  c.eps_sq_a.resize(n_hi + 1);
  c.eps_sq_b.resize(n_hi);
  c.P[0] = MatrixXd::Identity(ns, ns);
  c.eps[0] = 1.0;
  c.eps_state.row(0).setOnes();
  c.eps_sq_a[0] = 1.0;
  const int n_extra = static_cast<int>(probs.size());
  for (int N = 1; N <= n_hi + 1; ++N) {
    MatrixXd P = MatrixXd::Zero(ns, ns);
    VectorXd eps_state = VectorXd::Zero(ns);
    double a = 0.0, b = 0.0;
    CompositionWalker walker{probs, {}, {}};
    walker.visit = [&](const std::vector<int>& v, double pmf) {
      double s = 0.0;
      for (int k = 0; k < ns; ++k) s += v[k] * w[k];
      for (int i = 0; i < ns; ++i) {
        const double denom = w[i] + s;
        const double r = w[i] / denom;
        eps_state[i] += pmf * r;
        a += m.pi[i] * pmf * r * r;
        if (N <= n_hi) {
          P(i, i) += pmf * r;
          for (int j = 0; j < ns; ++j)
            if (v[j] > 0) P(i, j) += pmf * v[j] * w[j] / denom;
          // extra independent draw for the cross term of eps_s
          double cross = 0.0;
          for (int k = 0; k < n_extra; ++k) {
            const double wk = k < ns ? w[k] : 0.0;
            cross += probs[k] / (denom * (denom + wk));
          }
          b += m.pi[i] * pmf * w[i] * w[i] * cross;
        }
      }
    };
    walker.run(N - 1);
    if (N <= n_hi) {
      if (N >= 2) {
        c.P[N - 1] = P;
        c.eps_state.row(N - 1) = eps_state.transpose();
        c.eps[N - 1] = m.pi.dot(eps_state);
      }
      c.eps_sq_b[N - 1] = b;
    }
    c.eps_sq_a[N - 1] = N == 1 ? 1.0 : a;
  }
  return c;
}

}  // namespace isir
