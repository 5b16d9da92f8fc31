#include <cmath>
#include <numbers>

#include "isir/discrete.hpp"
#include "isir/quadrature.hpp"

namespace isir {

void gauss_legendre(int degree, std::vector<double>& x, std::vector<double>& w) {
  x.resize(degree);
  w.resize(degree);
  for (int i = 0; i < (degree + 1) / 2; ++i) {
    // Newton from the Chebyshev-like initial guess
    double z = std::cos(std::numbers::pi * (i + 0.75) / (degree + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < degree; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = degree * (z * p0 - p1) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = -z;
    x[degree - 1 - i] = z;
    w[i] = w[degree - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

QuadratureRule log_panel_rule(double t_lo, double t_hi, int panels_per_decade,
                              int degree) {
  std::vector<double> gx, gw;
  gauss_legendre(degree, gx, gw);
  const double decades = std::log10(t_hi / t_lo);
  const int n_pan = std::max(4, static_cast<int>(std::ceil(decades * panels_per_decade)));
  std::vector<double> edges;
  edges.push_back(0.0);
  const double ratio = std::pow(t_hi / t_lo, 1.0 / n_pan);
  double e = t_lo;
  for (int i = 0; i <= n_pan; ++i) {
    edges.push_back(e);
    e *= ratio;
  }
  edges.back() = t_hi;
  QuadratureRule rule;
  rule.nodes.reserve(edges.size() * degree);
  rule.weights.reserve(edges.size() * degree);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (int k = 0; k < degree; ++k) {
      rule.nodes.push_back(mid + half * gx[k]);
      rule.weights.push_back(half * gw[k]);
    }
  }
  return rule;
}

namespace {

// Shared machinery: S_m is the weight sum of m iid proposal draws, and
//   h_m(x) = E[1/(x+S_m)]   = int exp(-x t) phi(t)^m dt
//   g_m(x) = E[1/(x+S_m)^2] = int t exp(-x t) phi(t)^m dt
// with phi(t) = q_outside + sum_k q_k exp(-w_k t).
struct LaplaceTables {
  std::vector<double> xs;       // sorted argument set (singles + pair sums)
  MatrixXd H;                   // (m_max+1) x |xs|
  MatrixXd Gs;                  // g_m at single weights only: (m_max+1) x n
  MatrixXd Cs;                  // cross kernel at singles: (m_max+1) x n
  std::vector<int> single_idx;  // index of w_i in xs
  Eigen::MatrixXi pair_idx;     // (n x n) of indices into xs

  static int index_of(const std::vector<double>& v, double x) {
    const auto it = std::lower_bound(v.begin(), v.end(), x);
    return static_cast<int>(it - v.begin());
  }

  LaplaceTables(const DiscreteModel& m, int m_max) {
    const int n = m.n();
    const VectorXd& w = m.weights;
    // argument set (floating addition is commutative, so exact dedup works)
    std::vector<double> raw;
    for (int i = 0; i < n; ++i) raw.push_back(w[i]);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) raw.push_back(w[i] + w[j]);
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    xs = std::move(raw);
    const double x_min = xs.front();
    const double w_min = w.minCoeff();
    const double rate = m.q_outside > 0 ? x_min : x_min + w_min;
    const double t_hi = 45.0 / rate;
    const QuadratureRule rule = log_panel_rule(t_hi * 1e-13, t_hi, 8, 16);
    const int T = static_cast<int>(rule.nodes.size());
    // phi and the cross kernel K(t) = qU t + sum_k (q_k/w_k)(1-exp(-w_k t))
    VectorXd phi(T), K(T);
    for (int t = 0; t < T; ++t) {
      double p = m.q_outside, k = m.q_outside * rule.nodes[t];
      for (int i = 0; i < n; ++i) {
        const double e = std::exp(-w[i] * rule.nodes[t]);
        p += m.q[i] * e;
        k += m.q[i] / w[i] * (-std::expm1(-w[i] * rule.nodes[t]));
      }
      phi[t] = p;
      K[t] = k;
    }
    const int X = static_cast<int>(xs.size());
    MatrixXd E(T, X), Et(T, n), Ek(T, n);
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < X; ++j) E(t, j) = std::exp(-xs[j] * rule.nodes[t]);
    single_idx.resize(n);
    for (int i = 0; i < n; ++i) single_idx[i] = index_of(xs, w[i]);
    pair_idx.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        pair_idx(i, j) = index_of(xs, w[i] + w[j]);
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < n; ++i) {
        Et(t, i) = rule.nodes[t] * E(t, single_idx[i]);
        Ek(t, i) = K[t] * E(t, single_idx[i]);
      }
    H.resize(m_max + 1, X);
    Gs.resize(m_max + 1, n);
    Cs.resize(m_max + 1, n);
    VectorXd acc(T);
    for (int t = 0; t < T; ++t) acc[t] = rule.weights[t];
    for (int mm = 0; mm <= m_max; ++mm) {
      if (mm > 0)
        for (int t = 0; t < T; ++t) acc[t] *= phi[t];
      H.row(mm) = acc.transpose() * E;
      Gs.row(mm) = acc.transpose() * Et;
      Cs.row(mm) = acc.transpose() * Ek;
    }
    // m = 0 rows are exact in closed form
    for (int j = 0; j < X; ++j) H(0, j) = 1.0 / xs[j];
    for (int i = 0; i < n; ++i) Gs(0, i) = 1.0 / (w[i] * w[i]);
  }

  double h(int mm, int xi) const { return H(mm, xi); }
};

}  // namespace

IntegerCurves exact_curves(const DiscreteModel& m, int n_hi) {
  if (n_hi < 1) throw std::invalid_argument("exact_curves: n_hi >= 1 required");
  const int n = m.n();
  const VectorXd& w = m.weights;
  LaplaceTables tab(m, n_hi);
  IntegerCurves c;
  c.n_hi = n_hi;
  c.source = "exact";
  c.P.resize(n_hi);
  c.eps.resize(n_hi);
  c.eps_state.resize(n_hi, n);
  c.eps_sq_a.resize(n_hi + 1);
  c.eps_sq_b.resize(n_hi);
  c.P[0] = MatrixXd::Identity(n, n);
  c.eps[0] = 1.0;
  c.eps_state.row(0).setOnes();
  for (int N = 2; N <= n_hi; ++N) {
    MatrixXd& P = c.P[N - 1];
    P.resize(n, n);
    for (int i = 0; i < n; ++i) {
      const double hi1 = tab.h(N - 1, tab.single_idx[i]);
      c.eps_state(N - 1, i) = w[i] * hi1;
      for (int j = 0; j < n; ++j)
        P(i, j) = (N - 1) * m.q[j] * w[j] * tab.h(N - 2, tab.pair_idx(i, j));
      P(i, i) += w[i] * hi1;
    }
    c.eps[N - 1] = m.pi.dot(c.eps_state.row(N - 1));
  }
  // eps_s components: A_N = E[(w(Y)/S_N)^2], B_N = E[w(Y)^2/(S_N S_{N+1})]
  for (int N = 1; N <= n_hi + 1; ++N) {
    double a = 0.0;
    for (int i = 0; i < n; ++i)
      a += m.pi[i] * w[i] * w[i] * tab.Gs(N - 1, i);
    c.eps_sq_a[N - 1] = a;
  }
  for (int N = 1; N <= n_hi; ++N) {
    double b = 0.0;
    for (int i = 0; i < n; ++i)
      b += m.pi[i] * w[i] * w[i] * tab.Cs(N - 1, i);
    c.eps_sq_b[N - 1] = b;
  }
  return c;
}

}  // namespace isir
