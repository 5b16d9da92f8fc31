#include <thread>
#include <vector>

#include "isir/discrete.hpp"

namespace isir {

namespace {

struct Accum {
  std::vector<MatrixXd> P;      // per N
  MatrixXd eps_state;           // (n_hi x n)
  VectorXd eps, a, b;

  Accum(int n_hi, int n) {
    P.assign(n_hi, MatrixXd::Zero(n, n));
    eps_state = MatrixXd::Zero(n_hi, n);
    eps = VectorXd::Zero(n_hi);
    a = VectorXd::Zero(n_hi + 1);
    b = VectorXd::Zero(n_hi);
  }

  void merge(const Accum& o) {
    for (std::size_t i = 0; i < P.size(); ++i) P[i] += o.P[i];
    eps_state += o.eps_state;
    eps += o.eps;
    a += o.a;
    b += o.b;
  }
};

}  // namespace

IntegerCurves mc_curves(const DiscreteModel& m, int n_hi, long samples,
                        std::uint64_t seed, int workers) {
  if (samples < 1) throw std::invalid_argument("mc_curves: samples >= 1");
  const int n = m.n();
  const VectorXd& w = m.weights;
  // category sampling table (states + outside)
  const int cats = n + (m.q_outside > 0 ? 1 : 0);
  std::vector<double> cumq(cats);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) cumq[i] = (acc += m.q[i]);
  if (m.q_outside > 0) cumq[cats - 1] = acc + m.q_outside;
  std::vector<double> cumpi(n);
  acc = 0.0;
  for (int i = 0; i < n; ++i) cumpi[i] = (acc += m.pi[i]);

  StreamFactory factory(seed);
  auto run_block = [&](long s_lo, long s_hi, Accum& out) {
    std::vector<double> vw(n);  // v_j * w_j counts as weights
    for (long s = s_lo; s < s_hi; ++s) {
      RandomStream rs = factory.stream(static_cast<std::uint64_t>(s), 0);
      auto draw_cat = [&](const std::vector<double>& cum) {
        const double u = rs.uniform() * cum.back();
        return static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) -
                                cum.begin());
      };
      const int y = draw_cat(cumpi);
      const double wy = w[y];
      std::fill(vw.begin(), vw.end(), 0.0);
      double t = 0.0;       // weight total of draws so far
      double prev_sy = wy;  // w(Y) + T_{N-2} for the b cross term
      // N = 1 row: identity transition, eps = 1 (set exactly at the end)
      out.eps[0] += 1.0;
      out.a[0] += 1.0;
      for (int N = 2; N <= n_hi + 1; ++N) {
        const int d = draw_cat(cumq);
        if (d < n) vw[d] += w[d];
        t += d < n ? w[d] : 0.0;
        const double sy = wy + t;  // w(Y) + T_{N-1}
        out.b[N - 2] += wy * wy / (prev_sy * sy);
        prev_sy = sy;
        const double ry = wy / sy;
        out.a[N - 1] += ry * ry;
        if (N <= n_hi) {
          out.eps[N - 1] += ry;
          MatrixXd& P = out.P[N - 1];
          for (int i = 0; i < n; ++i) {
            const double r = 1.0 / (w[i] + t);
            out.eps_state(N - 1, i) += w[i] * r;
            for (int j = 0; j < n; ++j) P(i, j) += r * vw[j];
            P(i, i) += w[i] * r;
          }
        }
      }
    }
  };

  const int nw = std::max(1, workers);
  std::vector<Accum> parts;
  parts.reserve(nw);
  for (int k = 0; k < nw; ++k) parts.emplace_back(n_hi, n);
  if (nw == 1) {
    run_block(0, samples, parts[0]);
  } else {
    std::vector<std::thread> threads;
    const long per = (samples + nw - 1) / nw;
    for (int k = 0; k < nw; ++k) {
      const long lo = k * per, hi = std::min<long>(samples, (k + 1) * per);
      if (lo >= hi) break;
      threads.emplace_back([&, lo, hi, k] { run_block(lo, hi, parts[k]); });
    }
    for (auto& th : threads) th.join();
    for (int k = 1; k < nw; ++k) parts[0].merge(parts[k]);
  }
  Accum& total = parts[0];

  IntegerCurves c;
  c.n_hi = n_hi;
  c.source = "mc";
  c.P.resize(n_hi);
  c.eps = total.eps / samples;
  c.eps[0] = 1.0;
  c.eps_state = total.eps_state / samples;
  c.eps_state.row(0).setOnes();
  c.eps_sq_a = total.a / samples;
  c.eps_sq_a[0] = 1.0;
  c.eps_sq_b = total.b / samples;
  c.P[0] = MatrixXd::Identity(n, n);
  for (int N = 2; N <= n_hi; ++N) c.P[N - 1] = total.P[N - 1] / samples;
  return c;
}

}  // namespace isir
