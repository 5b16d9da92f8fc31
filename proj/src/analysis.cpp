#include "isir/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace isir {

VectorXd standardise(const VectorXd& pi, const VectorXd& f) {
  const double mu = pi.dot(f);
  const VectorXd centred = f.array() - mu;
  const double var = pi.dot(centred.cwiseProduct(centred));
  if (!(var > 0)) throw std::invalid_argument("standardise: constant function");
  return centred / std::sqrt(var);
}

TestFunctionSet default_test_functions(const DiscreteModel& m) {
  const int n = m.n();
  TestFunctionSet out;
  out.level_upper = m.level_upper.value_or(m.w_hat);
  out.level_lower = m.level_lower.value_or(m.weights.minCoeff());
  out.names = {"f", "g", "h", "k", "l"};
  out.raw.resize(n, 5);
  VectorXd in_upper(n), in_lower(n);
  for (int i = 0; i < n; ++i) {
    in_upper[i] = m.weights[i] >= out.level_upper ? 1.0 : 0.0;
    in_lower[i] = m.weights[i] <= out.level_lower ? 1.0 : 0.0;
  }
  double clip = 0.0, mass = 0.0;
  for (int i = 0; i < n; ++i)
    if (in_upper[i] == 0.0) {
      clip += m.states[i] * m.pi[i];
      mass += m.pi[i];
    }
  if (mass <= 0)
    throw std::invalid_argument("test functions: superlevel set covers Sp");
  clip /= mass;
  for (int i = 0; i < n; ++i) {
    out.raw(i, 0) = m.states[i];
    out.raw(i, 1) = 1.0 / m.weights[i];
    out.raw(i, 2) = in_upper[i] > 0.5 ? clip : m.states[i];
    out.raw(i, 3) = in_upper[i];
    out.raw(i, 4) = in_lower[i];
  }
  out.standardised.resize(n, 5);
  for (int j = 0; j < 5; ++j)
    out.standardised.col(j) = standardise(m.pi, out.raw.col(j));
  return out;
}

AnalysisTable build_analysis_table(const DiscreteModel& m,
                                   const IntegerCurves& curves,
                                   const TestFunctionSet& fns,
                                   const LambdaGrid& grid, int workers) {
  if (grid.max_integer_n() > curves.n_hi)
    throw std::invalid_argument(
        "build_analysis_table: curves do not cover the grid");
  const int L = grid.size();
  const int nf = static_cast<int>(fns.standardised.cols());
  AnalysisTable t;
  t.grid = grid;
  t.source = curves.source;
  t.w_hat = m.w_hat;
  t.weight_mean = m.pi.dot(m.weights);
  t.fn_names = fns.names;
  t.lambda.resize(L);
  t.eps.resize(L);
  t.eps_s.resize(L);
  t.eps_prime.resize(L);
  t.psi.resize(L);
  t.G.resize(L);
  t.H.resize(L);
  t.V.resize(L, nf);
  const bool mc = curves.source == "mc";
  SpectralOptions opts;
  if (mc) {
    opts.db_tol = 1.0;        // estimates are reversibilized first
    opts.perron_tol = 0.05;
    opts.cross_check = false;  // routes agree only up to MC noise
  }
  auto work = [&](int lo, int hi) {
    for (int li = lo; li < hi; ++li) {
      const double lam = grid[li];
      t.lambda[li] = lam;
      t.eps[li] = curves.eps_lambda(lam);
      t.eps_s[li] = curves.eps_s(lam);
      t.eps_prime[li] = curves.eps_prime(lam);
      t.psi[li] = m.n() > 1 ? curves.psi(lam, m) : 1.0;
      t.G[li] = (1.0 + t.eps[li]) / (1.0 - t.eps[li]);
      t.H[li] = (1.0 + t.psi[li]) / (1.0 - t.psi[li]);
      MatrixXd P = curves.transition(lam);
      if (mc) P = reversibilize(m.pi, P);
      SpectralDecomposition dec(m.pi, P, opts);
      for (int j = 0; j < nf; ++j) {
        const double v = dec.asvar(fns.standardised.col(j));
        if (!mc) {
          const double v2 =
              fundamental_asvar(m.pi, P, fns.standardised.col(j));
          if (std::abs(v - v2) > opts.route_tol * std::max(1.0, std::abs(v)))
            throw std::runtime_error("analysis: asvar route disagreement");
        }
        t.V(li, j) = v;
      }
    }
  };
  const int nw = std::max(1, std::min(workers, L));
  if (nw == 1) {
    work(0, L);
  } else {
    std::vector<std::thread> threads;
    const int per = (L + nw - 1) / nw;
    for (int k = 0; k < nw; ++k) {
      const int lo = k * per, hi = std::min(L, (k + 1) * per);
      if (lo >= hi) break;
      threads.emplace_back(work, lo, hi);
    }
    for (auto& th : threads) th.join();
  }
  return t;
}

namespace {
int grid_argmin(const std::vector<double>& lambda, const VectorXd& curve,
                double a) {
  int best = 0;
  double best_loss = (a + lambda[0]) * curve[0];
  for (int i = 1; i < static_cast<int>(lambda.size()); ++i) {
    const double loss = (a + lambda[i]) * curve[i];
    if (loss < best_loss) {
      best_loss = loss;
      best = i;
    }
  }
  return best;
}
}  // namespace

std::vector<MinimiserRow> minimiser_table(const AnalysisTable& t,
                                          const std::vector<double>& a_values) {
  std::vector<MinimiserRow> rows;
  const int nf = static_cast<int>(t.V.cols());
  for (double a : a_values) {
    MinimiserRow row;
    row.a = a;
    const int ig = grid_argmin(t.lambda, t.G, a);
    const int ih = grid_argmin(t.lambda, t.H, a);
    row.lam_G = t.lambda[ig];
    row.lam_H = t.lambda[ih];
    for (int j = 0; j < nf; ++j) {
      MinimiserEntry e;
      const VectorXd vj = t.V.col(j);
      const int jf = grid_argmin(t.lambda, vj, a);
      e.lam_f = t.lambda[jf];
      const double min_loss = (a + t.lambda[jf]) * vj[jf];
      e.so_g = (a + t.lambda[ig]) * vj[ig] / min_loss;
      e.so_h = (a + t.lambda[ih]) * vj[ih] / min_loss;
      row.per_fn.push_back(e);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::string> bound_violation_log(const AnalysisTable& t,
                                             const DiscreteModel& m,
                                             const IntegerCurves& curves) {
  std::vector<std::string> log;
  auto fail = [&log](const std::string& what, double lam, double lhs,
                     double rhs) {
    std::ostringstream os;
    os.precision(15);
    os << what << " at lambda=" << lam << ": " << lhs << " vs " << rhs;
    log.push_back(os.str());
  };
  const double wh = t.w_hat;
  const double C = t.weight_mean;
  const bool exact = t.source != "mc";
  const double slack = exact ? 1e-11 : 5e-3;
  const int L = static_cast<int>(t.lambda.size());
  for (int i = 0; i < L; ++i) {
    const double lam = t.lambda[i];
    const double fl = std::floor(lam);
    const double b_lam = 1.0 / fl - (lam - fl) / ((fl + 1.0) * fl);
    const double eps_up = 2.0 * wh / (2.0 * wh + lam - 1.0);
    const double e = t.eps[i];
    if (b_lam < 1.0 / lam - 1e-14) fail("1/lambda <= b(lambda)", lam, b_lam, 1 / lam);
    if (e < b_lam - slack) fail("b(lambda) <= eps", lam, e, b_lam);
    if (e > eps_up + slack) fail("eps <= 2w/(2w+lambda-1)", lam, e, eps_up);
    const double ratio_low =
        (fl * fl + 3 * fl - lam + 1) / (fl * fl - fl + lam - 1);
    const double ratio_up = (4 * wh + lam - 1) / (lam - 1);
    if (t.G[i] < ratio_low - slack) fail("G lower bound", lam, t.G[i], ratio_low);
    if (t.G[i] > ratio_up + slack) fail("G upper bound", lam, t.G[i], ratio_up);
    // extended derivative bounds
    const double de = std::abs(t.eps_prime[i]);
    const double de_low = C / std::pow(2 * wh + fl - 1, 2);
    const double de_up = wh / (fl * (fl + 1.0));
    if (de < de_low - slack) fail("|eps'| lower bound", lam, de, de_low);
    if (de > de_up + slack) fail("|eps'| upper bound", lam, de, de_up);
    // eps_s sandwich
    if (e * e > t.eps_s[i] + slack) fail("eps^2 <= eps_s", lam, e * e, t.eps_s[i]);
    if (exact && t.eps_s[i] > wh / fl + 1e-11)
      fail("eps_s <= w_hat/floor(lambda)", lam, t.eps_s[i], wh / fl);
    // holding parameter
    if (m.n() > 1) {
      if (t.psi[i] <= 0) fail("psi > 0", lam, t.psi[i], 0);
      if (t.psi[i] > eps_up + slack) fail("psi upper bound", lam, t.psi[i], eps_up);
      if (t.H[i] > ratio_up + slack) fail("H upper bound", lam, t.H[i], ratio_up);
    }
    // asymptotic variance sandwich (standardised: var_pi = 1)
    for (int j = 0; j < t.V.cols(); ++j) {
      if (t.V(i, j) < 1.0 - (exact ? 1e-9 : 5e-2))
        fail("V >= var_pi", lam, t.V(i, j), 1.0);
      if (t.V(i, j) > ratio_up * (1 + slack) + slack)
        fail("V <= bound*var_pi", lam, t.V(i, j), ratio_up);
    }
  }
  // V monotone decreasing and convex along the grid (exact source only;
  // MC estimates carry sampling noise)
  if (exact) {
    for (int j = 0; j < t.V.cols(); ++j) {
      for (int i = 0; i + 1 < L; ++i)
        if (t.V(i + 1, j) - t.V(i, j) > 1e-12)
          fail("V decreasing", t.lambda[i], t.V(i + 1, j), t.V(i, j));
      for (int i = 0; i + 2 < L; ++i) {
        const double d2 = t.V(i, j) - 2 * t.V(i + 1, j) + t.V(i + 2, j);
        if (d2 < -1e-9) fail("V convex", t.lambda[i], d2, 0);
      }
    }
    // minorisation of the interpolated kernel at grid endpoints and a few
    // interior lambdas
    for (double lam : {t.lambda.front(), 0.5 * (t.lambda.front() + t.lambda.back()),
                       t.lambda.back()}) {
      const MatrixXd P = curves.transition(lam);
      const double cmin = (lam - 1) / (2 * wh + lam - 1);
      for (int i = 0; i < m.n(); ++i)
        for (int j = 0; j < m.n(); ++j)
          if (P(i, j) < cmin * m.pi[j] - 1e-12)
            fail("minorisation", lam, P(i, j), cmin * m.pi[j]);
    }
    // holding-probability limit at the top of the grid
    const MatrixXd Ptop = curves.transition(t.lambda.back());
    for (int i = 0; i < m.n(); ++i) {
      const double bound =
          (1 - m.pi[i]) * 2 * wh / (2 * wh + t.lambda.back() - 1);
      if (std::abs(Ptop(i, i) - m.pi[i]) > bound + 1e-11)
        fail("holding limit", t.lambda.back(), Ptop(i, i) - m.pi[i], bound);
    }
  }
  return log;
}

void write_analysis_csv(const AnalysisTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "lambda,eps,eps_s,eps_prime,psi,G,H";
  for (const auto& n : t.fn_names) out << ",V_" << n;
  out << ",eps_lower,eps_upper,var_upper\n";
  char buf[64];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out << buf;
  };
  for (std::size_t i = 0; i < t.lambda.size(); ++i) {
    const double lam = t.lambda[i];
    const double fl = std::floor(lam);
    emit(lam);
    out << ',';
    emit(t.eps[i]);
    out << ',';
    emit(t.eps_s[i]);
    out << ',';
    emit(t.eps_prime[i]);
    out << ',';
    emit(t.psi[i]);
    out << ',';
    emit(t.G[i]);
    out << ',';
    emit(t.H[i]);
    for (int j = 0; j < t.V.cols(); ++j) {
      out << ',';
      emit(t.V(i, j));
    }
    out << ',';
    emit(1.0 / fl - (lam - fl) / ((fl + 1) * fl));
    out << ',';
    emit(2 * t.w_hat / (2 * t.w_hat + lam - 1));
    out << ',';
    emit((4 * t.w_hat + lam - 1) / (lam - 1));
    out << '\n';
  }
}

void write_minimiser_csv(const std::vector<MinimiserRow>& rows,
                         const std::vector<std::string>& fn_names,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "a,lam_G,lam_H";
  for (const auto& n : fn_names)
    out << ",lam_" << n << ",SO_G_" << n << ",SO_H_" << n;
  out << "\n";
  char buf[64];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.10g", v);
    out << buf;
  };
  for (const auto& r : rows) {
    emit(r.a);
    out << ',';
    emit(r.lam_G);
    out << ',';
    emit(r.lam_H);
    for (const auto& e : r.per_fn) {
      out << ',';
      emit(e.lam_f);
      out << ',';
      emit(std::round(e.so_g * 100.0) / 100.0);
      out << ',';
      emit(std::round(e.so_h * 100.0) / 100.0);
    }
    out << '\n';
  }
}

}  // namespace isir
