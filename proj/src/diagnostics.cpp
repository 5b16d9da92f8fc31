#include "isir/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace isir {

std::vector<double> autocovariance(std::span<const double> series, int max_lag) {
  const long n = static_cast<long>(series.size());
  if (max_lag < 0) throw std::invalid_argument("autocovariance: max_lag >= 0");
  if (n <= max_lag)
    throw std::invalid_argument("autocovariance: series length must exceed max_lag");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= n;
  // FFT-based: pad to a power of two >= 2n
  std::size_t m = 1;
  while (m < static_cast<std::size_t>(2 * n)) m <<= 1;
  std::vector<double> padded(m, 0.0);
  for (long i = 0; i < n; ++i) padded[i] = series[i] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, padded);
  for (auto& c : freq) c = std::complex<double>(std::norm(c), 0.0);
  std::vector<double> corr;
  fft.inv(corr, freq);
  std::vector<double> out(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) out[k] = corr[k] / n;
  return out;
}

IactEstimate initial_sequence_iact(std::span<const double> series,
                                   bool monotone, int initial_window) {
  const long n = static_cast<long>(series.size());
  if (n < 10)
    throw std::invalid_argument("initial_sequence_iact: need at least 10 samples");
  IactEstimate est;
  est.n_samples = n;
  est.monotone = monotone;
  // grow the lag window until the truncation point is inside it
  int max_lag = std::max(8, initial_window);
  for (;;) {
    max_lag = std::min<long>(max_lag, n - 1);
    const std::vector<double> gamma = autocovariance(series, max_lag);
    const double g0 = gamma[0];
    if (!(g0 > 0)) {  // constant series
      est.iact = 1.0;
      est.asvar = 0.0;
      est.truncation_lag = 0;
      return est;
    }
    double sum = 0.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    int lag = 0;
    bool truncated = false;
    for (int mpair = 0; 2 * mpair + 1 <= max_lag; ++mpair) {
      double pair = gamma[2 * mpair] + gamma[2 * mpair + 1];
      if (pair <= 0.0) {
        truncated = true;
        lag = 2 * mpair;
        break;
      }
      if (monotone) pair = std::min(pair, prev_pair);
      prev_pair = pair;
      sum += pair;
      lag = 2 * mpair + 2;
    }
    if (truncated || max_lag >= n - 1) {
      const double asvar = std::max(2.0 * sum - g0, 0.0);
      est.asvar = asvar;
      est.iact = asvar / g0;
      est.truncation_lag = lag;
      return est;
    }
    max_lag *= 4;
  }
}

std::vector<IreRow> ire_table(const std::vector<RunSummary>& runs,
                              double cost_a, double cost_b) {
  std::vector<IreRow> rows;
  for (const auto& run : runs) {
    IreRow row;
    row.lambda = run.lambda;
    row.n = run.lambda;
    row.seconds_per_iter = run.seconds_per_iter;
    row.mean_eps_hat = run.mean_eps_hat;
    for (const auto& trace : run.traces) {
      const IactEstimate e = initial_sequence_iact(trace);
      row.iact.push_back(e.iact);
      row.asvar.push_back(e.asvar);
      row.ire.push_back(run.seconds_per_iter * e.asvar);
    }
    const double eps = std::min(run.mean_eps_hat, 1.0 - 1e-12);
    row.approx_loss =
        (1.0 + eps) / (1.0 - eps) * (cost_a + cost_b * run.lambda);
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(),
            [](const IreRow& x, const IreRow& y) { return x.lambda < y.lambda; });
  return rows;
}

void write_ire_csv(const std::vector<IreRow>& rows,
                   const std::vector<std::string>& fn_names,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "lambda,N,sec_per_iter";
  for (const auto& f : fn_names) out << ",iact_" << f << ",asvar_" << f << ",ire_" << f;
  out << ",mean_eps_hat,approx_loss\n";
  char buf[64];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.10g", v);
    out << buf;
  };
  for (const auto& r : rows) {
    emit(r.lambda);
    out << ',';
    emit(std::round(r.lambda));
    out << ',';
    emit(r.seconds_per_iter);
    for (std::size_t j = 0; j < r.iact.size(); ++j) {
      out << ',';
      emit(r.iact[j]);
      out << ',';
      emit(r.asvar[j]);
      out << ',';
      emit(r.ire[j]);
    }
    out << ',';
    emit(r.mean_eps_hat);
    out << ',';
    emit(r.approx_loss);
    out << '\n';
  }
}

}  // namespace isir
