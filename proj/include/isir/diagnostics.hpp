// Output-side estimators: autocovariances, Geyer initial-sequence IACT and
// asymptotic variance, inverse relative efficiency tables.
#pragma once

#include <span>
#include <string>
#include <vector>

namespace isir {

// Biased (1/n) autocovariances at lags 0..max_lag.
std::vector<double> autocovariance(std::span<const double> series, int max_lag);

struct IactEstimate {
  double iact = 1.0;
  double asvar = 0.0;          // iact * sample variance
  int truncation_lag = 0;      // even
  long n_samples = 0;
  bool monotone = true;        // initial monotone vs plain positive sequence
};

// Initial sequence estimator: sum adjacent autocovariance pairs, truncate at
// the first non-positive pair; the monotone refinement additionally clips
// the pair sums to be non-increasing.
IactEstimate initial_sequence_iact(std::span<const double> series,
                                   bool monotone = true,
                                   int initial_window = 128);

struct IreRow {
  double lambda = 0.0;
  double n = 0.0;
  double seconds_per_iter = 0.0;
  std::vector<double> iact;
  std::vector<double> asvar;
  std::vector<double> ire;   // seconds_per_iter * asvar
  double mean_eps_hat = 0.0;
  double approx_loss = 0.0;  // (1+eps)/(1-eps) * c(lambda) overlay
};

struct RunSummary {
  double lambda;
  double seconds_per_iter;
  std::vector<std::vector<double>> traces;  // per test function, post burn-in
  double mean_eps_hat;
};

// Cost parameters (a,b) feed the approximate-loss overlay.
std::vector<IreRow> ire_table(const std::vector<RunSummary>& runs,
                              double cost_a, double cost_b);

void write_ire_csv(const std::vector<IreRow>& rows,
                   const std::vector<std::string>& fn_names,
                   const std::string& path);

}  // namespace isir
