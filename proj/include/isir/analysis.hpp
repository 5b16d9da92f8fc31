// Grid analysis: per-lambda curves, the approximation quality table, the
// minimiser/suboptimality report and the bound checks behind it.
#pragma once

#include <string>
#include <vector>

#include "isir/discrete.hpp"
#include "isir/spectral.hpp"

namespace isir {

struct TestFunctionSet {
  std::vector<std::string> names;
  MatrixXd raw;           // n x nf
  MatrixXd standardised;  // n x nf, pi-mean 0, pi-variance 1
  double level_upper;     // M
  double level_lower;     // m
};

// identity, inverse weight, clipped identity, superlevel and sublevel
// indicators of w; thresholds default to (w_hat, min w).
TestFunctionSet default_test_functions(const DiscreteModel& m);

VectorXd standardise(const VectorXd& pi, const VectorXd& f);

struct AnalysisTable {
  LambdaGrid grid;
  std::vector<double> lambda;
  VectorXd eps, eps_s, eps_prime, psi, G, H;
  MatrixXd V;  // L x nf, standardised test functions
  std::vector<std::string> fn_names;
  double w_hat = 0.0;
  double weight_mean = 0.0;  // C = sum_i w_i pi_i
  std::string source;
};

AnalysisTable build_analysis_table(const DiscreteModel& m,
                                   const IntegerCurves& curves,
                                   const TestFunctionSet& fns,
                                   const LambdaGrid& grid, int workers = 1);

struct MinimiserEntry {
  double lam_f = 0.0;
  double so_g = 0.0;
  double so_h = 0.0;
};

struct MinimiserRow {
  double a = 0.0;
  double lam_G = 0.0;
  double lam_H = 0.0;
  std::vector<MinimiserEntry> per_fn;
};

// Loss is c(lambda) x curve with c(lambda) = a + lambda; grid argmin with
// ties broken toward smaller lambda. SO = true loss at the approximate
// minimiser over the true minimum loss.
std::vector<MinimiserRow> minimiser_table(const AnalysisTable& table,
                                          const std::vector<double>& a_values);

// Every bound and shape property the theory promises, checked on the table;
// returns human-readable violation lines (empty on success).
std::vector<std::string> bound_violation_log(const AnalysisTable& table,
                                             const DiscreteModel& m,
                                             const IntegerCurves& curves);

void write_analysis_csv(const AnalysisTable& table, const std::string& path);
void write_minimiser_csv(const std::vector<MinimiserRow>& rows,
                         const std::vector<std::string>& fn_names,
                         const std::string& path);

}  // namespace isir
