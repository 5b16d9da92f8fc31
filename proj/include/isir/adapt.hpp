// Stochastic-approximation tuning of the proposal count: lambda = 1 + e^xi,
// projected gradient steps on the cost-weighted approximate asymptotic
// variance, plus the affine cost model fitted from pilot timings.
#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <vector>

#include "isir/kernel.hpp"

namespace isir {

template <class C>
concept CostModel = requires(const C& c, double lam) {
  { c(lam) } -> std::convertible_to<double>;
  { c.deriv(lam) } -> std::convertible_to<double>;
};

struct AffineCost {
  double a = 0.0;  // overhead
  double b = 1.0;  // per-proposal rate
  double operator()(double lam) const { return a + b * lam; }
  double deriv(double) const { return b; }
};

// Ordinary least squares on (n, seconds), rescaled so b = 1.
AffineCost fit_cost(const std::vector<std::pair<int, double>>& timings);

// (1+eps)/(1-eps) * c(lambda); eps >= 1 is a barrier.
double loss_tilde(double eps, const AffineCost& cost, double lambda);

inline constexpr double kInfiniteNMax = std::numeric_limits<double>::infinity();

// Proj{xi} = min(max(0, xi), log(n_max - 1)); upper clamp dormant when
// n_max is infinite.
inline double project(double xi, double n_max) {
  double lo = std::max(0.0, xi);
  if (n_max == kInfiniteNMax) return lo;
  return std::min(lo, std::log(n_max - 1.0));
}

struct AdaptConfig {
  double beta_exponent = 0.75;   // gamma_k = k^-beta
  double n_max = 8193.0;         // 2^13 + 1; kInfiniteNMax allowed
  double xi0 = default_xi0(8193.0);
  long n_iters = 0;
  double burn_in_fraction = 0.10;

  static double default_xi0(double n_max) {
    const double lam0 = n_max == kInfiniteNMax ? 16.0 : n_max / 2.0;
    return std::log(lam0 - 1.0);
  }
  void validate() const;
};

// One adaptation update: fractional step at lambda = 1 + e^xi, then the
// projected gradient move with gamma_k = k^-beta.
template <LogModel M, CostModel C>
std::tuple<typename M::State, double, StepRecord> adapt_step(
    const M& model, const typename M::State& x_prev, double xi_prev,
    const C& cost, long k, const AdaptConfig& cfg, const StreamFactory& rng,
    int workers = 1) {
  const double lambda = 1.0 + std::exp(xi_prev);
  auto [x_new, rec] = isir_step_fractional(model, x_prev, lambda, rng,
                                           static_cast<std::uint64_t>(k),
                                           workers);
  const double gamma = std::pow(static_cast<double>(k), -cfg.beta_exponent);
  const double grad = cost.deriv(lambda) * (1.0 - rec.eps_hat * rec.eps_hat) +
                      2.0 * cost(lambda) * rec.deps_hat;
  const double xi_new = project(xi_prev - gamma * grad, cfg.n_max);
  return {std::move(x_new), xi_new, rec};
}

template <LogModel M>
struct AdaptiveRun {
  std::vector<StepRecord> records;
  std::vector<double> lambda_trace;
  std::vector<std::vector<double>> f_values;
  typename M::State final_state;
  double final_lambda = 0.0;
};

template <LogModel M, CostModel C>
AdaptiveRun<M> run_adaptive(const M& model, const C& cost,
                            const AdaptConfig& cfg, std::uint64_t seed,
                            const std::vector<TestFunction<M>>& fns = {},
                            int workers = 1) {
  cfg.validate();
  StreamFactory rng(seed);
  typename M::State x = draw_initial_state(model, rng);
  double xi = project(cfg.xi0, cfg.n_max);
  AdaptiveRun<M> out;
  out.records.reserve(cfg.n_iters);
  out.lambda_trace.reserve(cfg.n_iters);
  out.f_values.resize(fns.size());
  for (long k = 1; k <= cfg.n_iters; ++k) {
    auto [x_new, xi_new, rec] =
        adapt_step(model, x, xi, cost, k, cfg, rng, workers);
    x = std::move(x_new);
    xi = xi_new;
    out.records.push_back(rec);
    out.lambda_trace.push_back(1.0 + std::exp(xi));
    for (std::size_t j = 0; j < fns.size(); ++j)
      out.f_values[j].push_back(fns[j](x));
  }
  out.final_state = std::move(x);
  out.final_lambda = 1.0 + std::exp(xi);
  return out;
}

}  // namespace isir
