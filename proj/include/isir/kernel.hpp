// The i-SIR Markov transition for integer and fractional proposal counts.
// One iteration draws its randomness from substreams keyed by (iteration,
// slot): slot 0 carries the coin and selection uniforms, slot j >= 2 the
// sampling of proposal j. Worker count therefore never changes a trace.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "isir/model.hpp"
#include "isir/rng.hpp"

namespace isir {

struct StepRecord {
  double lambda_used = 0.0;
  int nbar = 0;            // floor(lambda) + 1 proposals held (incl. current)
  int n_used = 0;          // N_k selected by the beta coin
  int accepted_index = 0;  // 1-based; 1 means rejection
  double eps_hat = 0.0;
  double deps_hat = 0.0;
};

namespace detail {

template <LogModel M>
void fill_batch(const M& model, const typename M::State& current,
                std::uint64_t iteration, int nbar, const StreamFactory& rng,
                std::vector<typename M::State>& states,
                std::vector<double>& logw, int workers) {
  states.resize(nbar);
  logw.resize(nbar);
  states[0] = current;
  logw[0] = log_weight(model, current);
  auto fill = [&](int lo, int hi) {
    for (int j = lo; j < hi; ++j) {
      RandomStream rs = rng.stream(iteration, static_cast<std::uint64_t>(j + 1));
      states[j] = model.sample_proposal(rs);
      logw[j] = log_weight(model, states[j]);
    }
  };
  if (workers <= 1 || nbar < 256) {
    fill(1, nbar);
    return;
  }
  std::vector<std::thread> pool;
  const int span = nbar - 1;
  const int per = (span + workers - 1) / workers;
  for (int k = 0; k < workers; ++k) {
    const int lo = 1 + k * per;
    const int hi = std::min(nbar, lo + per);
    if (lo >= hi) break;
    pool.emplace_back(fill, lo, hi);
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Integer-N i-SIR step. Returns the new state and the 1-based accepted index.
template <LogModel M>
std::pair<typename M::State, int> isir_step(const M& model,
                                            const typename M::State& current,
                                            int n, const StreamFactory& rng,
                                            std::uint64_t iteration,
                                            int workers = 1) {
  if (n < 1) throw std::invalid_argument("isir_step: n >= 1 required");
  if (n == 1) return {current, 1};
  std::vector<typename M::State> states;
  std::vector<double> logw;
  detail::fill_batch(model, current, iteration, n, rng, states, logw, workers);
  std::vector<double> shifted;
  const double total = shifted_weights(logw, shifted);
  if (!(total > 0.0))
    throw std::runtime_error("isir_step: all proposal weights vanish");
  RandomStream decision = rng.stream(iteration, 0);
  decision.uniform();  // slot kept for the beta coin of the fractional kernel
  const int idx = decision.categorical(shifted);
  return {states[idx], idx + 1};
}

// Fractional-lambda step. Draws floor(lambda) fresh proposals, flips the
// beta coin for N_k, selects among the first N_k, and computes the
// rejection-rate estimators from the full batch.
template <LogModel M>
std::pair<typename M::State, StepRecord> isir_step_fractional(
    const M& model, const typename M::State& current, double lambda,
    const StreamFactory& rng, std::uint64_t iteration, int workers = 1) {
  if (!(lambda >= 1.0))
    throw std::invalid_argument("isir_step_fractional: lambda >= 1 required");
  const int nbar = static_cast<int>(std::floor(lambda)) + 1;
  const double beta = nbar - lambda;  // in (0,1]
  std::vector<typename M::State> states;
  std::vector<double> logw;
  detail::fill_batch(model, current, iteration, nbar, rng, states, logw,
                     workers);
  std::vector<double> shifted;
  shifted_weights(logw, shifted);
  double sum_full = 0.0;
  for (double v : shifted) sum_full += v;
  const double sum_head = sum_full - shifted[nbar - 1];
  if (!(sum_head > 0.0) || !(shifted[0] > 0.0))
    throw std::runtime_error(
        "isir_step_fractional: zero weight batch (initialise from supp pi)");

  StepRecord rec;
  rec.lambda_used = lambda;
  rec.nbar = nbar;
  rec.eps_hat = shifted[0] * (beta / sum_head + (1.0 - beta) / sum_full);
  rec.deps_hat = shifted[0] * (1.0 / sum_full - 1.0 / sum_head);

  RandomStream decision = rng.stream(iteration, 0);
  const double coin = decision.uniform();
  rec.n_used = coin < beta ? nbar - 1 : nbar;
  const int idx = decision.categorical(
      std::span<const double>(shifted.data(), static_cast<std::size_t>(rec.n_used)));
  rec.accepted_index = idx + 1;
  return {states[idx], rec};
}

// Draw the initial state from the proposal until it lands in supp(pi).
template <LogModel M>
typename M::State draw_initial_state(const M& model, const StreamFactory& rng,
                                     int max_attempts = 1000) {
  for (int a = 0; a < max_attempts; ++a) {
    RandomStream rs = rng.stream(~static_cast<std::uint64_t>(a), 1);
    typename M::State x = model.sample_proposal(rs);
    if (log_weight(model, x) > kNegInf) return x;
  }
  throw std::runtime_error(
      "draw_initial_state: no proposal draw hit supp(pi) within the attempt cap");
}

template <class M>
using TestFunction = std::function<double(const typename M::State&)>;

template <LogModel M>
struct ChainTrace {
  std::vector<StepRecord> records;
  std::vector<std::vector<double>> f_values;  // per test function
  std::vector<typename M::State> states;      // kept only when requested
  typename M::State final_state;
};

template <LogModel M>
ChainTrace<M> run_chain(const M& model, typename M::State x0, double lambda,
                        long n_iters, std::uint64_t seed,
                        const std::vector<TestFunction<M>>& fns = {},
                        int workers = 1, bool keep_states = false) {
  if (n_iters < 0) throw std::invalid_argument("run_chain: n_iters >= 0");
  StreamFactory rng(seed);
  ChainTrace<M> out;
  out.records.reserve(n_iters);
  out.f_values.resize(fns.size());
  for (auto& v : out.f_values) v.reserve(n_iters);
  typename M::State x = std::move(x0);
  for (long k = 0; k < n_iters; ++k) {
    auto [next, rec] = isir_step_fractional(model, x, lambda, rng,
                                            static_cast<std::uint64_t>(k + 1),
                                            workers);
    x = std::move(next);
    out.records.push_back(rec);
    for (std::size_t j = 0; j < fns.size(); ++j)
      out.f_values[j].push_back(fns[j](x));
    if (keep_states) out.states.push_back(x);
  }
  out.final_state = std::move(x);
  return out;
}

}  // namespace isir
