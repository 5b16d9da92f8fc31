// Target/proposal pairs. A model exposes the unnormalised log target, the
// (normalised) log proposal and proposal sampling; everything downstream
// works with log weights only.
#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "isir/rng.hpp"

namespace isir {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class M>
concept LogModel = requires(const M& m, const typename M::State& x,
                            RandomStream& rs) {
  typename M::State;
  { m.log_target_u(x) } -> std::convertible_to<double>;
  { m.log_proposal(x) } -> std::convertible_to<double>;
  { m.sample_proposal(rs) } -> std::convertible_to<typename M::State>;
};

// log w(x) = log pi_u(x) - log q(x); -inf where pi vanishes (0/0 = 0).
// A point with positive target mass but zero proposal density would break
// domination, which we refuse to ignore.
template <LogModel M>
double log_weight(const M& model, const typename M::State& x) {
  const double lp = model.log_target_u(x);
  if (lp == kNegInf) return kNegInf;
  const double lq = model.log_proposal(x);
  if (!std::isfinite(lq)) {
    throw std::runtime_error(
        "log_weight: proposal density vanishes (or is not finite) at a point "
        "with positive target mass; q does not dominate pi");
  }
  const double lw = lp - lq;
  if (std::isnan(lw)) throw std::runtime_error("log_weight: NaN log weight");
  return lw;
}

// Normalised weights from log weights via max-shift exponentiation.
// Returns the shifted (not yet normalised) weights and their sum.
inline double shifted_weights(std::span<const double> logw,
                              std::vector<double>& out) {
  double mx = kNegInf;
  for (double lw : logw) mx = std::max(mx, lw);
  out.resize(logw.size());
  double sum = 0.0;
  if (mx == kNegInf) {
    for (auto& v : out) v = 0.0;
    return 0.0;
  }
  for (std::size_t i = 0; i < logw.size(); ++i) {
    out[i] = std::exp(logw[i] - mx);
    sum += out[i];
  }
  return sum;
}

}  // namespace isir
