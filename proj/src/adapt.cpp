#include "isir/adapt.hpp"

#include <set>
#include <stdexcept>

namespace isir {

void AdaptConfig::validate() const {
  if (!(beta_exponent > 0))
    throw std::invalid_argument("adapt: beta exponent must be > 0");
  if (n_max != kInfiniteNMax && !(n_max >= 2))
    throw std::invalid_argument("adapt: finite n_max must be >= 2");
  if (n_iters < 0) throw std::invalid_argument("adapt: n_iters >= 0");
  if (!(burn_in_fraction >= 0 && burn_in_fraction < 1))
    throw std::invalid_argument("adapt: burn-in fraction in [0,1)");
}

AffineCost fit_cost(const std::vector<std::pair<int, double>>& timings) {
  std::set<int> distinct;
  for (const auto& [n, s] : timings) {
    if (s <= 0) throw std::invalid_argument("fit_cost: times must be positive");
    distinct.insert(n);
  }
  if (distinct.size() < 2)
    throw std::invalid_argument("fit_cost: >=2 distinct N required");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(timings.size());
  for (const auto& [n, s] : timings) {
    sx += n;
    sy += s;
    sxx += static_cast<double>(n) * n;
    sxy += n * s;
  }
  const double b = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double a = (sy - b * sx) / m;
  if (!(b > 0))
    throw std::runtime_error(
        "fit_cost: cost not increasing in N; use a wider pilot range");
  return AffineCost{a / b, 1.0};
}

double loss_tilde(double eps, const AffineCost& cost, double lambda) {
  if (!(eps >= 0 && eps < 1))
    throw std::invalid_argument("loss_tilde: eps must lie in [0,1)");
  return (1.0 + eps) / (1.0 - eps) * cost(lambda);
}

}  // namespace isir
