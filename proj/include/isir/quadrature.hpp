#pragma once

#include <vector>

namespace isir {

// Composite Gauss-Legendre rule: one panel on [0, t_lo] plus log-spaced
// panels up to t_hi. Suited to integrands that are sums of decaying
// exponentials spanning many scales.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule log_panel_rule(double t_lo, double t_hi,
                              int panels_per_decade = 8, int degree = 16);

// Nodes/weights of the Gauss-Legendre rule on [-1,1].
void gauss_legendre(int degree, std::vector<double>& x, std::vector<double>& w);

}  // namespace isir
