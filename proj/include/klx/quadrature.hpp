#pragma once

#include <vector>

#include "klx/types.hpp"

namespace klx {

// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int m, Vector& nodes, Vector& weights);

// Composite Gauss-Legendre rule on [a,b]. The requested node count is
// rounded up to a multiple of the panel order (8 for n > 32).
Grid composite_gauss_legendre(int n, double a = 0.0, double b = 1.0);

// Composite rule whose panel edges include every breakpoint, so integrands
// that are smooth between breakpoints are integrated at full Gauss order.
// `min_panels` panels are distributed over the sub-intervals by length.
Grid split_rule(double a, double b, std::vector<double> breakpoints,
                int min_panels = 32, int order = 8);

// Grid for integrals over (0,1) with the substitution t = Phi(x): nodes
// t_i = Phi(x_i) and weights w_i * phi(x_i) for x on [-8,8]. Integrating a
// bounded f against it evaluates int_0^1 f(t) dt without touching the
// endpoint singularities of Phi^{-1}.
Grid normal_substitution_rule(int n = 512, double x_max = 8.0);

}  // namespace klx
