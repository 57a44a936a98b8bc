#pragma once

#include <memory>
#include <vector>

#include "klx/types.hpp"

namespace klx {

// Catalog of transforms with analytic eigenvalue equations:
//   WienerOne       Wiener, phi = 1        (variable omega, mu = omega^2)
//   BridgeOne       bridge, phi = 1        (variable tau = omega/2, mu = (2 tau)^2)
//   BridgeParabola  bridge, phi = t(1-t)   (variable tau)
//   IcwienerOne     integrated centered Wiener, phi = 1 (tau, mu = (2 tau)^4)
//   BridgeQuantile  bridge, normal-quantile weight (omega, determinant equation)
enum class EquationId { WienerOne, BridgeOne, BridgeParabola, IcwienerOne, BridgeQuantile };

enum class EqBranch { First, Second };

double equation_q(EquationId ex);

struct QuantileContext;

struct EigenEquationSpec {
    EquationId example;
    double Q;
    // (1 - q alpha)^2; algebraically 1 + Q q. Kept separately so that critical
    // alphas annihilate the leading polynomial coefficient exactly.
    double qalpha_factor;
    std::shared_ptr<const QuantileContext> quantile;
};

// Build from Q alone (factor = 1 + Q q_ex) or from (q, alpha).
EigenEquationSpec make_eigen_spec(EquationId ex, double Q);
EigenEquationSpec make_eigen_spec(EquationId ex, double q, double alpha);

// LHS - RHS of the selected equation at x; the quantile equation's second
// branch returns the 3x3 determinant (or sin(omega) in the Q -> 0 limit).
double eigen_equation_residual(const EigenEquationSpec& spec, EqBranch branch, double x);

// Residual divided by the sum of term magnitudes.
double scaled_residual(const EigenEquationSpec& spec, EqBranch branch, double x);

struct Root {
    double x;
    int branch;        // 0 = first, 1 = second
    int multiplicity;  // 2 when roots of both branches coincide
    double residual;   // scaled
};

struct RootSequence {
    std::vector<Root> merged;          // increasing x, cross-branch doubles merged
    std::vector<double> first_branch;  // increasing, unmerged
    std::vector<double> second_branch;
};

// First `count` positive roots per branch. Scanning walks pi-wide windows
// with sign-change bisection and checks the lattice points themselves, where
// the double roots sit.
RootSequence solve_roots(const EigenEquationSpec& spec, int count);

// Q at which the k-th roots of both branches of the bridge equation coincide.
double bridge_double_root_Q(int k);

// --- Example 5 machinery -------------------------------------------------

// Integrals of the determinant entries, evaluated after the substitution
// t = Phi(x) on [-x_max, x_max].
struct QuantileContext {
    Vector x, t, pw;                 // outer nodes, Phi(x), weights * pdf
    std::vector<Vector> in_t, in_pw; // per-outer-node inner rule (cumulative range)
    std::vector<Vector> in_x;

    double A(double omega) const;  // int_0^1 Phi^{-1}(tau) cos(omega tau) dtau
    double C(double omega) const;  // int_0^1 Phi^{-1}(tau) sin(omega tau) dtau
    double B(double omega) const;  // double integral of (2.x) determinant entry
    double determinant(double omega, double Q) const;
};

std::shared_ptr<const QuantileContext> make_quantile_context(int outer_nodes = 512,
                                                   int inner_nodes = 192,
                                                   double x_max = 8.0);

}  // namespace klx
