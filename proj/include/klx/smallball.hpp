#pragma once

#include <functional>
#include <utility>

#include "klx/kernel.hpp"
#include "klx/spectrum.hpp"
#include "klx/types.hpp"

namespace klx {

// Small-ball law in the variable r = eps^2:
//   F(r) = P{ ||X||_2 <= sqrt(r) } ~ C * r^beta * exp(-D * r^{-d}).
struct AsymptoticDescriptor {
    double C;
    double beta;
    double D;
    double d;
};

// (d, D) for the Green function of an operator of order 2*ell:
// d = 1/(2 ell - 1), D = (1/(2d)) (2 ell sin(pi/(2 ell)))^{-d-1}.
std::pair<double, double> green_constants(int ell);

// Base descriptors of the catalog processes (at alpha = 0).
AsymptoticDescriptor base_smallball(Process p);

// Non-critical scaling (Theorem-1 style): C / |1 - alpha q|.
AsymptoticDescriptor theorem1_scale(const AsymptoticDescriptor& base, double q, double alpha);

// Critical closed form (Theorem-3 style): C * sqrt(2 q D d) / ||phi||_2,
// beta - (d+1)/2. Requires a square-integrable weight.
AsymptoticDescriptor theorem3_scale(const AsymptoticDescriptor& base, double q,
                                    double phi_l2_norm);

// Density form: F'(r) ~ C D d r^{beta-d-1} exp(-D r^{-d}).
AsymptoticDescriptor density_asymptotics(const AsymptoticDescriptor& desc);

// C eps^{2 beta} exp(-D eps^{-2d}), clamped to [0,1].
double eval_asymptotic(const AsymptoticDescriptor& desc, double eps, bool* clamped = nullptr);

// Tabulated distribution function near r = 0, optionally with density values.
struct DistributionCurve {
    Vector r;
    Vector F;
    Vector dF;  // empty when no density is available

    bool has_density() const { return dF.size() == r.size(); }
};

DistributionCurve curve_from_functions(const std::function<double(double)>& F,
                                       const std::function<double(double)>& dF,
                                       ConstRefVec rgrid);
DistributionCurve curve_from_samples(Vector samples, ConstRefVec rgrid);

// Abel integral int_0^r g(x)/sqrt(r-x) dx with the substitution x = r(1-y^2).
double abel_half_integral(const std::function<double(double)>& g, double r, int n_nodes = 256);

// Critical-case convolution pipeline (scale factor + Abel integral):
//   (sqrt(q)/||phi||) sqrt(2/pi) int_0^{eps^2} F'(x) dx / sqrt(eps^2 - x).
double theorem2_convolution(const DistributionCurve& base, double q, double phi_l2_norm,
                            double eps);
double theorem2_convolution(const std::function<double(double)>& base_density, double q,
                            double phi_l2_norm, double eps);
// Literal display form of the critical-case statement, kept for comparison
// only; the pipeline above is the authoritative route.
double theorem2_display_form(const std::function<double(double)>& base_density, double q,
                             double phi_l2_norm, double eps);

// Removes the largest eigenvalue's chi-square factor from a tabulated CDF:
//   F1(r) = sqrt(2 l1 / pi) e^{-r/(2 l1)} int_0^r (F(x) e^{x/(2 l1)})' dx / sqrt(r - x),
// evaluated exactly for the piecewise-linear interpolant of the curve.
DistributionCurve deconvolve_first(const DistributionCurve& curve, double lambda1,
                                   ConstRefVec out_r);
// Coefficients c_j with F1(r) = prefactor(r) * sum_j c_j F_j e^{x_j/(2 l1)};
// used for error propagation of Monte Carlo curves.
Vector deconvolve_coefficients(ConstRefVec x, double r);

// Partial eigenvalue-ratio product prod_{k<N} tlambda_k / lambda_k. In the
// critical case the transformed zero eigenvalue is dropped and the base
// enumeration shifts by one entry to restore the term-by-term pairing.
double fredholm_ratio(const Spectrum& base, const Spectrum& transformed, int N,
                      bool critical = false);

struct JensenProbe {
    double gamma1;
    double gamma2;
    Vector b;   // nonnegative, summable
    Vector mu;  // positive, sum 1/mu_k < infinity
    double R;
    int theta_grid = 4096;
};

// (1/2pi) int_0^{2pi} ln| gamma1 + gamma2 sum_k b_k / (1 - mu_k/(R e^{i th})) | dth.
double jensen_limit(const JensenProbe& probe);

// Numeric restatement of F = o(F') as r -> 0+: block medians of F/F' must
// increase along the tabulated range.
bool density_ratio_trend(const DistributionCurve& curve, int blocks = 4);

// CDF of lambda * xi^2 for a standard Gaussian xi.
double chi1_cdf(double lambda, double x);
double chi1_density(double lambda, double x);

}  // namespace klx
