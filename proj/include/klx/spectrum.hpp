#pragma once

#include <functional>
#include <vector>

#include "klx/kernel.hpp"
#include "klx/transform.hpp"
#include "klx/types.hpp"

namespace klx {

enum class Provenance { Analytic, Nystrom, Assembled };

// One eigenvalue with its origin: branch 0 = first family (or the only one),
// branch 1 = second family, branch -1 = numeric. x is the root (omega or tau)
// that produced the eigenvalue, NaN for numeric entries.
struct SpectralEntry {
    double lambda;
    int branch;
    double x;
    int multiplicity;
};

struct Spectrum {
    Vector eigenvalues;   // decreasing, positive
    Matrix eigenfunctions;  // grid.size() x count, L2-normalized under grid weights
    Grid grid;
    Provenance provenance = Provenance::Analytic;
    std::vector<SpectralEntry> entries;
    // Analytic evaluator for eigenfunction k at arbitrary t, when available.
    std::function<double(int, double)> eval;
    // Operator trace (sum of all eigenvalues), for truncation tail bounds.
    double trace = std::numeric_limits<double>::quiet_NaN();

    Index count() const { return eigenvalues.size(); }
};

// First `count` eigenpairs of the covariance operator by the symmetrized
// Nystrom discretization W^{1/2} G W^{1/2} on a composite Gauss-Legendre grid.
Spectrum nystrom_spectrum(const Kernel& kernel, int grid_size, int count,
                          bool with_vectors = true);

// Closed-form base spectrum sampled on a composite grid of size grid_size.
Spectrum base_spectrum(Process p, int count, int grid_size = 1024);

// Nystrom extension of eigenfunction k to an off-grid point.
double nystrom_extend(const Kernel& kernel, const Spectrum& sp, int k, double t);

// Full discrete spectrum plus the eigenvector of the smallest eigenvalue,
// for zero-mode checks at critical transforms.
struct NystromFull {
    Vector eigenvalues_desc;
    Vector min_vector;
    Grid grid;
};
NystromFull nystrom_min_mode(const Kernel& kernel, int grid_size);

// Same, but the rank-one update G + Q psi psi^T is assembled from the
// grid-discretized psi = G W phi and q = <phi, psi>_W, so the critical
// annihilation G~ W phi = 0 holds at the matrix level instead of being
// masked by the quadrature error of the kernel's diagonal kink.
NystromFull nystrom_transformed_min_mode(const Kernel& base, const Weight& weight,
                                         double alpha, int grid_size);

double orthonormality_error(const Spectrum& sp);

// Max abs error of the truncated kernel reconstruction at probe pairs.
double reconstruction_error(const Spectrum& sp, const Kernel& kernel, int terms,
                            ConstRefVec probes);

struct InterlacingResult {
    bool ok;
    Index witness;  // first violating index, -1 if ok
};
// Rank-one interlacing: Q < 0 gives lambda_k >= tlambda_k >= lambda_{k+1},
// Q > 0 the mirrored inequalities.
InterlacingResult interlacing_check(const Spectrum& base, const Spectrum& transformed,
                                    double Q, double rel_tol = 1e-9);

struct FourierCoefficients {
    Vector a;            // <psi, u_k>
    Vector partial_qsum; // partial sums of a_k^2 / lambda_k
};
FourierCoefficients fourier_coefficients(const Spectrum& sp, const Transform& tr, int count);

// KL spectrum of the transform with phi = u_m (q = lambda_m): entry m is
// scaled by (1 - q alpha)^2, everything else is untouched.
Spectrum eigenfunction_weight_shortcut(const Spectrum& sp, int m, double alpha);

}  // namespace klx
