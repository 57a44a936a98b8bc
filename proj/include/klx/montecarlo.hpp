#pragma once

#include <cstdint>
#include <utility>

#include "klx/spectrum.hpp"
#include "klx/transform.hpp"
#include "klx/types.hpp"

namespace klx {

// Counter-based Gaussian stream (Philox 2x64-10 + Box-Muller): normal(i) is
// the i-th standard normal of substream `stream`, random access, and distinct
// streams partition the counter space so parallel workers never overlap.
class NormalStream {
  public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}
    double operator()(std::uint64_t i) const;

  private:
    std::uint64_t seed_, stream_;
};

struct SampleBatch {
    Matrix paths;      // n_paths x eval points (empty for norm2 batches)
    Grid eval_grid;    // weights may be empty when nodes are bare probes
    Vector functional; // <phi, X> per path, when requested
    Vector norm2;      // ||X||_2^2 samples (alternative payload)
    std::uint64_t seed = 0;
    std::uint64_t stream_offset = 0;
    int n_terms = 0;
    double tail_bound = 0.0;  // sum_{k>N} lambda_k estimate
};

// Truncation honoring the default tail rule: smallest N with
// tail < 1e-4 * trace, capped at the spectrum length and 10^4 terms.
int default_n_terms(const Spectrum& sp);

// KL synthesis: path_p = sum_{k<=N} sqrt(lambda_k) u_k(.) xi_{p,k}.
// If `functional` is given, <phi, X_p> is accumulated alongside from the
// same coefficients (equal to grid quadrature of the synthesized path).
SampleBatch sample_paths(const Spectrum& sp, int n_paths, int n_terms, std::uint64_t seed,
                         const Grid* eval_grid = nullptr, const Weight* functional = nullptr,
                         std::uint64_t stream_offset = 0);

// Pathwise transform X - alpha psi <phi, X>. The functional comes from the
// batch if present, else from grid quadrature of the stored paths.
SampleBatch transform_paths(const SampleBatch& batch, const Transform& tr);

SampleBatch sample_norm2(ConstRefVec eigenvalues, int n_samples, std::uint64_t seed,
                         double trace = std::numeric_limits<double>::quiet_NaN(),
                         std::uint64_t stream_offset = 0);

struct SmallBallEstimate {
    double estimate;
    double lo, hi;   // 95% Wilson score interval
    long long hits;  // zero hits flags the small-count warning
};
SmallBallEstimate empirical_small_ball(const SampleBatch& batch, double eps);

// Empirical covariance of transformed paths at probe points against the
// rank-one transformed kernel; max_z is the worst deviation in SE units.
struct CovarianceReport {
    Matrix emp;
    Matrix exact;
    double max_z;
    double max_abs;
};
CovarianceReport covariance_vs_kernel(const Spectrum& base_sp, const Transform& tr,
                                      ConstRefVec probes, int n_paths, int n_terms,
                                      std::uint64_t seed, std::uint64_t stream_offset = 0);

// Duality check: empirical covariances at alpha and 2/q - alpha from
// independent substreams, reported in combined-standard-error units.
double duality_mc_check(const Transform& tr, ConstRefVec probes, int n_paths, int n_terms,
                        std::uint64_t seed);

// (max_p |<phi, transformed path>|, corr(transformed path at probe, <phi,X>)).
std::pair<double, double> critical_functional_check(const Transform& tr, const SampleBatch& batch);

// Two-sample Kolmogorov-Smirnov statistic.
double two_sample_ks(Vector a, Vector b);

}  // namespace klx
