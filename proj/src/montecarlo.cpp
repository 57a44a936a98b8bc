#include "klx/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "klx/normal.hpp"
#include "klx/quadrature.hpp"

namespace klx {

namespace {

constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;

inline void philox_round(std::uint64_t& x0, std::uint64_t& x1, std::uint64_t key) {
    unsigned __int128 prod = static_cast<unsigned __int128>(x0) * kPhiloxM;
    std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
    std::uint64_t lo = static_cast<std::uint64_t>(prod);
    x0 = hi ^ key ^ x1;
    x1 = lo;
}

inline std::pair<std::uint64_t, std::uint64_t> philox_block(std::uint64_t key, std::uint64_t c0,
                                                            std::uint64_t c1) {
    std::uint64_t x0 = c0, x1 = c1;
    for (int r = 0; r < 10; ++r) {
        philox_round(x0, x1, key);
        key += kWeyl;
    }
    return {x0, x1};
}

}  // namespace

double NormalStream::operator()(std::uint64_t i) const {
    auto [r0, r1] = philox_block(seed_, stream_, i >> 1);
    double u1 = (static_cast<double>(r0 >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    double u2 = static_cast<double>(r1 >> 11) * 0x1.0p-53;          // [0,1)
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * pi * u2;
    return (i & 1) ? rad * std::sin(ang) : rad * std::cos(ang);
}


namespace {

// <phi, u_k> with a rule dense enough for the k-th mode's oscillation.
double functional_coefficient(const Spectrum& sp, const Weight& w, int k) {
    auto u = [&sp, k](double t) { return sp.eval(k, t); };
    double v = 0.0;
    if (w.has_function_part()) {
        if (w.is_normal_quantile()) {
            Grid g = composite_gauss_legendre(std::max(512, 8 * (k + 1)), -8.0, 8.0);
            for (Index i = 0; i < g.size(); ++i) v += g.weights[i] * u(normal_cdf(g.nodes[i]));
        } else {
            Grid g = split_rule(0.0, 1.0, w.function_breakpoints(),
                                std::max(40, (5 * (k + 1)) / 4));
            for (Index i = 0; i < g.size(); ++i)
                v += g.weights[i] * w.fn_value(g.nodes[i]) * u(g.nodes[i]);
        }
    }
    for (const auto& a : w.atoms()) {
        if (a.kind == WeightAtom::Kind::PointMass) {
            v += a.coeff * u(a.t0);
        } else {
            double h = 1e-5;
            double d = a.t0 > 0.5
                           ? (3.0 * u(a.t0) - 4.0 * u(a.t0 - h) + u(a.t0 - 2.0 * h)) / (2.0 * h)
                           : (-3.0 * u(a.t0) + 4.0 * u(a.t0 + h) - u(a.t0 + 2.0 * h)) / (2.0 * h);
            v -= a.coeff * d;
        }
    }
    return v;
}

}  // namespace

int default_n_terms(const Spectrum& sp) {
    const int cap = std::min<Index>(sp.count(), 10000);
    if (!std::isfinite(sp.trace)) return cap;
    double tail = sp.trace;
    for (int k = 0; k < cap; ++k) {
        tail -= sp.eigenvalues[k];
        if (tail < 1e-4 * sp.trace) return k + 1;
    }
    return cap;
}

namespace {

// Eigenfunction samples U (n_terms x n_points) at the requested nodes.
Matrix eigenfunction_samples(const Spectrum& sp, int n_terms, const Grid& grid,
                             bool grid_is_spectrum_grid) {
    Matrix u(n_terms, grid.size());
    if (grid_is_spectrum_grid && sp.eigenfunctions.size() > 0) {
        for (int k = 0; k < n_terms; ++k) u.row(k) = sp.eigenfunctions.col(k).transpose();
        return u;
    }
    if (!sp.eval)
        throw PreconditionError(
            "sample_paths: off-grid evaluation needs an analytic eigenfunction evaluator");
    for (int k = 0; k < n_terms; ++k)
        for (Index j = 0; j < grid.size(); ++j) u(k, j) = sp.eval(k, grid.nodes[j]);
    return u;
}

}  // namespace

SampleBatch sample_paths(const Spectrum& sp, int n_paths, int n_terms, std::uint64_t seed,
                         const Grid* eval_grid, const Weight* functional,
                         std::uint64_t stream_offset) {
    if (n_terms < 1 || n_terms > sp.count())
        throw PreconditionError("sample_paths: n_terms exceeds the spectrum length");
    SampleBatch batch;
    batch.seed = seed;
    batch.stream_offset = stream_offset;
    batch.n_terms = n_terms;
    batch.eval_grid = eval_grid ? *eval_grid : sp.grid;
    const bool own_grid = !eval_grid;

    Matrix u = eigenfunction_samples(sp, n_terms, batch.eval_grid, own_grid);
    Vector sqrt_lam(n_terms);
    for (int k = 0; k < n_terms; ++k) sqrt_lam[k] = std::sqrt(sp.eigenvalues[k]);

    Vector c;  // functional coefficients <phi, u_k>
    if (functional) {
        c.resize(n_terms);
        for (int k = 0; k < n_terms; ++k) {
            if (sp.eval) {
                c[k] = functional_coefficient(sp, *functional, k);
            } else {
                if (!functional->has_function_part() || !functional->atoms().empty())
                    throw PreconditionError(
                        "sample_paths: atomic functionals need an analytic spectrum");
                double acc = 0.0;
                for (Index j = 0; j < sp.grid.size(); ++j)
                    acc += sp.grid.weights[j] * functional->fn_value(sp.grid.nodes[j]) *
                           sp.eigenfunctions(j, k);
                c[k] = acc;
            }
        }
        batch.functional.resize(n_paths);
    }

    if (std::isfinite(sp.trace)) {
        double head = 0.0;
        for (int k = 0; k < n_terms; ++k) head += sp.eigenvalues[k];
        batch.tail_bound = std::max(0.0, sp.trace - head);
    }

    batch.paths.resize(n_paths, batch.eval_grid.size());
    Vector coef(n_terms);
    for (int p = 0; p < n_paths; ++p) {
        NormalStream rng(seed, stream_offset + static_cast<std::uint64_t>(p));
        for (int k = 0; k < n_terms; ++k) coef[k] = sqrt_lam[k] * rng(static_cast<std::uint64_t>(k));
        batch.paths.row(p).noalias() = coef.transpose() * u;
        if (functional) batch.functional[p] = coef.dot(c);
    }
    return batch;
}

// <phi, X_p> for every stored path: the batch's precomputed values when
// present, otherwise grid quadrature / interpolation of the path samples.
Vector batch_functional(const SampleBatch& batch, const Weight& w) {
    const Index n = batch.paths.rows();
    if (batch.functional.size() == n) return batch.functional;
    const Grid& g = batch.eval_grid;
    for (const auto& a : w.atoms()) {
        if (a.kind == WeightAtom::Kind::Dipole) {
            // derivative from grid values needs resolution near t0
            double spacing = 1.0 / static_cast<double>(g.size());
            if (spacing > 2e-2)
                throw NumericError("transform_paths: grid too coarse for a dipole weight");
        }
    }
    Vector j(n);
    for (Index p = 0; p < n; ++p) {
        Vector row = batch.paths.row(p).transpose();
        auto f = [&g, &row](double t) {
            if (t <= g.nodes[0]) return row[0];
            if (t >= g.nodes[g.size() - 1]) return row[g.size() - 1];
            Index hi = std::upper_bound(g.nodes.begin(), g.nodes.end(), t) - g.nodes.begin();
            double fr = (t - g.nodes[hi - 1]) / (g.nodes[hi] - g.nodes[hi - 1]);
            return (1.0 - fr) * row[hi - 1] + fr * row[hi];
        };
        if (w.has_function_part() && !w.is_normal_quantile() && g.weights.size() == g.size()) {
            double acc = 0.0;
            for (Index i = 0; i < g.size(); ++i)
                acc += g.weights[i] * w.fn_value(g.nodes[i]) * row[i];
            for (const auto& a : w.atoms()) {
                if (a.kind == WeightAtom::Kind::PointMass) acc += a.coeff * f(a.t0);
                else acc -= a.coeff * (f(a.t0) - f(a.t0 - 1e-4)) / 1e-4;
            }
            j[p] = acc;
        } else {
            j[p] = weight_dot(w, f);
        }
    }
    return j;
}

SampleBatch transform_paths(const SampleBatch& batch, const Transform& tr) {
    if (batch.paths.size() == 0)
        throw PreconditionError("transform_paths: batch holds no paths");
    Vector j = batch_functional(batch, tr.weight());

    SampleBatch out = batch;
    Vector psi(batch.eval_grid.size());
    for (Index i = 0; i < psi.size(); ++i) psi[i] = tr.psi(batch.eval_grid.nodes[i]);
    out.paths.noalias() -= tr.alpha() * j * psi.transpose();
    // <phi, X - alpha psi <phi,X>> = (1 - alpha q) <phi, X>
    out.functional = (1.0 - tr.alpha() * tr.q()) * j;
    return out;
}

SampleBatch sample_norm2(ConstRefVec eigenvalues, int n_samples, std::uint64_t seed,
                         double trace, std::uint64_t stream_offset) {
    SampleBatch batch;
    batch.seed = seed;
    batch.stream_offset = stream_offset;
    batch.n_terms = static_cast<int>(eigenvalues.size());
    if (std::isfinite(trace)) batch.tail_bound = std::max(0.0, trace - eigenvalues.sum());
    batch.norm2.resize(n_samples);
    const Index m = eigenvalues.size();
    for (int p = 0; p < n_samples; ++p) {
        NormalStream rng(seed, stream_offset + static_cast<std::uint64_t>(p));
        double acc = 0.0;
        for (Index k = 0; k < m; ++k) {
            double x = rng(static_cast<std::uint64_t>(k));
            acc += eigenvalues[k] * x * x;
        }
        batch.norm2[p] = acc;
    }
    return batch;
}

SmallBallEstimate empirical_small_ball(const SampleBatch& batch, double eps) {
    if (batch.norm2.size() == 0)
        throw PreconditionError("empirical_small_ball: batch holds no norm samples");
    if (!(eps > 0.0)) throw PreconditionError("empirical_small_ball: eps must be positive");
    const double r = eps * eps;
    long long hits = 0;
    for (Index i = 0; i < batch.norm2.size(); ++i)
        if (batch.norm2[i] <= r) ++hits;
    const double n = static_cast<double>(batch.norm2.size());
    const double p = static_cast<double>(hits) / n;
    const double z = 1.959963984540054;
    const double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {p, std::max(0.0, center - half), std::min(1.0, center + half), hits};
}

namespace {

Matrix empirical_transformed_covariance(const Spectrum& base_sp, const Transform& tr,
                                        ConstRefVec probes, int n_paths, int n_terms,
                                        std::uint64_t seed, std::uint64_t stream_offset) {
    if (!base_sp.eval)
        throw PreconditionError("covariance check needs an analytic base spectrum");
    const Index m = probes.size();
    Matrix u(n_terms, m);
    for (int k = 0; k < n_terms; ++k)
        for (Index j = 0; j < m; ++j) u(k, j) = base_sp.eval(k, probes[j]);
    Vector c(n_terms);
    for (int k = 0; k < n_terms; ++k) c[k] = functional_coefficient(base_sp, tr.weight(), k);
    Vector psi(m);
    for (Index j = 0; j < m; ++j) psi[j] = tr.psi(probes[j]);
    Vector sqrt_lam(n_terms);
    for (int k = 0; k < n_terms; ++k) sqrt_lam[k] = std::sqrt(base_sp.eigenvalues[k]);

    Matrix acc = Matrix::Zero(m, m);
    Vector coef(n_terms), y(m);
    for (int p = 0; p < n_paths; ++p) {
        NormalStream rng(seed, stream_offset + static_cast<std::uint64_t>(p));
        for (int k = 0; k < n_terms; ++k) coef[k] = sqrt_lam[k] * rng(static_cast<std::uint64_t>(k));
        y.noalias() = u.transpose() * coef;
        y.noalias() -= (tr.alpha() * coef.dot(c)) * psi;
        acc.selfadjointView<Eigen::Lower>().rankUpdate(y, 1.0);
    }
    acc /= static_cast<double>(n_paths);
    return acc.selfadjointView<Eigen::Lower>();
}

}  // namespace

CovarianceReport covariance_vs_kernel(const Spectrum& base_sp, const Transform& tr,
                                      ConstRefVec probes, int n_paths, int n_terms,
                                      std::uint64_t seed, std::uint64_t stream_offset) {
    CovarianceReport rep;
    rep.emp = empirical_transformed_covariance(base_sp, tr, probes, n_paths, n_terms, seed,
                                               stream_offset);
    Kernel k = transformed_kernel(tr);
    const Index m = probes.size();
    rep.exact.resize(m, m);
    for (Index a = 0; a < m; ++a)
        for (Index b = 0; b < m; ++b) rep.exact(a, b) = k.eval(probes[a], probes[b]);
    rep.max_z = 0.0;
    rep.max_abs = 0.0;
    const double n = static_cast<double>(n_paths);
    for (Index a = 0; a < m; ++a) {
        for (Index b = 0; b <= a; ++b) {
            double se = std::sqrt((rep.emp(a, a) * rep.emp(b, b) + rep.emp(a, b) * rep.emp(a, b)) / n);
            double dev = std::abs(rep.emp(a, b) - rep.exact(a, b));
            rep.max_abs = std::max(rep.max_abs, dev);
            if (se > 0.0) rep.max_z = std::max(rep.max_z, dev / se);
        }
    }
    return rep;
}

double duality_mc_check(const Transform& tr, ConstRefVec probes, int n_paths, int n_terms,
                        std::uint64_t seed) {
    const Kernel& kernel = tr.kernel();
    if (!has_closed_form_spectrum(kernel.id()))
        throw PreconditionError("duality_mc_check: base process needs a closed-form spectrum");
    Spectrum sp = base_spectrum(kernel.id(), n_terms, 256);
    Transform dual = make_transform(kernel, tr.weight(), dual_alpha(tr.q(), tr.alpha()), tr.quad());

    Matrix c1 = empirical_transformed_covariance(sp, tr, probes, n_paths, n_terms, seed, 0);
    Matrix c2 = empirical_transformed_covariance(sp, dual, probes, n_paths, n_terms, seed,
                                                 static_cast<std::uint64_t>(1) << 32);
    double max_z = 0.0;
    const double n = static_cast<double>(n_paths);
    for (Index a = 0; a < probes.size(); ++a) {
        for (Index b = 0; b <= a; ++b) {
            double v1 = (c1(a, a) * c1(b, b) + c1(a, b) * c1(a, b)) / n;
            double v2 = (c2(a, a) * c2(b, b) + c2(a, b) * c2(a, b)) / n;
            double se = std::sqrt(v1 + v2);
            if (se > 0.0) max_z = std::max(max_z, std::abs(c1(a, b) - c2(a, b)) / se);
        }
    }
    return max_z;
}

std::pair<double, double> critical_functional_check(const Transform& tr, const SampleBatch& batch) {
    if (!tr.critical())
        throw PreconditionError("critical_functional_check: transform is not critical");
    Vector j = batch_functional(batch, tr.weight());
    SampleBatch t = transform_paths(batch, tr);
    // measure <phi, transformed path> from the samples themselves rather
    // than through the (1 - alpha q) identity
    t.functional.resize(0);
    double resid = batch_functional(t, tr.weight()).cwiseAbs().maxCoeff();

    // correlation between the transformed path at a probe and <phi, X>
    Index probe = batch.eval_grid.size() / 3;
    Vector x = t.paths.col(probe);
    double num = x.dot(j);
    double den = std::sqrt(x.squaredNorm() * j.squaredNorm());
    double corr = den > 0.0 ? num / den : 0.0;
    return {resid, corr};
}

double two_sample_ks(Vector a, Vector b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    Index i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i;
        else ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

}  // namespace klx
