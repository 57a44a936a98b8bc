#include "klx/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "klx/quadrature.hpp"

namespace klx {

namespace {

void fix_sign(Eigen::Ref<Vector> v) {
    double peak = v.cwiseAbs().maxCoeff();
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-8 * peak) {
            if (v[i] < 0.0) v = -v;
            return;
        }
    }
}

}  // namespace

Spectrum nystrom_spectrum(const Kernel& kernel, int grid_size, int count, bool with_vectors) {
    if (count < 1) throw PreconditionError("nystrom_spectrum: count must be >= 1");
    if (grid_size < 4 * count)
        throw PreconditionError("nystrom_spectrum: grid_size must be at least 4*count");

    Spectrum sp;
    sp.provenance = Provenance::Nystrom;
    sp.grid = composite_gauss_legendre(grid_size);
    const Index n = sp.grid.size();

    Matrix a = kernel.gram(sp.grid.nodes);
    Vector sqw = sp.grid.weights.cwiseSqrt();
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) a(i, j) *= sqw[i] * sqw[j];
    a = 0.5 * (a + a.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> es;
    es.compute(a, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("nystrom_spectrum: eigensolver failed");

    const Vector& ev = es.eigenvalues();  // increasing
    double lam_max = ev[n - 1];
    if (ev[0] < -1e-9 * std::max(lam_max, 0.0))
        throw NumericError("nystrom_spectrum: kernel is not positive semidefinite");

    sp.trace = ev.sum();
    sp.eigenvalues.resize(count);
    if (with_vectors) sp.eigenfunctions.resize(n, count);
    for (int k = 0; k < count; ++k) {
        sp.eigenvalues[k] = ev[n - 1 - k];
        if (with_vectors) {
            Vector u = es.eigenvectors().col(n - 1 - k).cwiseQuotient(sqw);
            fix_sign(u);
            sp.eigenfunctions.col(k) = u;
        }
        sp.entries.push_back({sp.eigenvalues[k], -1,
                              std::numeric_limits<double>::quiet_NaN(), 1});
    }
    return sp;
}

NystromFull nystrom_min_mode(const Kernel& kernel, int grid_size) {
    NystromFull out;
    out.grid = composite_gauss_legendre(grid_size);
    const Index n = out.grid.size();
    Matrix a = kernel.gram(out.grid.nodes);
    Vector sqw = out.grid.weights.cwiseSqrt();
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) a(i, j) *= sqw[i] * sqw[j];
    a = 0.5 * (a + a.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) throw NumericError("nystrom_min_mode: eigensolver failed");
    out.eigenvalues_desc = es.eigenvalues().reverse();
    Vector u = es.eigenvectors().col(0).cwiseQuotient(sqw);
    fix_sign(u);
    out.min_vector = u;
    return out;
}

NystromFull nystrom_transformed_min_mode(const Kernel& base, const Weight& weight,
                                         double alpha, int grid_size) {
    if (!weight.has_function_part() || !weight.atoms().empty() || weight.is_normal_quantile())
        throw PreconditionError(
            "nystrom_transformed_min_mode: needs a plain function weight");
    NystromFull out;
    out.grid = composite_gauss_legendre(grid_size);
    const Index n = out.grid.size();
    Matrix g = base.gram(out.grid.nodes);
    Vector wphi(n);
    for (Index i = 0; i < n; ++i) wphi[i] = out.grid.weights[i] * weight.fn_value(out.grid.nodes[i]);
    Vector psi = g * wphi;
    double q = wphi.dot(psi);
    double Q = q * alpha * alpha - 2.0 * alpha;
    g.noalias() += Q * psi * psi.transpose();

    Vector sqw = out.grid.weights.cwiseSqrt();
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) g(i, j) *= sqw[i] * sqw[j];
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    if (es.info() != Eigen::Success)
        throw NumericError("nystrom_transformed_min_mode: eigensolver failed");
    out.eigenvalues_desc = es.eigenvalues().reverse();
    Vector u = es.eigenvectors().col(0).cwiseQuotient(sqw);
    fix_sign(u);
    out.min_vector = u;
    return out;
}

Spectrum base_spectrum(Process p, int count, int grid_size) {
    if (!has_closed_form_spectrum(p))
        throw UnsupportedError("no closed-form spectrum for process '" + process_tag(p) +
                               "'; use nystrom_spectrum");
    BaseSpectrumFormula f = base_spectrum_formula(p);
    Spectrum sp;
    sp.provenance = Provenance::Analytic;
    sp.trace = kernel_trace(make_kernel(p));
    sp.grid = composite_gauss_legendre(grid_size);
    sp.eigenvalues.resize(count);
    sp.eigenfunctions.resize(sp.grid.size(), count);
    for (int k = 1; k <= count; ++k) {
        sp.eigenvalues[k - 1] = f.lambda(k);
        for (Index i = 0; i < sp.grid.size(); ++i)
            sp.eigenfunctions(i, k - 1) = f.u(k, sp.grid.nodes[i]);
        sp.entries.push_back({sp.eigenvalues[k - 1], 0,
                              1.0 / std::sqrt(sp.eigenvalues[k - 1]), 1});
    }
    sp.eval = [f](int k, double t) { return f.u(k + 1, t); };
    return sp;
}

double nystrom_extend(const Kernel& kernel, const Spectrum& sp, int k, double t) {
    double s = 0.0;
    for (Index j = 0; j < sp.grid.size(); ++j)
        s += sp.grid.weights[j] * kernel.eval(t, sp.grid.nodes[j]) * sp.eigenfunctions(j, k);
    return s / sp.eigenvalues[k];
}

double orthonormality_error(const Spectrum& sp) {
    const Index m = sp.eigenfunctions.cols();
    double worst = 0.0;
    for (Index j = 0; j < m; ++j) {
        for (Index k = j; k < m; ++k) {
            double ip = sp.grid.inner(sp.eigenfunctions.col(j), sp.eigenfunctions.col(k));
            worst = std::max(worst, std::abs(ip - (j == k ? 1.0 : 0.0)));
        }
    }
    return worst;
}

double reconstruction_error(const Spectrum& sp, const Kernel& kernel, int terms,
                            ConstRefVec probes) {
    double worst = 0.0;
    for (Index a = 0; a < probes.size(); ++a) {
        for (Index b = 0; b <= a; ++b) {
            double t = probes[a], s = probes[b];
            double acc = 0.0;
            for (int k = 0; k < terms; ++k) {
                double ut = sp.eval ? sp.eval(k, t) : nystrom_extend(kernel, sp, k, t);
                double us = sp.eval ? sp.eval(k, s) : nystrom_extend(kernel, sp, k, s);
                acc += sp.eigenvalues[k] * ut * us;
            }
            worst = std::max(worst, std::abs(acc - kernel.eval(t, s)));
        }
    }
    return worst;
}

InterlacingResult interlacing_check(const Spectrum& base, const Spectrum& transformed,
                                    double Q, double rel_tol) {
    const Index n = std::min(base.count(), transformed.count());
    const double tol = rel_tol * std::max(base.eigenvalues[0], transformed.eigenvalues[0]);
    for (Index k = 0; k + 1 < n; ++k) {
        double lo, hi, mid = transformed.eigenvalues[k];
        if (Q <= 0.0) {
            hi = base.eigenvalues[k];
            lo = base.eigenvalues[k + 1];
        } else {
            mid = base.eigenvalues[k];
            hi = transformed.eigenvalues[k];
            lo = transformed.eigenvalues[k + 1];
        }
        if (mid > hi + tol || mid < lo - tol) return {false, k};
    }
    return {true, -1};
}

FourierCoefficients fourier_coefficients(const Spectrum& sp, const Transform& tr, int count) {
    count = std::min<int>(count, static_cast<int>(sp.count()));
    FourierCoefficients fc;
    fc.a.resize(count);
    fc.partial_qsum.resize(count);
    Vector psi(sp.grid.size());
    for (Index i = 0; i < sp.grid.size(); ++i) psi[i] = tr.psi(sp.grid.nodes[i]);
    double acc = 0.0;
    for (int k = 0; k < count; ++k) {
        fc.a[k] = sp.grid.inner(psi, sp.eigenfunctions.col(k));
        acc += fc.a[k] * fc.a[k] / sp.eigenvalues[k];
        fc.partial_qsum[k] = acc;
    }
    return fc;
}

Spectrum eigenfunction_weight_shortcut(const Spectrum& sp, int m, double alpha) {
    if (m < 0 || m >= sp.count())
        throw PreconditionError("eigenfunction_weight_shortcut: index out of range");
    const double q = sp.eigenvalues[m];
    const double factor = (1.0 - q * alpha) * (1.0 - q * alpha);

    Vector lam = sp.eigenvalues;
    lam[m] *= factor;
    std::vector<Index> order(lam.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&lam](Index a, Index b) { return lam[a] > lam[b]; });

    Spectrum out;
    out.grid = sp.grid;
    out.provenance = Provenance::Assembled;
    out.eigenvalues.resize(lam.size());
    if (sp.eigenfunctions.size() > 0) out.eigenfunctions.resize(sp.eigenfunctions.rows(), lam.size());
    for (Index k = 0; k < lam.size(); ++k) {
        out.eigenvalues[k] = lam[order[k]];
        if (sp.eigenfunctions.size() > 0) out.eigenfunctions.col(k) = sp.eigenfunctions.col(order[k]);
        SpectralEntry e = sp.entries.empty()
                              ? SpectralEntry{lam[order[k]], 0,
                                              std::numeric_limits<double>::quiet_NaN(), 1}
                              : sp.entries[order[k]];
        e.lambda = lam[order[k]];
        out.entries.push_back(e);
    }
    if (sp.eval) {
        auto perm = std::make_shared<std::vector<Index>>(order);
        auto base_eval = sp.eval;
        out.eval = [perm, base_eval](int k, double t) {
            return base_eval(static_cast<int>((*perm)[k]), t);
        };
    }
    return out;
}

}  // namespace klx
