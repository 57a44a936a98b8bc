#include "klx/smallball.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "klx/quadrature.hpp"

namespace klx {

std::pair<double, double> green_constants(int ell) {
    if (ell < 1) throw PreconditionError("green_constants: ell must be >= 1");
    double d = 1.0 / (2.0 * ell - 1.0);
    double D = (1.0 / (2.0 * d)) * std::pow(2.0 * ell * std::sin(pi / (2.0 * ell)), -d - 1.0);
    return {d, D};
}

AsymptoticDescriptor base_smallball(Process p) {
    const double spi = std::sqrt(pi);
    switch (p) {
        case Process::Wiener:
            return {4.0 / spi, 0.5, 0.125, 1.0};
        case Process::Bridge:
            return {2.0 * std::sqrt(2.0) / spi, 0.0, 0.125, 1.0};
        case Process::IntegratedWiener:
            return {8.0 * std::sqrt(6.0) / (3.0 * spi), 1.0 / 6.0, 3.0 / 8.0, 1.0 / 3.0};
        case Process::IntegratedCenteredWiener:
            return {4.0 * std::sqrt(2.0) / std::sqrt(3.0 * pi), -1.0 / 6.0, 3.0 / 8.0, 1.0 / 3.0};
        default:
            throw UnsupportedError("no base small-ball descriptor for process '" +
                                   process_tag(p) + "'");
    }
}

AsymptoticDescriptor theorem1_scale(const AsymptoticDescriptor& base, double q, double alpha) {
    double denom = std::abs(1.0 - alpha * q);
    if (denom <= 1e-12)
        throw PreconditionError(
            "theorem1_scale: alpha is critical; use theorem3_scale or theorem2_convolution");
    AsymptoticDescriptor out = base;
    out.C = base.C / denom;
    return out;
}

AsymptoticDescriptor theorem3_scale(const AsymptoticDescriptor& base, double q,
                                    double phi_l2_norm) {
    if (!(phi_l2_norm > 0.0) || !std::isfinite(phi_l2_norm))
        throw UnsupportedError("theorem3_scale: weight is not square integrable");
    if (!(base.d > 0.0))
        throw PreconditionError("theorem3_scale: base descriptor lacks an operator order");
    AsymptoticDescriptor out = base;
    out.C = base.C * std::sqrt(2.0 * q * base.D * base.d) / phi_l2_norm;
    out.beta = base.beta - (base.d + 1.0) / 2.0;
    return out;
}

AsymptoticDescriptor density_asymptotics(const AsymptoticDescriptor& desc) {
    return {desc.C * desc.D * desc.d, desc.beta - desc.d - 1.0, desc.D, desc.d};
}

double eval_asymptotic(const AsymptoticDescriptor& desc, double eps, bool* clamped) {
    if (!(eps > 0.0)) throw PreconditionError("eval_asymptotic: eps must be positive");
    double v = desc.C * std::pow(eps, 2.0 * desc.beta) *
               std::exp(-desc.D * std::pow(eps, -2.0 * desc.d));
    if (clamped) *clamped = v > 1.0;
    return std::clamp(v, 0.0, 1.0);
}

DistributionCurve curve_from_functions(const std::function<double(double)>& F,
                                       const std::function<double(double)>& dF,
                                       ConstRefVec rgrid) {
    DistributionCurve c;
    c.r = rgrid;
    c.F.resize(rgrid.size());
    c.dF.resize(rgrid.size());
    for (Index i = 0; i < rgrid.size(); ++i) {
        c.F[i] = F(rgrid[i]);
        c.dF[i] = dF(rgrid[i]);
    }
    return c;
}

DistributionCurve curve_from_samples(Vector samples, ConstRefVec rgrid) {
    std::sort(samples.begin(), samples.end());
    DistributionCurve c;
    c.r = rgrid;
    c.F.resize(rgrid.size());
    const double n = static_cast<double>(samples.size());
    for (Index i = 0; i < rgrid.size(); ++i) {
        auto it = std::upper_bound(samples.begin(), samples.end(), rgrid[i]);
        c.F[i] = static_cast<double>(it - samples.begin()) / n;
    }
    return c;
}

double abel_half_integral(const std::function<double(double)>& g, double r, int n_nodes) {
    Grid y = composite_gauss_legendre(n_nodes);
    double acc = 0.0;
    for (Index i = 0; i < y.size(); ++i)
        acc += y.weights[i] * g(r * (1.0 - y.nodes[i] * y.nodes[i]));
    return 2.0 * std::sqrt(r) * acc;
}

namespace {

// Linear interpolation of (x, v) at t; v is clamped at the ends.
double lin_interp(ConstRefVec x, ConstRefVec v, double t) {
    if (t <= x[0]) return v[0];
    if (t >= x[x.size() - 1]) return v[v.size() - 1];
    Index hi = std::upper_bound(x.begin(), x.end(), t) - x.begin();
    double f = (t - x[hi - 1]) / (x[hi] - x[hi - 1]);
    return (1.0 - f) * v[hi - 1] + f * v[hi];
}

}  // namespace

double theorem2_convolution(const DistributionCurve& base, double q, double phi_l2_norm,
                            double eps) {
    if (!base.has_density())
        throw PreconditionError("theorem2_convolution: curve carries no density values");
    double r = eps * eps;
    Index below = std::lower_bound(base.r.begin(), base.r.end(), r) - base.r.begin();
    if (below < 32)
        throw NumericError("theorem2_convolution: curve too coarse below eps^2");
    auto dens = [&base](double x) { return lin_interp(base.r, base.dF, x); };
    return theorem2_convolution(dens, q, phi_l2_norm, eps);
}

double theorem2_convolution(const std::function<double(double)>& base_density, double q,
                            double phi_l2_norm, double eps) {
    if (!(phi_l2_norm > 0.0) || !std::isfinite(phi_l2_norm))
        throw UnsupportedError("theorem2_convolution: weight is not square integrable");
    double r = eps * eps;
    double abel = abel_half_integral(base_density, r);
    return (std::sqrt(q) / phi_l2_norm) * std::sqrt(2.0 / pi) * abel;
}

double theorem2_display_form(const std::function<double(double)>& base_density, double q,
                             double phi_l2_norm, double eps) {
    // As displayed: int_0^{eps^2} dP{||X|| <= t}/dt * dt / sqrt(eps^2 - t^2),
    // with t a norm threshold, so dP/dt = 2 t F'(t^2). The kernel is regular
    // on [0, eps^2] for eps < 1.
    double r = eps * eps;
    Grid g = composite_gauss_legendre(512, 0.0, r);
    double acc = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
        double t = g.nodes[i];
        acc += g.weights[i] * 2.0 * t * base_density(t * t) / std::sqrt(r - t * t + 1e-300);
    }
    return (std::sqrt(q) / phi_l2_norm) * std::sqrt(2.0 / pi) * acc;
}

Vector deconvolve_coefficients(ConstRefVec x, double r) {
    const Index n = x.size();
    Vector c = Vector::Zero(n);
    for (Index j = 0; j + 1 < n; ++j) {
        if (x[j] >= r) break;
        double hi = std::min(x[j + 1], r);
        double g = 2.0 * (std::sqrt(r - x[j]) - std::sqrt(r - hi)) / (x[j + 1] - x[j]);
        c[j] -= g;
        c[j + 1] += g;
    }
    return c;
}

DistributionCurve deconvolve_first(const DistributionCurve& curve, double lambda1,
                                   ConstRefVec out_r) {
    if (!(lambda1 > 0.0)) throw PreconditionError("deconvolve_first: lambda1 must be positive");
    const Index n = curve.r.size();
    if (n < 3) throw PreconditionError("deconvolve_first: curve too short");
    Vector H(n);
    for (Index j = 0; j < n; ++j) H[j] = curve.F[j] * std::exp(curve.r[j] / (2.0 * lambda1));

    DistributionCurve out;
    out.r = out_r;
    out.F.resize(out_r.size());
    for (Index i = 0; i < out_r.size(); ++i) {
        double r = out_r[i];
        Vector c = deconvolve_coefficients(curve.r, r);
        double acc = c.dot(H);
        double v = std::sqrt(2.0 * lambda1 / pi) * std::exp(-r / (2.0 * lambda1)) * acc;
        if (v < -1e-6)
            throw NumericError("deconvolve_first: output went negative beyond tolerance");
        out.F[i] = v;
    }
    return out;
}

double fredholm_ratio(const Spectrum& base, const Spectrum& transformed, int N, bool critical) {
    const double zero_tol = 1e-10 * transformed.eigenvalues[0];
    std::vector<double> tl;
    bool saw_zero = false;
    for (Index k = 0; k < transformed.count(); ++k) {
        if (transformed.eigenvalues[k] < zero_tol) {
            saw_zero = true;
            continue;
        }
        tl.push_back(transformed.eigenvalues[k]);
    }
    if (saw_zero && !critical)
        throw PreconditionError(
            "fredholm_ratio: zero eigenvalue present in a non-critical enumeration");

    double prod = 1.0;
    if (!critical) {
        if (static_cast<int>(tl.size()) < N || base.count() < N)
            throw PreconditionError("fredholm_ratio: spectra shorter than N");
        for (int k = 0; k < N; ++k) prod *= tl[k] / base.eigenvalues[k];
    } else {
        // Dropping the zero eigenvalue shifts the pairing by one base entry.
        if (static_cast<int>(tl.size()) < N || base.count() < N + 1)
            throw PreconditionError("fredholm_ratio: spectra shorter than N");
        for (int k = 0; k < N; ++k) prod *= tl[k] / base.eigenvalues[k + 1];
    }
    return prod;
}

double jensen_limit(const JensenProbe& probe) {
    if (probe.b.size() != probe.mu.size())
        throw PreconditionError("jensen_limit: b and mu must have equal length");
    if (!(probe.R > 0.0)) throw PreconditionError("jensen_limit: R must be positive");
    const int n = std::max(probe.theta_grid, 16);

    auto integrate = [&](double offset) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            double th = 2.0 * pi * (j + offset) / n;
            std::complex<double> z = std::polar(probe.R, th);
            std::complex<double> s = 0.0;
            for (Index k = 0; k < probe.b.size(); ++k)
                s += probe.b[k] / (1.0 - probe.mu[k] / z);
            double mag = std::abs(probe.gamma1 + probe.gamma2 * s);
            if (mag < 1e-14 || !std::isfinite(mag)) return std::pair<bool, double>{false, 0.0};
            acc += std::log(mag);
        }
        return std::pair<bool, double>{true, acc / n};
    };

    auto [ok, val] = integrate(0.0);
    if (!ok) std::tie(ok, val) = integrate(0.5);
    if (!ok) throw NumericError("jensen_limit: integrand vanished on the probe circle");
    return val;
}

bool density_ratio_trend(const DistributionCurve& curve, int blocks) {
    std::vector<double> ratio, rv;
    if (curve.has_density()) {
        for (Index i = 0; i < curve.r.size(); ++i) {
            if (curve.dF[i] > 0.0 && curve.F[i] > 0.0) {
                ratio.push_back(curve.F[i] / curve.dF[i]);
                rv.push_back(curve.r[i]);
            }
        }
    } else {
        for (Index i = 1; i + 1 < curve.r.size(); ++i) {
            double d = (curve.F[i + 1] - curve.F[i - 1]) / (curve.r[i + 1] - curve.r[i - 1]);
            if (d > 0.0 && curve.F[i] > 0.0) {
                ratio.push_back(curve.F[i] / d);
                rv.push_back(curve.r[i]);
            }
        }
    }
    if (static_cast<int>(ratio.size()) < 2 * blocks) return false;
    std::vector<double> med(blocks);
    const std::size_t per = ratio.size() / blocks;
    for (int bidx = 0; bidx < blocks; ++bidx) {
        auto lo = ratio.begin() + bidx * per;
        auto hi = bidx + 1 == blocks ? ratio.end() : lo + per;
        std::vector<double> blk(lo, hi);
        std::nth_element(blk.begin(), blk.begin() + blk.size() / 2, blk.end());
        med[bidx] = blk[blk.size() / 2];
    }
    for (int bidx = 0; bidx + 1 < blocks; ++bidx)
        if (!(med[bidx] < med[bidx + 1])) return false;
    return true;
}

double chi1_cdf(double lambda, double x) {
    if (x <= 0.0) return 0.0;
    return std::erf(std::sqrt(x / (2.0 * lambda)));
}

double chi1_density(double lambda, double x) {
    if (x <= 0.0) return 0.0;
    return std::exp(-x / (2.0 * lambda)) / std::sqrt(2.0 * pi * lambda * x);
}

}  // namespace klx
