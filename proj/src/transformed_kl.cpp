#include "klx/transformed_kl.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "klx/normal.hpp"
#include "klx/quadrature.hpp"

namespace klx {

namespace {

bool poly_is(const Weight& w, std::initializer_list<double> coeffs) {
    if (!w.poly_coeffs()) return false;
    const auto& c = *w.poly_coeffs();
    if (c.size() != coeffs.size()) return false;
    std::size_t i = 0;
    for (double v : coeffs)
        if (c[i++] != v) return false;
    return true;
}

// cosh(tau(1-2t)) / cosh(tau), evaluated through exponential differences.
double cosh_ratio(double tau, double t) {
    double a = std::abs(tau * (1.0 - 2.0 * t));
    return std::exp(a - tau) * (1.0 + std::exp(-2.0 * a)) / (1.0 + std::exp(-2.0 * tau));
}

struct Family {
    double lambda;
    int branch;
    double x;
    std::function<double(double)> fn;  // unnormalized eigenfunction
};

void fix_sign_and_store(Spectrum& sp, std::vector<Family>& fams) {
    std::stable_sort(fams.begin(), fams.end(),
                     [](const Family& a, const Family& b) { return a.lambda > b.lambda; });
    const Index n = sp.grid.size();
    const Index m = static_cast<Index>(fams.size());
    sp.eigenvalues.resize(m);
    sp.eigenfunctions.resize(n, m);
    auto fns = std::make_shared<std::vector<std::function<double(double)>>>();
    for (Index k = 0; k < m; ++k) {
        sp.eigenvalues[k] = fams[k].lambda;
        Vector v(n);
        for (Index i = 0; i < n; ++i) v[i] = fams[k].fn(sp.grid.nodes[i]);
        double nrm = sp.grid.norm(v);
        if (!(nrm > 0.0)) throw NumericError("transformed_kl: zero eigenfunction sample");
        double sgn = 1.0;
        double peak = v.cwiseAbs().maxCoeff();
        for (Index i = 0; i < n; ++i) {
            if (std::abs(v[i]) > 1e-8 * peak) {
                sgn = v[i] > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
        double scale = sgn / nrm;
        sp.eigenfunctions.col(k) = v * scale;
        auto f = fams[k].fn;
        fns->push_back([f, scale](double t) { return scale * f(t); });
        sp.entries.push_back({fams[k].lambda, fams[k].branch, fams[k].x, 1});
    }
    sp.eval = [fns](int k, double t) { return (*fns)[k](t); };
}

// Eigenfunctions in cos(.)-premultiplied form, regular across tan poles.
std::function<double(double)> efn_wiener(double w) {
    double cw = std::cos(w), sw = std::sin(w);
    return [w, cw, sw](double t) {
        return cw * (std::cos(w * t) - 1.0) + sw * std::sin(w * t);
    };
}

std::function<double(double)> efn_bridge(double tau) {
    double c = std::cos(tau), s = std::sin(tau);
    return [tau, c, s](double t) {
        return c * (std::cos(2.0 * tau * t) - 1.0) + s * std::sin(2.0 * tau * t);
    };
}

std::function<double(double)> efn_bridge_parabola(double tau) {
    double c = std::cos(tau), s = std::sin(tau);
    return [tau, c, s](double t) {
        return c * (std::cos(2.0 * tau * t) - 1.0 + 2.0 * tau * tau * (t * t - t)) +
               s * std::sin(2.0 * tau * t);
    };
}

std::function<double(double)> efn_icwiener(double tau) {
    double c = std::cos(tau), s = std::sin(tau);
    return [tau, c, s](double t) {
        return c * (std::cos(2.0 * tau * t) - 2.0) + s * std::sin(2.0 * tau * t) +
               c * cosh_ratio(tau, t);
    };
}

// Quantile example: u = c0*eta + c1*cos(w t) + c2*sin(w t) with eta the particular
// solution built from the weight; coefficients from the null space of the
// boundary system.
struct QuantileEfn {
    double w, c0, c1, c2, x_max;

    double eta(double t) const {
        // (1/w) int_{1/2}^t sin(w(tau - t)) phi(tau) dtau, tau = Phi(y).
        double y1 = 0.0;
        if (t <= 0.0) y1 = -x_max;
        else if (t >= 1.0) y1 = x_max;
        else y1 = std::clamp(normal_quantile(t), -x_max, x_max);
        if (y1 == 0.0) return 0.0;
        Grid g = composite_gauss_legendre(64, std::min(0.0, y1), std::max(0.0, y1));
        double sgn = y1 > 0.0 ? 1.0 : -1.0;
        double acc = 0.0;
        for (Index i = 0; i < g.size(); ++i)
            acc += g.weights[i] * std::sin(w * (normal_cdf(g.nodes[i]) - t));
        return sgn * acc / w;
    }

    double operator()(double t) const {
        return c0 * eta(t) + c1 * std::cos(w * t) + c2 * std::sin(w * t);
    }
};

std::function<double(double)> efn_quantile(double w, double Q, const QuantileContext& ctx,
                                      const Transform& tr) {
    QuantileEfn e{w, 1.0, 0.0, 0.0, 8.0};
    // <eta, psi> and eta at the boundary, psi = phi(Phi^{-1}).
    Grid g = composite_gauss_legendre(512);
    double eta_psi = 0.0;
    for (Index i = 0; i < g.size(); ++i)
        eta_psi += g.weights[i] * e.eta(g.nodes[i]) * tr.psi(g.nodes[i]);
    double a = ctx.A(w), c = ctx.C(w);
    Matrix m(3, 3);
    m << e.eta(0.0), 1.0, 0.0,
         e.eta(1.0), std::cos(w), std::sin(w),
         1.0 / (w * w * Q) - eta_psi, -c / w, a / w;
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    Vector null = svd.matrixV().col(2);
    e.c0 = null[0];
    e.c1 = null[1];
    e.c2 = null[2];
    return [e](double t) { return e(t); };
}

}  // namespace

std::optional<EquationId> match_catalog(const Transform& tr) {
    const Process p = tr.kernel().id();
    const Weight& w = tr.weight();
    if (!tr.kernel().updates().empty() || !w.atoms().empty()) return std::nullopt;
    if (w.is_normal_quantile()) {
        if (p == Process::Bridge) return EquationId::BridgeQuantile;
        return std::nullopt;
    }
    bool one = poly_is(w, {1.0});
    bool tt = poly_is(w, {0.0, 1.0, -1.0});
    if (p == Process::Wiener && one) return EquationId::WienerOne;
    if (p == Process::Bridge && one) return EquationId::BridgeOne;
    if (p == Process::Bridge && tt) return EquationId::BridgeParabola;
    if (p == Process::IntegratedCenteredWiener && one) return EquationId::IcwienerOne;
    return std::nullopt;
}

Spectrum transformed_kl(const Transform& tr, int count, int grid_size) {
    if (count < 1) throw PreconditionError("transformed_kl: count must be >= 1");
    auto ex = match_catalog(tr);

    if (!ex) {
        Kernel k = transformed_kernel(tr);
        int gs = std::max(grid_size, 4 * count);
        Spectrum sp = nystrom_spectrum(k, gs, count);
        return sp;
    }

    // Q = 0 (alpha = 0 or alpha = 2/q): the transform is the identity in law.
    if (tr.Q() == 0.0 && has_closed_form_spectrum(tr.kernel().id()))
        return base_spectrum(tr.kernel().id(), count, grid_size);

    EigenEquationSpec spec = make_eigen_spec(*ex, tr.q(), tr.alpha());
    Spectrum sp;
    sp.provenance = Provenance::Analytic;
    sp.grid = composite_gauss_legendre(grid_size);
    sp.trace = kernel_trace(transformed_kernel(tr));
    std::vector<Family> fams;

    switch (*ex) {
        case EquationId::WienerOne: {
            RootSequence rs = solve_roots(spec, count);
            for (const auto& r : rs.merged) {
                for (int m = 0; m < r.multiplicity; ++m)
                    fams.push_back({1.0 / (r.x * r.x), 0, r.x, efn_wiener(r.x)});
            }
            break;
        }
        case EquationId::BridgeOne:
        case EquationId::BridgeParabola: {
            int per = count / 2 + 2;
            RootSequence rs = solve_roots(spec, per);
            for (double tau : rs.first_branch) {
                double w = 2.0 * tau;  // tau = k pi
                int k = static_cast<int>(std::llround(tau / pi));
                fams.push_back({1.0 / (w * w), 0, tau, [k](double t) {
                                    return std::sqrt(2.0) * std::sin(2.0 * pi * k * t);
                                }});
            }
            for (double tau : rs.second_branch) {
                double w = 2.0 * tau;
                fams.push_back({1.0 / (w * w), 1, tau,
                                *ex == EquationId::BridgeOne ? efn_bridge(tau) : efn_bridge_parabola(tau)});
            }
            break;
        }
        case EquationId::IcwienerOne: {
            int per = count / 2 + 2;
            RootSequence rs = solve_roots(spec, per);
            for (double tau : rs.first_branch) {
                double w = 2.0 * tau;
                int k = static_cast<int>(std::llround(tau / pi));
                fams.push_back({1.0 / (w * w * w * w), 0, tau, [k](double t) {
                                    return std::sqrt(2.0) * std::sin(2.0 * pi * k * t);
                                }});
            }
            for (double tau : rs.second_branch) {
                double w = 2.0 * tau;
                fams.push_back({1.0 / (w * w * w * w), 1, tau, efn_icwiener(tau)});
            }
            break;
        }
        case EquationId::BridgeQuantile: {
            int per = count / 2 + 2;
            RootSequence rs = solve_roots(spec, per);
            for (double w : rs.first_branch) {
                int k = static_cast<int>(std::llround(w / (2.0 * pi)));
                fams.push_back({1.0 / (w * w), 0, w, [k](double t) {
                                    return std::sqrt(2.0) * std::sin(2.0 * pi * k * t);
                                }});
            }
            for (double w : rs.second_branch)
                fams.push_back({1.0 / (w * w), 1, w, efn_quantile(w, tr.Q(), *spec.quantile, tr)});
            break;
        }
    }

    fix_sign_and_store(sp, fams);
    if (sp.count() > count) {
        sp.eigenvalues.conservativeResize(count);
        sp.eigenfunctions.conservativeResize(Eigen::NoChange, count);
        sp.entries.resize(count);
    }
    return sp;
}

}  // namespace klx
