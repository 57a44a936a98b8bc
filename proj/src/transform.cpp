#include "klx/transform.hpp"

#include <cmath>

#include "klx/normal.hpp"
#include "klx/quadrature.hpp"

namespace klx {

namespace {

Side atom_side(double t0) { return t0 > 0.5 ? Side::Left : Side::Right; }

}  // namespace

struct Transform::Impl {
    Kernel kernel;       // full kernel, updates included
    Kernel base;         // updates stripped; quadrature runs on this one
    Weight weight;
    double alpha = 0.0;
    double q = 0.0;
    double Q = 0.0;
    double one_minus_qalpha_sq = 1.0;
    bool critical = false;
    double phi_l2 = std::numeric_limits<double>::quiet_NaN();
    Grid grid;
    Vector psi_values;
    QuadConfig cfg;
    // per rank-one update of the input kernel: Q_u <phi, psi_u>, evaluator
    std::vector<std::pair<double, std::function<double(double)>>> update_terms;

    double psi_at(double t) const {
        double v = 0.0;
        for (const auto& [coeff, fn] : update_terms) v += coeff * fn(t);
        if (weight.has_function_part()) {
            if (weight.is_normal_quantile()) {
                // int_0^1 G(t,s) phi(s) ds = int G(t, Phi(x)) dx after t = Phi(x).
                std::vector<double> bp;
                if (t > normal_cdf(-cfg.x_max) && t < normal_cdf(cfg.x_max))
                    bp.push_back(normal_quantile(t));
                Grid g = split_rule(-cfg.x_max, cfg.x_max, bp, cfg.psi_panels);
                for (Index i = 0; i < g.size(); ++i)
                    v += g.weights[i] * base.eval(t, normal_cdf(g.nodes[i]));
            } else {
                std::vector<double> bp = base.breakpoints();
                for (double b : weight.function_breakpoints()) bp.push_back(b);
                bp.push_back(t);
                Grid g = split_rule(0.0, 1.0, bp, cfg.psi_panels);
                for (Index i = 0; i < g.size(); ++i)
                    v += g.weights[i] * base.eval(t, g.nodes[i]) * weight.fn_value(g.nodes[i]);
            }
        }
        for (const auto& a : weight.atoms()) {
            if (a.kind == WeightAtom::Kind::PointMass) {
                v += a.coeff * base.eval(t, a.t0);
            } else {
                v -= a.coeff * base.partial_s(t, a.t0, atom_side(a.t0));
            }
        }
        return v;
    }

    double psi_prime_at(double t, Side side) const {
        if (!update_terms.empty())
            throw UnsupportedError("psi derivative is not available over rank-one updates");
        double v = 0.0;
        if (weight.has_function_part()) {
            if (weight.is_normal_quantile()) {
                std::vector<double> bp;
                if (t > normal_cdf(-cfg.x_max) && t < normal_cdf(cfg.x_max))
                    bp.push_back(normal_quantile(t));
                Grid g = split_rule(-cfg.x_max, cfg.x_max, bp, cfg.psi_panels);
                for (Index i = 0; i < g.size(); ++i)
                    v += g.weights[i] * base.partial_s(normal_cdf(g.nodes[i]), t, side);
            } else {
                std::vector<double> bp = kernel.breakpoints();
                for (double b : weight.function_breakpoints()) bp.push_back(b);
                bp.push_back(t);
                Grid g = split_rule(0.0, 1.0, bp, cfg.psi_panels);
                // dG/dt(t,s) = dG/ds(s,t) by symmetry.
                for (Index i = 0; i < g.size(); ++i)
                    v += g.weights[i] * base.partial_s(g.nodes[i], t, side) *
                         weight.fn_value(g.nodes[i]);
            }
        }
        for (const auto& a : weight.atoms()) {
            Side st = t == a.t0 ? (side == Side::Auto ? atom_side(a.t0) : side) : Side::Auto;
            if (a.kind == WeightAtom::Kind::PointMass) {
                v += a.coeff * base.partial_s(a.t0, t, st);
            } else {
                v -= a.coeff * base.partial_st(t, a.t0, st);
            }
        }
        return v;
    }
};

const Kernel& Transform::kernel() const { return impl_->kernel; }
const Weight& Transform::weight() const { return impl_->weight; }
double Transform::alpha() const { return impl_->alpha; }
double Transform::q() const { return impl_->q; }
double Transform::Q() const { return impl_->Q; }
bool Transform::critical() const { return impl_->critical; }
double Transform::one_minus_qalpha_sq() const { return impl_->one_minus_qalpha_sq; }
double Transform::phi_l2_norm() const { return impl_->phi_l2; }
const Grid& Transform::grid() const { return impl_->grid; }
const Vector& Transform::psi_values() const { return impl_->psi_values; }
double Transform::psi(double t) const { return impl_->psi_at(t); }
double Transform::psi_prime(double t, Side side) const { return impl_->psi_prime_at(t, side); }
const QuadConfig& Transform::quad() const { return impl_->cfg; }

Transform make_transform(const Kernel& kernel, const Weight& weight, double alpha,
                         const QuadConfig& cfg) {
    auto impl = std::make_shared<Transform::Impl>();
    impl->kernel = kernel;
    impl->base = kernel.base_only();
    impl->weight = weight;
    impl->alpha = alpha;
    impl->cfg = cfg;
    impl->grid = composite_gauss_legendre(cfg.n_nodes);

    // rank-one updates integrate against phi in closed form:
    // int (Q psi_u(x) psi_u(y)) phi(y) dy = Q <phi, psi_u> psi_u(x)
    for (const auto& u : kernel.updates()) {
        double cu = weight_dot(weight, u.psi, nullptr, cfg);
        impl->update_terms.emplace_back(u.Q * cu, u.psi);
    }

    impl->psi_values = Vector(impl->grid.size());
    for (Index i = 0; i < impl->grid.size(); ++i)
        impl->psi_values[i] = impl->psi_at(impl->grid.nodes[i]);

    double scale = 0.0;
    for (Index i = 0; i < impl->grid.size(); ++i)
        scale = std::max(scale, std::abs(kernel.eval(impl->grid.nodes[i], impl->grid.nodes[i])));
    if (impl->psi_values.cwiseAbs().maxCoeff() <= 1e-12 * std::max(scale, 1e-30))
        throw PreconditionError("degenerate transform: psi is identically zero");

    // q = <phi, psi>.
    double q = 0.0;
    if (weight.has_function_part()) {
        if (weight.is_normal_quantile()) {
            Grid g = composite_gauss_legendre(cfg.normal_nodes, -cfg.x_max, cfg.x_max);
            for (Index i = 0; i < g.size(); ++i) q += g.weights[i] * impl->psi_at(normal_cdf(g.nodes[i]));
        } else {
            for (Index i = 0; i < impl->grid.size(); ++i)
                q += impl->grid.weights[i] * weight.fn_value(impl->grid.nodes[i]) *
                     impl->psi_values[i];
        }
    }
    for (const auto& a : weight.atoms()) {
        if (a.kind == WeightAtom::Kind::PointMass) {
            q += a.coeff * impl->psi_at(a.t0);
        } else {
            q -= a.coeff * impl->psi_prime_at(a.t0, atom_side(a.t0));
        }
    }
    if (!std::isfinite(q)) throw NumericError("transform: q quadrature did not converge");
    if (q <= 1e-14 * std::max(scale, 1e-30))
        throw PreconditionError("degenerate transform: q is not positive");

    impl->q = q;
    impl->Q = q * alpha * alpha - 2.0 * alpha;
    double r = 1.0 - q * alpha;
    impl->one_minus_qalpha_sq = r * r;
    impl->critical = std::abs(alpha * q - 1.0) < 1e-12;

    if (weight.square_integrable() && weight.has_function_part()) {
        double n2 = 0.0;
        for (Index i = 0; i < impl->grid.size(); ++i) {
            double f = weight.fn_value(impl->grid.nodes[i]);
            n2 += impl->grid.weights[i] * f * f;
        }
        impl->phi_l2 = std::sqrt(n2);
    }

    Transform tr;
    tr.impl_ = std::move(impl);
    return tr;
}

Kernel transformed_kernel(const Transform& tr) {
    auto impl = tr.impl_;
    return impl->kernel.with_update(impl->Q, [impl](double t) { return impl->psi_at(t); });
}

double compute_q_double_route(const Kernel& kernel, const Weight& weight, const QuadConfig& cfg) {
    // Independent route for q as the double integral: outer quadrature over phi, inner split
    // integration of G(t, .) phi at a different resolution than psi uses.
    QuadConfig inner_cfg = cfg;
    inner_cfg.psi_panels = cfg.psi_panels / 2 + 7;
    auto impl = std::make_shared<Transform::Impl>();
    impl->kernel = kernel;
    impl->base = kernel.base_only();
    impl->weight = weight;
    impl->cfg = inner_cfg;
    for (const auto& u : kernel.updates()) {
        double cu = weight_dot(weight, u.psi, nullptr, cfg);
        impl->update_terms.emplace_back(u.Q * cu, u.psi);
    }

    double q = 0.0;
    if (weight.has_function_part()) {
        if (weight.is_normal_quantile()) {
            Grid outer = composite_gauss_legendre(cfg.normal_nodes / 2 + 32, -cfg.x_max, cfg.x_max);
            for (Index i = 0; i < outer.size(); ++i)
                q += outer.weights[i] * impl->psi_at(normal_cdf(outer.nodes[i]));
        } else {
            Grid outer = composite_gauss_legendre(cfg.n_nodes / 2 + 8);
            for (Index i = 0; i < outer.size(); ++i)
                q += outer.weights[i] * weight.fn_value(outer.nodes[i]) * impl->psi_at(outer.nodes[i]);
        }
    }
    for (const auto& a : weight.atoms()) {
        if (a.kind == WeightAtom::Kind::PointMass) {
            q += a.coeff * impl->psi_at(a.t0);
        } else {
            q -= a.coeff * impl->psi_prime_at(a.t0, atom_side(a.t0));
        }
    }
    return q;
}

double weight_dot(const Weight& w, const std::function<double(double)>& f,
                  const std::function<double(double)>& fprime, const QuadConfig& cfg) {
    double v = 0.0;
    if (w.has_function_part()) {
        if (w.is_normal_quantile()) {
            Grid g = composite_gauss_legendre(cfg.normal_nodes, -cfg.x_max, cfg.x_max);
            for (Index i = 0; i < g.size(); ++i) v += g.weights[i] * f(normal_cdf(g.nodes[i]));
        } else {
            Grid g = split_rule(0.0, 1.0, w.function_breakpoints(), cfg.psi_panels);
            for (Index i = 0; i < g.size(); ++i)
                v += g.weights[i] * w.fn_value(g.nodes[i]) * f(g.nodes[i]);
        }
    }
    for (const auto& a : w.atoms()) {
        if (a.kind == WeightAtom::Kind::PointMass) {
            v += a.coeff * f(a.t0);
        } else if (fprime) {
            v -= a.coeff * fprime(a.t0);
        } else {
            // one-sided second-order difference from inside [0,1]
            double h = 1e-5;
            double d;
            if (a.t0 > 0.5)
                d = (3.0 * f(a.t0) - 4.0 * f(a.t0 - h) + f(a.t0 - 2.0 * h)) / (2.0 * h);
            else
                d = (-3.0 * f(a.t0) + 4.0 * f(a.t0 + h) - f(a.t0 + 2.0 * h)) / (2.0 * h);
            v -= a.coeff * d;
        }
    }
    return v;
}

TwoParamTransform make_two_param(const Kernel& kernel, const Weight& w1, double alpha1,
                                 const Weight& w2, double alpha2, const QuadConfig& cfg) {
    TwoParamTransform tp;
    tp.t1_ = make_transform(kernel, w1, alpha1, cfg);
    tp.t2_ = make_transform(kernel, w2, alpha2, cfg);
    const Transform& t1 = tp.t1_;
    tp.cross_ = weight_dot(w2, [&t1](double t) { return t1.psi(t); },
                           [&t1](double t) { return t1.psi_prime(t); }, cfg);
    double scale = 1.0 + std::sqrt(tp.t1_.q() * tp.t2_.q());
    if (std::abs(tp.cross_) > 1e-8 * scale)
        throw PreconditionError("two-parameter transform: weights are not G-orthogonal");
    return tp;
}

Kernel two_param_kernel(const TwoParamTransform& tp) {
    Kernel k = transformed_kernel(tp.first());
    const Transform t2 = tp.second();
    return k.with_update(t2.Q(), [t2](double t) { return t2.psi(t); });
}

}  // namespace klx
