#include "klx/eigenroots.hpp"

#include <cmath>
#include <sstream>

#include "klx/normal.hpp"
#include "klx/quadrature.hpp"

namespace klx {

double equation_q(EquationId ex) {
    switch (ex) {
        case EquationId::WienerOne: return 1.0 / 3.0;
        case EquationId::BridgeOne: return 1.0 / 12.0;
        case EquationId::BridgeParabola: return 17.0 / 5040.0;
        case EquationId::IcwienerOne: return 1.0 / 120.0;
        case EquationId::BridgeQuantile: return 1.0;
    }
    throw NumericError("equation_q: bad id");
}

EigenEquationSpec make_eigen_spec(EquationId ex, double Q) {
    EigenEquationSpec s{ex, Q, 1.0 + Q * equation_q(ex), nullptr};
    if (ex == EquationId::BridgeQuantile) s.quantile = make_quantile_context();
    return s;
}

EigenEquationSpec make_eigen_spec(EquationId ex, double q, double alpha) {
    double r = 1.0 - q * alpha;
    EigenEquationSpec s{ex, q * alpha * alpha - 2.0 * alpha, r * r, nullptr};
    if (ex == EquationId::BridgeQuantile) s.quantile = make_quantile_context();
    return s;
}

namespace {

bool has_first_branch(EquationId ex) { return ex != EquationId::WienerOne; }

// The tau-variable equations put the first branch on k*pi; the quantile
// equation's sine family sits on 2*k*pi in omega.
double lattice_step(EquationId ex) { return ex == EquationId::BridgeQuantile ? 2.0 * pi : pi; }

double residual_impl(const EigenEquationSpec& s, EqBranch branch, double x, double* scale) {
    const double Q = s.Q, f = s.qalpha_factor;
    if (branch == EqBranch::First) {
        if (!has_first_branch(s.example))
            throw PreconditionError("this example has a single eigenvalue equation");
        if (scale) *scale = 1.0;
        return std::sin(s.example == EquationId::BridgeQuantile ? x / 2.0 : x);
    }
    switch (s.example) {
        case EquationId::WienerOne: {
            double p = Q * x + f * x * x * x;
            if (scale) *scale = std::abs(Q) * (1.0 + x) + std::abs(f) * x * x * x + 1.0;
            return Q * std::sin(x) - std::cos(x) * p;
        }
        case EquationId::BridgeOne: {
            double p = Q * x + 4.0 * f * x * x * x;
            if (scale) *scale = std::abs(Q) * (1.0 + x) + 4.0 * std::abs(f) * x * x * x + 1.0;
            return Q * std::sin(x) - std::cos(x) * p;
        }
        case EquationId::BridgeParabola: {
            double x3 = x * x * x, x5 = x3 * x * x, x7 = x5 * x * x;
            double p = Q * x + Q * x3 / 3.0 + 2.0 * Q * x5 / 15.0 + 16.0 * f * x7;
            if (scale)
                *scale = std::abs(Q) * (1.0 + x + x3 / 3.0 + 2.0 * x5 / 15.0) +
                         16.0 * std::abs(f) * x7 + 1.0;
            return Q * std::sin(x) - std::cos(x) * p;
        }
        case EquationId::IcwienerOne: {
            double x5 = x * x * x * x * x;
            double p = 2.0 * Q * x + 32.0 * f * x5;
            if (scale)
                *scale = std::abs(Q) * (2.0 + 2.0 * x) + 32.0 * std::abs(f) * x5 + 1.0;
            return Q * (std::sin(x) + std::cos(x) * std::tanh(x)) - std::cos(x) * p;
        }
        case EquationId::BridgeQuantile: {
            if (!s.quantile) throw PreconditionError("quantile residual requires a quadrature context");
            if (Q == 0.0) {
                // Passing to the limit gives sin(omega) = 0.
                if (scale) *scale = 1.0;
                return std::sin(x);
            }
            double a = s.quantile->A(x), b = s.quantile->B(x), c = s.quantile->C(x);
            if (scale)
                *scale = std::abs(a) * (std::abs(c) + std::abs(a)) / x +
                         std::abs(b) + 1.0 / (x * x * std::abs(Q)) + 1e-300;
            return -a * (std::sin(x) * c + a * std::cos(x)) / x +
                   (b - 1.0 / (x * x * Q)) * std::sin(x);
        }
    }
    throw NumericError("residual: bad example id");
}

}  // namespace

double eigen_equation_residual(const EigenEquationSpec& spec, EqBranch branch, double x) {
    if (!(x > 0.0)) throw PreconditionError("eigen equation residual: x must be positive");
    return residual_impl(spec, branch, x, nullptr);
}

double scaled_residual(const EigenEquationSpec& spec, EqBranch branch, double x) {
    double scale = 1.0;
    double r = residual_impl(spec, branch, x, &scale);
    return r / scale;
}

double bridge_double_root_Q(int k) {
    if (k < 1) throw PreconditionError("bridge_double_root_Q: k must be >= 1");
    double kp = k * pi;
    return -12.0 / (1.0 + 3.0 / (kp * kp));
}

namespace {

// Bisection to absolute width tol, then one secant polish.
double refine_root(const EigenEquationSpec& s, EqBranch br, double a, double b) {
    double fa = residual_impl(s, br, a, nullptr);
    double fb = residual_impl(s, br, b, nullptr);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    const double tol = 1e-13 * std::max(1.0, b);
    while (b - a > tol) {
        double m = 0.5 * (a + b);
        double fm = residual_impl(s, br, m, nullptr);
        if (fm == 0.0) return m;
        if ((fa < 0.0) != (fm < 0.0)) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    double x = (fa * b - fb * a) / (fa - fb);
    return (x > a && x < b) ? x : 0.5 * (a + b);
}

std::vector<double> scan_branch(const EigenEquationSpec& s, EqBranch br, int count) {
    // Q -> 0 limits where the second equation degenerates to the trig lattice.
    if (br == EqBranch::Second && s.Q == 0.0 && s.example == EquationId::BridgeQuantile) {
        std::vector<double> out;
        for (int k = 1; k <= count; ++k) out.push_back((2 * k - 1) * pi);
        return out;
    }

    const double W = lattice_step(s.example);
    // The quantile determinant vanishes on the 2k*pi lattice as well (the sine
    // family); those belong to the first branch and are filtered here.
    auto accept = [&s](double x) {
        if (s.example != EquationId::BridgeQuantile) return true;
        double r = x / (2.0 * pi);
        return std::abs(r - std::round(r)) * 2.0 * pi > 1e-6 * std::max(1.0, x);
    };
    const int cells = 240;
    std::vector<double> roots;
    const int max_windows = 8 * count + 64;
    for (int m = 0; m < max_windows && static_cast<int>(roots.size()) < count; ++m) {
        const double lo = m * W, hi = (m + 1) * W;
        const double eps = 1e-9 * std::max(1.0, hi);
        // x = 0 is a trivial zero of every residual, not an eigenvalue root
        double xa = std::max(lo + eps, 1e-6);
        double fa = residual_impl(s, br, xa, nullptr);
        for (int c = 1; c <= cells; ++c) {
            double xb = lo + (hi - lo) * c / cells;
            if (c == cells) xb = hi - eps;
            double fb = residual_impl(s, br, xb, nullptr);
            if (fa == 0.0) {
                if (accept(xa)) roots.push_back(xa);
            } else if ((fa < 0.0) != (fb < 0.0)) {
                double r = refine_root(s, br, xa, xb);
                if (accept(r)) roots.push_back(r);
            }
            xa = xb;
            fa = fb;
        }
        // Lattice endpoint: coincident cross-branch roots sit exactly here,
        // just outside the scanned open window.
        double xl = hi;
        double sc = 1.0;
        double fl = residual_impl(s, br, xl, &sc);
        if (std::abs(fl) / sc < 1e-11) {
            if (accept(xl)) roots.push_back(xl);
        } else {
            double d = 2e-9 * std::max(1.0, xl);
            double f1 = residual_impl(s, br, xl - d, nullptr);
            double f2 = residual_impl(s, br, xl + d, nullptr);
            if ((f1 < 0.0) != (f2 < 0.0)) {
                double r = refine_root(s, br, xl - d, xl + d);
                if (accept(r)) roots.push_back(r);
            }
        }
        // dedupe within the window pass
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end(),
                                [](double a, double b) {
                                    return b - a < 1e-9 * std::max(1.0, b);
                                }),
                    roots.end());
    }
    if (static_cast<int>(roots.size()) < count) {
        std::ostringstream os;
        os << "root search exhausted " << max_windows << " windows with only " << roots.size()
           << " of " << count << " roots (example "
           << static_cast<int>(s.example) + 1 << ", Q=" << s.Q << ")";
        throw NumericError(os.str());
    }
    roots.resize(count);
    return roots;
}

}  // namespace

RootSequence solve_roots(const EigenEquationSpec& spec, int count) {
    if (count < 1) throw PreconditionError("solve_roots: count must be >= 1");
    RootSequence rs;
    if (has_first_branch(spec.example)) {
        const double W = lattice_step(spec.example);
        for (int k = 1; k <= count; ++k) rs.first_branch.push_back(k * W);
    }
    rs.second_branch = scan_branch(spec, EqBranch::Second, count);

    std::size_t i = 0, j = 0;
    while (i < rs.first_branch.size() || j < rs.second_branch.size()) {
        bool take_first;
        if (i >= rs.first_branch.size()) take_first = false;
        else if (j >= rs.second_branch.size()) take_first = true;
        else take_first = rs.first_branch[i] <= rs.second_branch[j];

        double x = take_first ? rs.first_branch[i] : rs.second_branch[j];
        int branch = take_first ? 0 : 1;
        int mult = 1;
        if (i < rs.first_branch.size() && j < rs.second_branch.size() &&
            std::abs(rs.first_branch[i] - rs.second_branch[j]) <
                1e-9 * std::max(1.0, rs.first_branch[i])) {
            x = rs.first_branch[i];
            branch = 0;
            mult = 2;
            ++i;
            ++j;
        } else if (take_first) {
            ++i;
        } else {
            ++j;
        }
        double res = std::abs(scaled_residual(spec, branch == 0 && has_first_branch(spec.example)
                                                  ? EqBranch::First
                                                  : EqBranch::Second,
                                              x));
        if (mult == 2)
            res = std::max(res, std::abs(scaled_residual(spec, EqBranch::Second, x)));
        rs.merged.push_back({x, branch, mult, res});
    }
    return rs;
}

// --- Example 5 -------------------------------------------------------------

double QuantileContext::A(double omega) const {
    double s = 0.0;
    for (Index i = 0; i < x.size(); ++i) s += pw[i] * x[i] * std::cos(omega * t[i]);
    return s;
}

double QuantileContext::C(double omega) const {
    double s = 0.0;
    for (Index i = 0; i < x.size(); ++i) s += pw[i] * x[i] * std::sin(omega * t[i]);
    return s;
}

double QuantileContext::B(double omega) const {
    double s = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        double inner = 0.0;
        const Vector& it = in_t[i];
        const Vector& iw = in_pw[i];
        const Vector& ix = in_x[i];
        for (Index j = 0; j < it.size(); ++j)
            inner += iw[j] * ix[j] * std::sin(omega * (it[j] - t[i]));
        s += pw[i] * x[i] * inner;
    }
    return s / omega;
}

double QuantileContext::determinant(double omega, double Q) const {
    double a = A(omega), b = B(omega), c = C(omega);
    return -a * (std::sin(omega) * c + a * std::cos(omega)) / omega +
           (b - 1.0 / (omega * omega * Q)) * std::sin(omega);
}

std::shared_ptr<const QuantileContext> make_quantile_context(int outer_nodes, int inner_nodes,
                                                   double x_max) {
    auto ctx = std::make_shared<QuantileContext>();
    Grid outer = composite_gauss_legendre(outer_nodes, -x_max, x_max);
    const Index n = outer.size();
    ctx->x.resize(n);
    ctx->t.resize(n);
    ctx->pw.resize(n);
    Grid ref = composite_gauss_legendre(inner_nodes, 0.0, 1.0);
    ctx->in_t.resize(n);
    ctx->in_pw.resize(n);
    ctx->in_x.resize(n);
    for (Index i = 0; i < n; ++i) {
        double xi = outer.nodes[i];
        ctx->x[i] = xi;
        ctx->t[i] = normal_cdf(xi);
        ctx->pw[i] = outer.weights[i] * normal_pdf(xi);
        const double len = xi + x_max;  // inner integral over [-x_max, xi]
        Vector it(ref.size()), iw(ref.size()), ix(ref.size());
        for (Index j = 0; j < ref.size(); ++j) {
            double y = -x_max + len * ref.nodes[j];
            ix[j] = y;
            it[j] = normal_cdf(y);
            iw[j] = len * ref.weights[j] * normal_pdf(y);
        }
        ctx->in_t[i] = std::move(it);
        ctx->in_pw[i] = std::move(iw);
        ctx->in_x[i] = std::move(ix);
    }
    return ctx;
}

}  // namespace klx
