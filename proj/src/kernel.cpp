#include "klx/kernel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "klx/quadrature.hpp"

namespace klx {

std::string process_tag(Process p) {
    switch (p) {
        case Process::Wiener: return "wiener";
        case Process::Bridge: return "bridge";
        case Process::IntegratedWiener: return "iwiener";
        case Process::IntegratedCenteredWiener: return "icwiener";
        case Process::Slepian: return "slepian";
        case Process::Custom: return "custom";
    }
    return "?";
}

Process process_from_tag(const std::string& tag) {
    if (tag == "wiener") return Process::Wiener;
    if (tag == "bridge") return Process::Bridge;
    if (tag == "iwiener") return Process::IntegratedWiener;
    if (tag == "icwiener") return Process::IntegratedCenteredWiener;
    if (tag == "slepian") return Process::Slepian;
    if (tag == "custom") return Process::Custom;
    throw ConfigError("unknown process tag: " + tag);
}

namespace {

// Integrated Wiener, t <= s branch: s t^2/2 - t^3/6.
double iwiener_lo(double t, double s) { return t * t * s / 2.0 - t * t * t / 6.0; }

// Integrated centered Wiener, t <= s branch.
double icwiener_lo(double t, double s) {
    return (t * t * t * (s - 1.0) + t * s * (s - 1.0) * (s - 2.0)) / 6.0;
}

}  // namespace

double Kernel::base_eval(double t, double s) const {
    switch (id_) {
        case Process::Wiener:
            return std::min(t, s);
        case Process::Bridge:
            return std::min(t, s) - t * s;
        case Process::IntegratedWiener:
            return t <= s ? iwiener_lo(t, s) : iwiener_lo(s, t);
        case Process::IntegratedCenteredWiener:
            return t <= s ? icwiener_lo(t, s) : icwiener_lo(s, t);
        case Process::Slepian:
            return slepian_c_ - std::abs(t - s);
        case Process::Custom: {
            if (!table_) throw ConfigError("custom kernel has no evaluator");
            const Matrix& g = *table_;
            const Index n = g.rows();
            const double h = 1.0 / static_cast<double>(n - 1);
            auto cell = [&](double x, Index& i, double& f) {
                double u = std::clamp(x, 0.0, 1.0) / h;
                i = std::min<Index>(static_cast<Index>(u), n - 2);
                f = u - static_cast<double>(i);
            };
            Index i, j;
            double ft, fs;
            cell(t, i, ft);
            cell(s, j, fs);
            return (1 - ft) * (1 - fs) * g(i, j) + ft * (1 - fs) * g(i + 1, j) +
                   (1 - ft) * fs * g(i, j + 1) + ft * fs * g(i + 1, j + 1);
        }
    }
    throw NumericError("kernel eval: bad id");
}

double Kernel::eval(double t, double s) const {
    double v = base_eval(t, s);
    for (const auto& u : updates_) v += u.Q * u.psi(t) * u.psi(s);
    return v;
}

double Kernel::partial_s(double t, double s, Side side) const {
    if (!updates_.empty())
        throw UnsupportedError("partial_s: not available for rank-one-updated kernels");
    bool lo;  // evaluate on the s < t branch?
    if (s < t) lo = true;
    else if (s > t) lo = false;
    else if (side == Side::Left) lo = true;
    else if (side == Side::Right) lo = false;
    else
        throw PreconditionError("partial_s at the diagonal requires an explicit one-sided limit");
    switch (id_) {
        case Process::Wiener: return lo ? 1.0 : 0.0;
        case Process::Bridge: return (lo ? 1.0 : 0.0) - t;
        case Process::IntegratedWiener:
            return lo ? s * t - s * s / 2.0 : t * t / 2.0;
        case Process::IntegratedCenteredWiener:
            if (lo) return (3.0 * s * s * (t - 1.0) + t * (t - 1.0) * (t - 2.0)) / 6.0;
            return (t * t * t + t * (3.0 * s * s - 6.0 * s + 2.0)) / 6.0;
        case Process::Slepian: return lo ? 1.0 : -1.0;
        case Process::Custom:
            throw UnsupportedError("partial_s: custom grid kernels are not differentiable");
    }
    throw NumericError("partial_s: bad id");
}

double Kernel::partial_st(double t, double s, Side side) const {
    if (!updates_.empty())
        throw UnsupportedError("partial_st: not available for rank-one-updated kernels");
    bool lo;
    if (s < t) lo = true;
    else if (s > t) lo = false;
    else if (side == Side::Left) lo = true;
    else if (side == Side::Right) lo = false;
    else
        throw PreconditionError("partial_st at the diagonal requires an explicit one-sided limit");
    switch (id_) {
        case Process::Wiener: return 0.0;
        case Process::Bridge: return -1.0;
        case Process::IntegratedWiener: return lo ? s : t;
        case Process::IntegratedCenteredWiener:
            return lo ? (3.0 * s * s + 3.0 * t * t - 6.0 * t + 2.0) / 6.0
                      : (3.0 * t * t + 3.0 * s * s - 6.0 * s + 2.0) / 6.0;
        case Process::Slepian: return 0.0;
        case Process::Custom:
            throw UnsupportedError("partial_st: custom grid kernels are not differentiable");
    }
    throw NumericError("partial_st: bad id");
}

Matrix Kernel::gram(ConstRefVec nodes) const {
    const Index n = nodes.size();
    Matrix g(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j <= i; ++j) {
            double v = base_eval(nodes[i], nodes[j]);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    for (const auto& u : updates_) {
        Vector p(n);
        for (Index i = 0; i < n; ++i) p[i] = u.psi(nodes[i]);
        g.noalias() += u.Q * p * p.transpose();
    }
    return g;
}

std::vector<double> Kernel::breakpoints() const {
    std::vector<double> bp;
    if (id_ == Process::Custom && table_) {
        const Index n = table_->rows();
        for (Index i = 1; i + 1 < n; ++i) bp.push_back(static_cast<double>(i) / (n - 1));
    }
    return bp;
}

Kernel Kernel::with_update(double Q, std::function<double(double)> psi) const {
    Kernel k = *this;
    k.updates_.push_back({Q, std::move(psi)});
    return k;
}

Kernel Kernel::base_only() const {
    Kernel k = *this;
    k.updates_.clear();
    return k;
}

Kernel make_kernel(Process p, double slepian_c) {
    Kernel k;
    k.id_ = p;
    switch (p) {
        case Process::Wiener:
        case Process::Bridge:
            k.ell_ = 1;
            break;
        case Process::IntegratedWiener:
        case Process::IntegratedCenteredWiener:
            k.ell_ = 2;
            break;
        default:
            k.ell_ = 0;
            break;
    }
    if (p == Process::Slepian) {
        if (!(slepian_c > 0.0)) throw ConfigError("slepian length must be positive");
        k.slepian_c_ = slepian_c;
    }
    if (p == Process::Custom)
        throw ConfigError("custom kernels require a grid table (kernel_from_table/csv)");
    return k;
}

Kernel kernel_from_table(const Matrix& values) {
    if (values.rows() < 2 || values.rows() != values.cols())
        throw ConfigError("custom kernel table must be square, n >= 2");
    double asym = (values - values.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * (1.0 + values.cwiseAbs().maxCoeff()))
        throw ConfigError("custom kernel table is not symmetric");
    Kernel k;
    k.id_ = Process::Custom;
    k.ell_ = 0;
    k.table_ = std::make_shared<const Matrix>(values);
    return k;
}

Kernel kernel_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open kernel file: " + path);
    std::vector<double> vals;
    std::string tok;
    while (in) {
        int c = in.peek();
        if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t') {
            in.get();
            continue;
        }
        if (!(in >> tok)) break;
        std::size_t pos = 0;
        while (pos < tok.size()) {
            std::size_t next = tok.find(',', pos);
            std::string piece = tok.substr(pos, next == std::string::npos ? next : next - pos);
            if (!piece.empty()) {
                try {
                    vals.push_back(std::stod(piece));
                } catch (const std::exception&) {
                    throw ConfigError("bad number in kernel file: " + piece);
                }
            }
            if (next == std::string::npos) break;
            pos = next + 1;
        }
    }
    if (vals.empty()) throw ConfigError("empty kernel file: " + path);
    const int n = static_cast<int>(std::llround(vals[0]));
    if (n < 2 || static_cast<std::size_t>(n) * n + 1 != vals.size())
        throw ConfigError("kernel file must hold a header n and n*n values");
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = vals[1 + static_cast<std::size_t>(i) * n + j];
    return kernel_from_table(g);
}

bool has_closed_form_spectrum(Process p) {
    return p == Process::Wiener || p == Process::Bridge ||
           p == Process::IntegratedCenteredWiener;
}

BaseSpectrumFormula base_spectrum_formula(Process p) {
    BaseSpectrumFormula f;
    switch (p) {
        case Process::Wiener:
            f.lambda = [](int k) { double w = (k - 0.5) * pi; return 1.0 / (w * w); };
            f.u = [](int k, double t) { return std::sqrt(2.0) * std::sin((k - 0.5) * pi * t); };
            return f;
        case Process::Bridge:
            f.lambda = [](int k) { double w = k * pi; return 1.0 / (w * w); };
            f.u = [](int k, double t) { return std::sqrt(2.0) * std::sin(k * pi * t); };
            return f;
        case Process::IntegratedCenteredWiener:
            // Green function of the squared bridge operator: same eigenfunctions,
            // squared inverse eigenvalues.
            f.lambda = [](int k) { double w = k * pi; return 1.0 / (w * w * w * w); };
            f.u = [](int k, double t) { return std::sqrt(2.0) * std::sin(k * pi * t); };
            return f;
        default:
            throw UnsupportedError("no closed-form spectrum for process '" + process_tag(p) +
                                   "'; use the nystrom oracle");
    }
}

double kernel_trace(const Kernel& k) {
    Grid g = composite_gauss_legendre(512);
    double s = 0.0;
    for (Index i = 0; i < g.size(); ++i) s += g.weights[i] * k.eval(g.nodes[i], g.nodes[i]);
    return s;
}

}  // namespace klx
