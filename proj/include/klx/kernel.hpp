#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "klx/types.hpp"

namespace klx {

enum class Process { Wiener, Bridge, IntegratedWiener, IntegratedCenteredWiener, Slepian, Custom };

std::string process_tag(Process p);
Process process_from_tag(const std::string& tag);

// One-sided limit selector for derivatives at the diagonal.
enum class Side { Auto, Left, Right };

// A rank-one covariance update Q * psi(x) * psi(y).
struct RankOneUpdate {
    double Q;
    std::function<double(double)> psi;
};

// Symmetric covariance kernel on [0,1]^2: a catalog process, a tabulated
// custom kernel, or either of those plus rank-one updates.
class Kernel {
  public:
    Kernel() = default;

    Process id() const { return id_; }
    int operator_order() const { return ell_; }  // 0 when unknown
    double slepian_length() const { return slepian_c_; }
    const std::vector<RankOneUpdate>& updates() const { return updates_; }

    double eval(double t, double s) const;
    // dG/ds; off the diagonal, or with an explicit one-sided limit at s == t.
    double partial_s(double t, double s, Side side = Side::Auto) const;
    // d2G/dtds, one-sided at the diagonal.
    double partial_st(double t, double s, Side side = Side::Auto) const;

    // Gram matrix [G(nodes_i, nodes_j)]; updates are applied as outer products.
    Matrix gram(ConstRefVec nodes) const;

    // Interior kink locations of s -> G(t,s) other than s == t.
    std::vector<double> breakpoints() const;

    Kernel with_update(double Q, std::function<double(double)> psi) const;
    // copy with the rank-one updates stripped
    Kernel base_only() const;

    friend Kernel make_kernel(Process p, double slepian_c);
    friend Kernel kernel_from_table(const Matrix& values);

  private:
    double base_eval(double t, double s) const;

    Process id_ = Process::Wiener;
    int ell_ = 1;
    double slepian_c_ = 1.0;
    std::shared_ptr<const Matrix> table_;
    std::vector<RankOneUpdate> updates_;
};

Kernel make_kernel(Process p, double slepian_c = 1.0);
Kernel kernel_from_table(const Matrix& values);
// CSV grid file: header row "n", then n x n values row-major on the uniform
// grid i/(n-1), comma or whitespace separated.
Kernel kernel_from_csv(const std::string& path);

inline double kernel_eval(const Kernel& k, double t, double s) { return k.eval(t, s); }
inline double kernel_partial_s(const Kernel& k, double t, double s, Side side = Side::Auto) {
    return k.partial_s(t, s, side);
}

// Closed-form base spectra (Wiener, Brownian bridge, integrated centered
// Wiener); throws UnsupportedError otherwise.
struct BaseSpectrumFormula {
    std::function<double(int)> lambda;          // k >= 1
    std::function<double(int, double)> u;       // (k, t)
};
bool has_closed_form_spectrum(Process p);
BaseSpectrumFormula base_spectrum_formula(Process p);

// Exact trace of the covariance operator, int_0^1 G(t,t) dt.
double kernel_trace(const Kernel& k);

}  // namespace klx
