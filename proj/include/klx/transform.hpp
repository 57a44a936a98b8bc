#pragma once

#include <memory>

#include "klx/kernel.hpp"
#include "klx/types.hpp"
#include "klx/weight.hpp"

namespace klx {

struct QuadConfig {
    int n_nodes = 2048;      // master composite Gauss-Legendre rule on [0,1]
    int psi_panels = 40;     // split-rule panels per psi evaluation
    int normal_nodes = 512;  // nodes of the Phi-substituted rule
    double x_max = 8.0;      // truncation of the substituted domain
};

// The transform X -> X - alpha * psi * <phi, X> at covariance level.
// Immutable after construction; cheap to copy.
class Transform {
  public:
    Transform() = default;

    const Kernel& kernel() const;
    const Weight& weight() const;
    double alpha() const;
    double q() const;
    double Q() const;                   // q alpha^2 - 2 alpha
    bool critical() const;              // alpha == 1/q to 1e-12
    double one_minus_qalpha_sq() const; // (1 - q alpha)^2, equals 1 + Q q
    // L2 norm of phi; NaN when phi is not square integrable.
    double phi_l2_norm() const;

    const Grid& grid() const;
    const Vector& psi_values() const;
    double psi(double t) const;
    double psi_prime(double t, Side side = Side::Auto) const;

    const QuadConfig& quad() const;

    struct Impl;

  private:
    std::shared_ptr<const Impl> impl_;
    friend Transform make_transform(const Kernel&, const Weight&, double, const QuadConfig&);
    friend Kernel transformed_kernel(const Transform&);
};

Transform make_transform(const Kernel& kernel, const Weight& weight, double alpha,
                         const QuadConfig& cfg = {});

// Covariance of the transformed process: G + Q psi psi^T.
Kernel transformed_kernel(const Transform& tr);

// q = <phi, G phi> computed by an independent double quadrature route.
double compute_q_double_route(const Kernel& kernel, const Weight& weight,
                              const QuadConfig& cfg = {});

inline double dual_alpha(double q, double alpha) {
    if (!(q > 0.0)) throw PreconditionError("dual_alpha: q must be positive");
    return 2.0 / q - alpha;
}

inline double critical_alpha(double q) {
    if (!(q > 0.0)) throw PreconditionError("critical_alpha: q must be positive");
    return 1.0 / q;
}

// <phi, f>. Dipole atoms use fprime when supplied, otherwise a one-sided
// second-order difference.
double weight_dot(const Weight& w, const std::function<double(double)>& f,
                  const std::function<double(double)>& fprime = nullptr,
                  const QuadConfig& cfg = {});

// Two-parameter transform (two weights, two alphas) under the orthogonality
// assumption <phi_1, G phi_2> = 0.
class TwoParamTransform {
  public:
    const Transform& first() const { return t1_; }
    const Transform& second() const { return t2_; }
    double cross_coupling() const { return cross_; }

    friend TwoParamTransform make_two_param(const Kernel&, const Weight&, double,
                                            const Weight&, double, const QuadConfig&);

  private:
    Transform t1_, t2_;
    double cross_ = 0.0;
};

TwoParamTransform make_two_param(const Kernel& kernel, const Weight& w1, double alpha1,
                                 const Weight& w2, double alpha2, const QuadConfig& cfg = {});

Kernel two_param_kernel(const TwoParamTransform& tp);

}  // namespace klx
