#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace klx {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Eigen::Index;
using ConstRefVec = const Eigen::Ref<const Vector>&;
using ConstRefMat = const Eigen::Ref<const Matrix>&;

inline constexpr double pi = 3.14159265358979323846;

// Quadrature grid on [a,b]: nodes with matching positive weights.
struct Grid {
    Vector nodes;
    Vector weights;

    Index size() const { return nodes.size(); }

    double integrate(const std::function<double(double)>& f) const {
        double s = 0.0;
        for (Index i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }

    double inner(ConstRefVec u, ConstRefVec v) const {
        return (weights.array() * u.array() * v.array()).sum();
    }

    double norm(ConstRefVec u) const {
        double s = inner(u, u);
        return s > 0.0 ? std::sqrt(s) : 0.0;
    }

    Vector sample(const std::function<double(double)>& f) const {
        Vector out(nodes.size());
        for (Index i = 0; i < nodes.size(); ++i) out[i] = f(nodes[i]);
        return out;
    }
};

// Error taxonomy. Config errors map to CLI exit 2, numeric failures to exit 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace klx
