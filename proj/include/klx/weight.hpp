#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "klx/types.hpp"

namespace klx {

struct WeightAtom {
    enum class Kind { PointMass, Dipole };
    Kind kind;
    double t0;
    double coeff = 1.0;
};

// Generalized weight: an optional locally summable function part plus a list
// of point-mass / dipole atoms. The normal-quantile weight 1/phi(Phi^{-1}(t))
// is a function weight flagged as not square integrable; its integrals are
// evaluated after the substitution t = Phi(x).
class Weight {
  public:
    static Weight constant_one();
    static Weight polynomial(std::vector<double> coeffs, std::string label = "");
    static Weight normal_quantile();
    static Weight point_mass(double t0, double coeff = 1.0);
    static Weight dipole(double t0, double coeff = 1.0);
    static Weight tabulated(const Vector& values, std::string label = "");
    // user-supplied locally summable function; breakpoints mark kinks
    static Weight function(std::function<double(double)> fn, std::string label,
                           bool sq_integrable = true, std::vector<double> breakpoints = {});

    bool has_function_part() const { return static_cast<bool>(fn_); }
    bool is_normal_quantile() const { return normal_quantile_; }
    bool square_integrable() const { return square_integrable_; }
    const std::vector<WeightAtom>& atoms() const { return atoms_; }
    const std::vector<double>& function_breakpoints() const { return breakpoints_; }
    const std::optional<std::vector<double>>& poly_coeffs() const { return poly_; }
    const std::string& label() const { return label_; }

    double fn_value(double t) const;

    Weight operator+(const Weight& other) const;

  private:
    std::function<double(double)> fn_;
    std::vector<double> breakpoints_;
    std::optional<std::vector<double>> poly_;
    bool normal_quantile_ = false;
    bool square_integrable_ = true;
    std::vector<WeightAtom> atoms_;
    std::string label_;
};

// Polynomial expression over t with +, -, *, /, ^ and rational constants,
// e.g. "t*(1-t)" or "t^2/2". Returns dense coefficients, index = power.
std::vector<double> parse_polynomial(const std::string& expr);

// Weight mini-grammar shared by all CLI subcommands:
//   const1 | poly:<expr> | delta:<t0> | ddelta:<t0> | normquant | csv:<path>
// Atoms may be summed with '+' and scaled with '<coeff>*', e.g.
// "delta:0+delta:1" or "2*delta:0.5".
Weight parse_weight(const std::string& spec);

}  // namespace klx
