#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "klx/eigenroots.hpp"
#include "klx/transform.hpp"

using namespace klx;
using Catch::Approx;

TEST_CASE("residual reductions at special parameters") {
    // Q = 0 turns the Wiener equation into cos(omega) = 0
    EigenEquationSpec ex1 = make_eigen_spec(EquationId::WienerOne, 0.0);
    CHECK(eigen_equation_residual(ex1, EqBranch::Second, pi / 2.0) ==
          Approx(0.0).margin(1e-12));

    // alpha = 12 on the bridge: tan(tau) = tau
    Transform tr = make_transform(make_kernel(Process::Bridge), Weight::constant_one(), 12.0);
    EigenEquationSpec ex2 = make_eigen_spec(EquationId::BridgeOne, tr.q(), 12.0);
    double root = 4.493409457909064;
    CHECK(std::abs(eigen_equation_residual(ex2, EqBranch::Second, root)) < 1e-10);

    // Q = 0 on the fourth-order equation keeps the cos factor
    EigenEquationSpec ex4 = make_eigen_spec(EquationId::IcwienerOne, 0.0);
    CHECK(eigen_equation_residual(ex4, EqBranch::Second, pi / 2.0) ==
          Approx(0.0).margin(1e-12));

    CHECK_THROWS_AS(eigen_equation_residual(ex1, EqBranch::First, 1.0), PreconditionError);
    CHECK_THROWS_AS(eigen_equation_residual(ex2, EqBranch::Second, -1.0), PreconditionError);
}

TEST_CASE("roots of the Wiener equation") {
    // Q = 0: the half-integer lattice
    RootSequence rs = solve_roots(make_eigen_spec(EquationId::WienerOne, 0.0), 10);
    for (int k = 0; k < 10; ++k)
        CHECK(rs.merged[k].x == Approx((k + 0.5) * pi).margin(1e-11));

    // alpha = 3 (critical): tan(omega) = omega; oracle by bisection of
    // sin(x) - x cos(x) on (pi, 3 pi/2)
    double lo = pi, hi = 1.5 * pi;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        ((std::sin(mid) - mid * std::cos(mid) > 0.0) ? lo : hi) = mid;
    }
    double oracle1 = 0.5 * (lo + hi);
    CHECK(oracle1 == Approx(4.493409457909064).margin(1e-12));

    Transform tr = make_transform(make_kernel(Process::Wiener), Weight::constant_one(), 3.0);
    RootSequence crit = solve_roots(make_eigen_spec(EquationId::WienerOne, tr.q(), 3.0), 6);
    CHECK(crit.merged[0].x == Approx(oracle1).margin(1e-9));
    for (const auto& r : crit.merged) CHECK(std::abs(std::tan(r.x) - r.x) < 1e-10);
}

TEST_CASE("roots are increasing with small scaled residuals") {
    for (double Q : {-11.0, -3.0, 2.5}) {
        for (EquationId ex : {EquationId::WienerOne, EquationId::BridgeOne, EquationId::BridgeParabola, EquationId::IcwienerOne}) {
            EigenEquationSpec spec = make_eigen_spec(ex, Q);
            RootSequence rs = solve_roots(spec, 8);
            for (std::size_t i = 0; i + 1 < rs.second_branch.size(); ++i)
                CHECK(rs.second_branch[i] < rs.second_branch[i + 1]);
            for (const auto& r : rs.merged) CHECK(r.residual < 1e-10);
        }
    }
}

TEST_CASE("double roots of the bridge equation") {
    // Q_k = -12/(1 + 3/(k pi)^2) makes the k-th roots of both branches meet
    CHECK(bridge_double_root_Q(1) == Approx(-12.0 / (1.0 + 3.0 / (pi * pi))));
    for (int k : {1, 2, 3}) {
        RootSequence rs = solve_roots(make_eigen_spec(EquationId::BridgeOne, bridge_double_root_Q(k)),
                                      k + 1);
        CHECK(std::abs(rs.second_branch[k - 1] - k * pi) < 1e-8);
        bool found = false;
        for (const auto& r : rs.merged)
            if (r.multiplicity == 2 && std::abs(r.x - k * pi) < 1e-8) found = true;
        CHECK(found);
    }
    // the sequence decreases towards -12
    CHECK(bridge_double_root_Q(1) > bridge_double_root_Q(2));
    CHECK(bridge_double_root_Q(50) == Approx(-12.0).epsilon(1e-3));
}

TEST_CASE("normal-quantile determinant equation") {
    auto ctx = make_quantile_context();
    // the sine family sits on the determinant's zero set
    EigenEquationSpec quant = make_eigen_spec(EquationId::BridgeQuantile, -0.64);
    double near_lattice = std::abs(ctx->determinant(2.0 * pi, -0.64));
    double off_lattice = std::abs(ctx->determinant(5.0, -0.64));
    CHECK(near_lattice < 1e-8 * off_lattice + 1e-12);

    // Q -> 0 pushes the second family onto the odd lattice
    EigenEquationSpec tiny = make_eigen_spec(EquationId::BridgeQuantile, -1e-7);
    RootSequence rs = solve_roots(tiny, 3);
    for (int k = 0; k < 3; ++k)
        CHECK(rs.second_branch[k] == Approx((2 * k + 1) * pi).margin(1e-3));

    // Q = 0 exactly: the limit equation sin(omega) = 0
    EigenEquationSpec zero = make_eigen_spec(EquationId::BridgeQuantile, 0.0);
    CHECK(eigen_equation_residual(zero, EqBranch::Second, pi) == Approx(0.0).margin(1e-12));
    RootSequence rz = solve_roots(zero, 3);
    CHECK(rz.second_branch[0] == Approx(pi).margin(1e-12));
}
