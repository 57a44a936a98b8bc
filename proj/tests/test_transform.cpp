#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "klx/normal.hpp"
#include "klx/transform.hpp"

using namespace klx;
using Catch::Approx;

TEST_CASE("psi for the catalog transforms") {
    Transform w1 = make_transform(make_kernel(Process::Wiener), Weight::constant_one(), 0.0);
    for (double t : {0.1, 0.5, 0.9})
        CHECK(w1.psi(t) == Approx((2.0 * t - t * t) / 2.0).epsilon(1e-13));

    Transform wd = make_transform(make_kernel(Process::Wiener), Weight::point_mass(1.0), 0.0);
    for (double t : {0.2, 0.7, 1.0}) CHECK(wd.psi(t) == Approx(t).margin(1e-15));

    Transform nq = make_transform(make_kernel(Process::Bridge), Weight::normal_quantile(), 0.0);
    CHECK(nq.psi(0.5) == Approx(1.0 / std::sqrt(2.0 * pi)).epsilon(1e-10));
    // psi solves the bridge boundary problem: psi = pdf(quantile(t)) everywhere
    for (double t : {0.15, 0.4, 0.85})
        CHECK(nq.psi(t) == Approx(normal_pdf(normal_quantile(t))).epsilon(1e-9));

    // integrated Wiener with a dipole at t = 1: psi = -t^2/2
    Transform iwd =
        make_transform(make_kernel(Process::IntegratedWiener), Weight::dipole(1.0), 0.0);
    for (double t : {0.3, 0.6, 1.0}) CHECK(iwd.psi(t) == Approx(-t * t / 2.0).margin(1e-14));
}

TEST_CASE("q for the catalog transforms") {
    auto q_of = [](Process p, const Weight& w) {
        return make_transform(make_kernel(p), w, 0.0).q();
    };
    CHECK(q_of(Process::Wiener, Weight::constant_one()) == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(q_of(Process::Bridge, parse_weight("poly:t*(1-t)")) ==
          Approx(17.0 / 5040.0).epsilon(1e-13));
    CHECK(q_of(Process::Wiener, Weight::point_mass(1.0)) == Approx(1.0).margin(1e-15));
    CHECK(q_of(Process::Bridge, Weight::normal_quantile()) == Approx(1.0).epsilon(1e-13));
    CHECK(q_of(Process::Bridge, Weight::constant_one()) == Approx(1.0 / 12.0).epsilon(1e-14));
    CHECK(q_of(Process::IntegratedCenteredWiener, Weight::constant_one()) ==
          Approx(1.0 / 120.0).epsilon(1e-13));
    CHECK(q_of(Process::IntegratedWiener, Weight::dipole(1.0)) == Approx(1.0).margin(1e-14));
}

TEST_CASE("transformed kernel is the rank-one update") {
    Kernel w = make_kernel(Process::Wiener);
    // alpha = 0 leaves the kernel untouched
    Transform t0 = make_transform(w, Weight::constant_one(), 0.0);
    Kernel k0 = transformed_kernel(t0);
    CHECK(k0.eval(0.3, 0.8) == Approx(0.3).margin(1e-15));

    // alpha = 2/q gives Q ~ 0
    Transform td = make_transform(w, Weight::constant_one(), 6.0);
    CHECK(std::abs(td.Q()) < 1e-13);

    // point mass at 1: min(t,s) + Q t s
    Transform tp = make_transform(w, Weight::point_mass(1.0), 0.7);
    double Q = 0.7 * 0.7 - 2 * 0.7;
    Kernel kp = transformed_kernel(tp);
    for (auto [t, s] : {std::pair{0.2, 0.9}, {0.5, 0.5}})
        CHECK(kp.eval(t, s) == Approx(std::min(t, s) + Q * t * s).margin(1e-14));

    // Slepian with delta(t) + delta(t-1): psi = 1, q = 2, kernel 1 + Q - |t-s|
    Transform ts = make_transform(make_kernel(Process::Slepian),
                                  parse_weight("delta:0+delta:1"), 0.3);
    CHECK(ts.q() == Approx(2.0).margin(1e-14));
    CHECK(ts.psi(0.44) == Approx(1.0).margin(1e-14));
    double Qs = 2.0 * 0.3 * 0.3 - 2.0 * 0.3;
    Kernel ks = transformed_kernel(ts);
    CHECK(ks.eval(0.2, 0.9) == Approx(1.0 + Qs - 0.7).margin(1e-14));

    // integrated Wiener with the dipole: G + Q t^2 s^2 / 4
    Transform ti = make_transform(make_kernel(Process::IntegratedWiener),
                                  Weight::dipole(1.0), 1.3);
    double Qi = 1.3 * 1.3 - 2.6;
    Kernel ki = transformed_kernel(ti);
    Kernel base = make_kernel(Process::IntegratedWiener);
    CHECK(ki.eval(0.4, 0.8) ==
          Approx(base.eval(0.4, 0.8) + Qi * 0.16 * 0.64 / 4.0).margin(1e-14));
}

TEST_CASE("duality and criticality") {
    CHECK(dual_alpha(1.0 / 3.0, 0.0) == Approx(6.0));
    CHECK(dual_alpha(1.0 / 12.0, 12.0) == Approx(12.0));  // fixed point
    CHECK(dual_alpha(1.0, dual_alpha(1.0, 0.37)) == Approx(0.37));
    // Q agrees at dual alphas
    auto Qf = [](double q, double a) { return q * a * a - 2.0 * a; };
    CHECK(Qf(1.0, 0.5) == Approx(-0.75));
    CHECK(Qf(1.0, 1.5) == Approx(-0.75));

    CHECK(critical_alpha(1.0 / 3.0) == Approx(3.0));
    CHECK(critical_alpha(1.0 / 12.0) == Approx(12.0));
    CHECK(critical_alpha(1.0 / 120.0) == Approx(120.0));
    CHECK_THROWS_AS(critical_alpha(0.0), PreconditionError);
    CHECK_THROWS_AS(dual_alpha(-1.0, 0.5), PreconditionError);

    Transform tc = make_transform(make_kernel(Process::Bridge), Weight::constant_one(), 12.0);
    CHECK(tc.critical());
    CHECK(tc.Q() == Approx(-12.0).margin(1e-12));
    Transform tn = make_transform(make_kernel(Process::Bridge), Weight::constant_one(), 11.99);
    CHECK_FALSE(tn.critical());
}

TEST_CASE("algebraic identity 1 + Qq = (1 - alpha q)^2") {
    Kernel k = make_kernel(Process::Wiener);
    for (double a : {-3.0, 0.0, 1.0, 3.0, 6.0, 11.0}) {
        Transform tr = make_transform(k, Weight::constant_one(), a);
        CHECK(1.0 + tr.Q() * tr.q() == Approx(tr.one_minus_qalpha_sq()).margin(1e-12));
    }
}

TEST_CASE("degenerate transforms are rejected") {
    // a dipole against the Wiener kernel gives psi = 0
    CHECK_THROWS_AS(
        make_transform(make_kernel(Process::Wiener), Weight::dipole(1.0), 1.0),
        PreconditionError);
}

TEST_CASE("q computed by both routes of its definition") {
    struct Case { Process p; const char* w; };
    for (auto& c : {Case{Process::Wiener, "const1"}, Case{Process::Bridge, "poly:t*(1-t)"},
                    Case{Process::Slepian, "delta:0+delta:1"}}) {
        Kernel k = make_kernel(c.p);
        Weight w = parse_weight(c.w);
        Transform tr = make_transform(k, w, 1.0);
        CHECK(tr.q() == Approx(compute_q_double_route(k, w)).margin(1e-8));
    }
}

TEST_CASE("two-parameter transforms") {
    Kernel b = make_kernel(Process::Bridge);
    // distinct eigenfunctions are automatically G-orthogonal
    Weight f1 = Weight::function(
        [](double t) { return std::sqrt(2.0) * std::sin(2.0 * pi * t); }, "sin2");
    Weight f2 = Weight::function(
        [](double t) { return std::sqrt(2.0) * std::sin(4.0 * pi * t); }, "sin4");
    TwoParamTransform tp = make_two_param(b, f1, 2.0, f2, -1.0);
    CHECK(std::abs(tp.cross_coupling()) < 1e-12);

    // psi_k = lambda_k phi_k for eigenfunction weights
    double l2 = 1.0 / (2.0 * pi * 2.0 * pi), l4 = 1.0 / (4.0 * pi * 4.0 * pi);
    CHECK(tp.first().psi(0.37) ==
          Approx(l2 * std::sqrt(2.0) * std::sin(2.0 * pi * 0.37)).margin(1e-12));
    CHECK(tp.first().q() == Approx(l2).margin(1e-13));
    CHECK(tp.second().q() == Approx(l4).margin(1e-13));

    // sequential application agrees with the two-term update
    Kernel k2 = two_param_kernel(tp);
    Kernel seq = transformed_kernel(tp.first());
    Transform second_on_first = make_transform(seq, f2, -1.0);
    Kernel seq2 = transformed_kernel(second_on_first);
    double worst = 0.0;
    for (int i = 0; i < 64; ++i) {
        for (int j = 0; j <= i; ++j) {
            double t = (i + 0.5) / 64.0, s = (j + 0.5) / 64.0;
            worst = std::max(worst, std::abs(k2.eval(t, s) - seq2.eval(t, s)));
        }
    }
    CHECK(worst < 1e-10);

    // alpha = 0 twice gives the base kernel back
    TwoParamTransform tz = make_two_param(b, f1, 0.0, f2, 0.0);
    Kernel kz = two_param_kernel(tz);
    CHECK(kz.eval(0.3, 0.6) == Approx(b.eval(0.3, 0.6)).margin(1e-14));

    // correlated weights violate the orthogonality assumption
    CHECK_THROWS_AS(
        make_two_param(b, Weight::constant_one(), 1.0, parse_weight("poly:t"), 1.0),
        PreconditionError);
}
