#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "klx/quadrature.hpp"
#include "klx/smallball.hpp"
#include "klx/transform.hpp"
#include "klx/transformed_kl.hpp"

using namespace klx;
using Catch::Approx;

TEST_CASE("green constants") {
    auto [d1, D1] = green_constants(1);
    CHECK(d1 == 1.0);
    CHECK(D1 == Approx(0.125).epsilon(1e-15));
    auto [d2, D2] = green_constants(2);
    CHECK(d2 == Approx(1.0 / 3.0));
    CHECK(D2 == Approx(0.375).epsilon(1e-14));
    auto [d3, D3] = green_constants(3);
    CHECK(d3 == Approx(0.2));
    CHECK(D3 == Approx(2.5 * std::pow(3.0, -1.2)).epsilon(1e-14));
    CHECK_THROWS_AS(green_constants(0), PreconditionError);
}

TEST_CASE("catalog descriptors are consistent with the operator order") {
    struct Case { Process p; int ell; };
    for (auto c : {Case{Process::Wiener, 1}, Case{Process::Bridge, 1},
                   Case{Process::IntegratedWiener, 2},
                   Case{Process::IntegratedCenteredWiener, 2}}) {
        auto [d, D] = green_constants(c.ell);
        AsymptoticDescriptor b = base_smallball(c.p);
        CHECK(b.d == Approx(d).margin(1e-15));
        CHECK(b.D == Approx(D).margin(1e-15));
        CHECK(make_kernel(c.p).operator_order() == c.ell);
    }
    CHECK_THROWS_AS(base_smallball(Process::Slepian), UnsupportedError);
}

TEST_CASE("noncritical scaling") {
    AsymptoticDescriptor b = base_smallball(Process::Bridge);
    AsymptoticDescriptor r = theorem1_scale(b, 1.0 / 12.0, 6.0);
    CHECK(r.C == Approx(2.0 * b.C).epsilon(1e-14));
    CHECK(r.beta == b.beta);
    CHECK(r.D == b.D);

    AsymptoticDescriptor w = base_smallball(Process::Wiener);
    CHECK(theorem1_scale(w, 1.0 / 3.0, 1.0).C == Approx(6.0 / std::sqrt(pi)).epsilon(1e-14));
    CHECK(theorem1_scale(w, 1.0 / 3.0, 0.0).C == Approx(w.C));
    CHECK_THROWS_AS(theorem1_scale(w, 1.0 / 3.0, 3.0), PreconditionError);
}

TEST_CASE("critical scaling") {
    AsymptoticDescriptor b = base_smallball(Process::Bridge);
    AsymptoticDescriptor r = theorem3_scale(b, 1.0 / 12.0, 1.0);
    CHECK(r.C == Approx(1.0 / std::sqrt(6.0 * pi)).epsilon(1e-13));
    CHECK(r.beta == Approx(-1.0));

    AsymptoticDescriptor icw = base_smallball(Process::IntegratedCenteredWiener);
    AsymptoticDescriptor ric = theorem3_scale(icw, 1.0 / 120.0, 1.0);
    CHECK(ric.C == Approx(1.0 / (3.0 * std::sqrt(5.0 * pi))).epsilon(1e-13));
    CHECK(ric.beta == Approx(-5.0 / 6.0));

    AsymptoticDescriptor btt = theorem3_scale(b, 17.0 / 5040.0, 1.0 / std::sqrt(30.0));
    CHECK(btt.C == Approx(std::sqrt(17.0) / (2.0 * std::sqrt(21.0 * pi))).epsilon(1e-13));

    // the normal-quantile weight is not square integrable
    Transform nq = make_transform(make_kernel(Process::Bridge), Weight::normal_quantile(), 1.0);
    CHECK_THROWS_AS(theorem3_scale(b, nq.q(), nq.phi_l2_norm()), UnsupportedError);
}

TEST_CASE("density asymptotics and evaluation") {
    AsymptoticDescriptor b = base_smallball(Process::Bridge);
    AsymptoticDescriptor d = density_asymptotics(b);
    CHECK(d.C == Approx(b.C * 0.125).epsilon(1e-15));
    CHECK(d.beta == Approx(-2.0));
    AsymptoticDescriptor w = base_smallball(Process::Wiener);
    CHECK(density_asymptotics(w).beta == Approx(0.5 - 2.0));

    double got = eval_asymptotic(w, 0.1);
    double want = (4.0 / std::sqrt(pi)) * 0.1 * std::exp(-12.5);
    CHECK(got == Approx(want).epsilon(1e-14));

    bool clamped = false;
    double big = eval_asymptotic({5.0, 0.0, 1e-9, 1.0}, 100.0, &clamped);
    CHECK(big == 1.0);
    CHECK(clamped);
}

TEST_CASE("abel half integral") {
    CHECK(abel_half_integral([](double) { return 1.0; }, 0.5) ==
          Approx(2.0 * std::sqrt(0.5)).epsilon(1e-14));
    CHECK(abel_half_integral([](double x) { return x; }, 0.3) ==
          Approx(4.0 / 3.0 * std::pow(0.3, 1.5)).epsilon(1e-13));
}

TEST_CASE("spike density reduces the convolution to its kernel") {
    // density concentrated at r0: integral -> 1/sqrt(r - r0)
    double r0 = 0.2, eps = std::sqrt(0.5), width = 0.02;
    auto bump = [r0, width](double x) {
        double u = (x - r0) / width;
        return std::exp(-0.5 * u * u) / (width * std::sqrt(2.0 * pi));
    };
    double got = theorem2_convolution(bump, 0.25, 1.0, eps);
    double want = (std::sqrt(0.25) / 1.0) * std::sqrt(2.0 / pi) / std::sqrt(0.5 - r0);
    CHECK(got == Approx(want).epsilon(0.02));
}

TEST_CASE("display form stays close to the pipeline at moderate radii") {
    AsymptoticDescriptor dens = density_asymptotics(base_smallball(Process::Bridge));
    auto density = [&dens](double x) {
        return x <= 0.0 ? 0.0 : dens.C * std::pow(x, dens.beta) * std::exp(-dens.D / x);
    };
    double pipe = theorem2_convolution(density, 1.0 / 12.0, 1.0, 0.3);
    double display = theorem2_display_form(density, 1.0 / 12.0, 1.0, 0.3);
    CHECK(std::isfinite(display));
    CHECK(display > 0.0);
    // comparison only: the two notations drift apart away from 0
    CHECK(display == Approx(pipe).epsilon(1.0));
}

TEST_CASE("deconvolution identities") {
    // single factor: removing it leaves the unit step
    int n = 3000;
    Vector rg(n);
    for (int i = 0; i < n; ++i) rg[i] = 6.0 * i / (n - 1);
    DistributionCurve single = curve_from_functions(
        [](double x) { return chi1_cdf(1.0, x); }, [](double x) { return chi1_density(1.0, x); },
        rg);
    Vector probes(5);
    probes << 0.5, 1.0, 2.0, 3.0, 4.0;
    DistributionCurve f1 = deconvolve_first(single, 1.0, probes);
    for (int i = 0; i < 5; ++i) CHECK(f1.F[i] == Approx(1.0).margin(2e-3));

    // scaling both eigenvalues rescales the argument of the remainder
    auto sum_cdf = [](double l1, double l2, double x) {
        if (x <= 0.0) return 0.0;
        Grid g = composite_gauss_legendre(800, 0.0, std::sqrt(x));
        double acc = 0.0;
        for (Index i = 0; i < g.size(); ++i) {
            double v = g.nodes[i];
            acc += g.weights[i] * 2.0 * std::exp(-0.5 * v * v / l1) /
                   std::sqrt(2.0 * pi * l1) * chi1_cdf(l2, x - v * v);
        }
        return acc;
    };
    Vector rg2(n);
    for (int i = 0; i < n; ++i) rg2[i] = 12.0 * i / (n - 1);
    DistributionCurve a;
    a.r = rg;
    a.F.resize(n);
    for (int i = 0; i < n; ++i) a.F[i] = sum_cdf(1.0, 0.25, rg[i]);
    DistributionCurve b;
    b.r = rg2;
    b.F.resize(n);
    for (int i = 0; i < n; ++i) b.F[i] = sum_cdf(2.0, 0.5, rg2[i]);
    Vector pr(3);
    pr << 0.4, 0.8, 1.6;
    Vector pr2 = 2.0 * pr;
    DistributionCurve fa = deconvolve_first(a, 1.0, pr);
    DistributionCurve fb = deconvolve_first(b, 2.0, pr2);
    for (int i = 0; i < 3; ++i) CHECK(fb.F[i] == Approx(fa.F[i]).margin(2e-4));
}

TEST_CASE("fredholm ratio") {
    Spectrum base = base_spectrum(Process::Bridge, 201, 64);
    // alpha = 0: every partial product is 1
    Transform t0 = make_transform(make_kernel(Process::Bridge), Weight::constant_one(), 0.0);
    Spectrum s0 = transformed_kl(t0, 200, 64);
    for (int n : {1, 10, 200}) CHECK(fredholm_ratio(base, s0, n) == Approx(1.0).margin(1e-12));

    // a zero eigenvalue in a non-critical enumeration is an error
    Spectrum sz = eigenfunction_weight_shortcut(base, 3, 1.0 / base.eigenvalues[3]);
    CHECK_THROWS_AS(fredholm_ratio(base, sz, 100, false), PreconditionError);

    // critical pairing: drop the zero, shift the base enumeration
    Transform tc = make_transform(make_kernel(Process::Bridge), Weight::constant_one(), 12.0);
    Spectrum sc = transformed_kl(tc, 250, 64);
    Spectrum base2 = base_spectrum(Process::Bridge, 251, 64);
    double lim = base2.eigenvalues[0] * 1.0 / tc.q();  // lambda_1 ||phi||^2 / q
    double r250 = fredholm_ratio(base2, sc, 250, true);
    CHECK(r250 == Approx(lim).epsilon(0.02));
}

TEST_CASE("jensen limit basics") {
    JensenProbe p;
    p.gamma1 = std::exp(1.0);
    p.gamma2 = 0.0;
    p.b = Vector::Zero(1);
    p.mu = Vector::Ones(1);
    p.R = 100.0;
    CHECK(jensen_limit(p) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("density ratio trend on the analytic bridge curve") {
    AsymptoticDescriptor b = base_smallball(Process::Bridge);
    AsymptoticDescriptor d = density_asymptotics(b);
    int n = 200;
    Vector rg(n);
    for (int i = 0; i < n; ++i) rg[i] = 0.005 + (0.2 - 0.005) * i / (n - 1);
    DistributionCurve c = curve_from_functions(
        [&b](double x) { return eval_asymptotic(b, std::sqrt(x)); },
        [&d](double x) { return d.C * std::pow(x, d.beta) * std::exp(-d.D / x); }, rg);
    CHECK(density_ratio_trend(c));
}
