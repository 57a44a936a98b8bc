#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <cstdio>
#include <fstream>

#include "klx/kernel.hpp"
#include "klx/quadrature.hpp"
#include "klx/spectrum.hpp"

using namespace klx;
using Catch::Approx;

TEST_CASE("catalog evaluations") {
    CHECK(make_kernel(Process::Wiener).eval(0.3, 0.7) == Approx(0.3));
    CHECK(make_kernel(Process::Bridge).eval(0.5, 0.5) == Approx(0.25));
    CHECK(make_kernel(Process::Slepian).eval(0.2, 0.9) == Approx(0.3));
    CHECK(make_kernel(Process::IntegratedWiener).eval(1.0, 1.0) == Approx(1.0 / 3.0));
}

TEST_CASE("symmetry and positive semidefiniteness on grids") {
    for (Process p : {Process::Wiener, Process::Bridge, Process::IntegratedWiener,
                      Process::IntegratedCenteredWiener, Process::Slepian}) {
        Kernel k = make_kernel(p);
        for (int n : {64, 256, 1024}) {
            Grid g = composite_gauss_legendre(n);
            Matrix gram = k.gram(g.nodes);
            double asym = (gram - gram.transpose()).cwiseAbs().maxCoeff();
            CHECK(asym < 1e-12);
            Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
            double lo = es.eigenvalues()[0], hi = es.eigenvalues()[n - 1];
            INFO(process_tag(p) << " n=" << n);
            CHECK(lo >= -1e-9 * hi);
        }
    }
}

TEST_CASE("partial derivatives") {
    Kernel iw = make_kernel(Process::IntegratedWiener);
    // -dG/ds(t,1) = -t^2/2 at t = 0.6
    CHECK(-iw.partial_s(0.6, 1.0, Side::Left) == Approx(-0.18));
    Kernel w = make_kernel(Process::Wiener);
    CHECK(w.partial_s(0.4, 1.0, Side::Left) == Approx(0.0).margin(1e-15));
    CHECK(w.partial_s(0.9, 0.2) == Approx(1.0));
    CHECK_THROWS_AS(w.partial_s(0.5, 0.5), PreconditionError);
    CHECK(w.partial_s(0.5, 0.5, Side::Left) == Approx(1.0));
    // mixed partial of the integrated Wiener at the right endpoint
    CHECK(iw.partial_st(1.0, 1.0, Side::Left) == Approx(1.0));
}

TEST_CASE("icwiener closed form matches its defining double integral") {
    Kernel k = make_kernel(Process::IntegratedCenteredWiener);
    // centered Wiener covariance, integrated over [0,t] x [0,s]
    auto gc = [](double u, double v) {
        return std::min(u, v) - (u - u * u / 2.0) - (v - v * v / 2.0) + 1.0 / 3.0;
    };
    for (auto [t, s] : {std::pair{0.3, 0.7}, {0.5, 0.5}, {0.9, 0.2}, {0.25, 1.0}}) {
        Grid gu = split_rule(0.0, t, {std::min(t, s)}, 24);
        double acc = 0.0;
        for (Index i = 0; i < gu.size(); ++i) {
            Grid gv = split_rule(0.0, s, {gu.nodes[i]}, 24);
            double inner = 0.0;
            for (Index j = 0; j < gv.size(); ++j)
                inner += gv.weights[j] * gc(gu.nodes[i], gv.nodes[j]);
            acc += gu.weights[i] * inner;
        }
        CHECK(k.eval(t, s) == Approx(acc).margin(1e-12));
    }
    CHECK(kernel_trace(k) == Approx(1.0 / 90.0).epsilon(1e-12));
}

TEST_CASE("icwiener inverts the squared bridge operator") {
    // G is the Green function of u'''' with u(0)=u(1)=u''(0)=u''(1)=0:
    // applying it to L f for f = sin(k pi t) must return f.
    Kernel k = make_kernel(Process::IntegratedCenteredWiener);
    Grid g = composite_gauss_legendre(1024);
    for (int mode : {1, 2}) {
        double l = std::pow(mode * pi, 4.0);
        double worst = 0.0;
        for (double t : {0.2, 0.5, 0.8}) {
            double acc = 0.0;
            for (Index j = 0; j < g.size(); ++j)
                acc += g.weights[j] * k.eval(t, g.nodes[j]) * l * std::sin(mode * pi * g.nodes[j]);
            worst = std::max(worst, std::abs(acc - std::sin(mode * pi * t)));
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("base spectra") {
    Spectrum w = base_spectrum(Process::Wiener, 10, 1024);
    CHECK(w.eigenvalues[0] == Approx(4.0 / (pi * pi)).epsilon(1e-14));
    CHECK(w.eigenvalues[9] == Approx(1.0 / (9.5 * pi * 9.5 * pi)).epsilon(1e-14));
    Spectrum b = base_spectrum(Process::Bridge, 2, 1024);
    CHECK(b.eigenvalues[0] == Approx(1.0 / (pi * pi)).epsilon(1e-14));
    CHECK(b.eigenvalues[1] == Approx(1.0 / (4.0 * pi * pi)).epsilon(1e-14));
    CHECK(orthonormality_error(w) < 1e-6);

    CHECK_THROWS_AS(base_spectrum(Process::Slepian, 4), UnsupportedError);
    CHECK_THROWS_AS(base_spectrum(Process::IntegratedWiener, 4), UnsupportedError);
}

TEST_CASE("base spectra agree with the nystrom oracle") {
    for (Process p : {Process::Wiener, Process::Bridge, Process::IntegratedCenteredWiener}) {
        Spectrum a = base_spectrum(p, 10, 256);
        Spectrum n = nystrom_spectrum(make_kernel(p), 1000, 10, false);
        for (int k = 0; k < 10; ++k) {
            INFO(process_tag(p) << " k=" << k);
            CHECK(a.eigenvalues[k] == Approx(n.eigenvalues[k]).epsilon(1e-3));
        }
    }
}

TEST_CASE("custom kernels load from csv grids") {
    std::string path = "test_kernel_grid.csv";
    {
        const int n = 41;
        std::ofstream f(path);
        f << n << "\n";
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double t = double(i) / (n - 1), s = double(j) / (n - 1);
                f << (std::min(t, s) - t * s) << (j + 1 == n ? "\n" : ",");
            }
        }
    }
    Kernel k = kernel_from_csv(path);
    Kernel b = make_kernel(Process::Bridge);
    // bilinear interpolation of a smooth kernel on a 41-point grid
    CHECK(std::abs(k.eval(0.33, 0.618) - b.eval(0.33, 0.618)) < 1e-3);
    CHECK(k.eval(0.25, 0.5) == Approx(k.eval(0.5, 0.25)).margin(1e-15));
    CHECK_THROWS_AS(k.partial_s(0.3, 0.7), UnsupportedError);
    CHECK_THROWS_AS(make_kernel(Process::Custom), ConfigError);
    CHECK_THROWS_AS(kernel_from_csv("no_such_file.csv"), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("process tags round-trip") {
    for (Process p : {Process::Wiener, Process::Bridge, Process::IntegratedWiener,
                      Process::IntegratedCenteredWiener, Process::Slepian})
        CHECK(process_from_tag(process_tag(p)) == p);
    CHECK_THROWS_AS(process_from_tag("brownian"), ConfigError);
}
