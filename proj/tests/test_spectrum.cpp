#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "klx/quadrature.hpp"
#include "klx/spectrum.hpp"
#include "klx/transform.hpp"

using namespace klx;
using Catch::Approx;

TEST_CASE("nystrom spectrum of the Wiener kernel") {
    Spectrum sp = nystrom_spectrum(make_kernel(Process::Wiener), 1000, 10);
    for (int k = 0; k < 10; ++k) {
        double exact = 1.0 / std::pow((k + 0.5) * pi, 2.0);
        CHECK(sp.eigenvalues[k] == Approx(exact).epsilon(1e-3));
    }
    CHECK(orthonormality_error(sp) < 1e-6);
    // sign convention: first nonzero component positive
    CHECK(sp.eigenfunctions(0, 0) > 0.0);
    CHECK(sp.eigenfunctions(0, 3) > 0.0);
}

TEST_CASE("rank-one kernel has a single nonzero eigenvalue") {
    Matrix zero = Matrix::Zero(2, 2);
    Kernel k = kernel_from_table(zero).with_update(1.0, [](double t) { return t; });
    Spectrum sp = nystrom_spectrum(k, 64, 4);
    CHECK(sp.eigenvalues[0] == Approx(1.0 / 3.0).epsilon(1e-10));
    for (int j = 1; j < 4; ++j) CHECK(std::abs(sp.eigenvalues[j]) < 1e-12);
}

TEST_CASE("psd violations are reported") {
    Matrix bad(2, 2);
    bad << 0.0, 1.0, 1.0, 0.0;
    CHECK_THROWS_AS(nystrom_spectrum(kernel_from_table(bad), 16, 2), NumericError);
    CHECK_THROWS_AS(nystrom_spectrum(make_kernel(Process::Wiener), 8, 4), PreconditionError);
}

TEST_CASE("critical transform acquires a zero mode with the weight's shape") {
    NystromFull f = nystrom_transformed_min_mode(make_kernel(Process::Bridge),
                                                 Weight::constant_one(), 12.0, 400);
    double lam1 = f.eigenvalues_desc[0];
    CHECK(std::abs(f.eigenvalues_desc[f.eigenvalues_desc.size() - 1]) < 1e-8 * lam1);
    Vector ones = Vector::Ones(f.grid.size());
    double corr = std::abs(f.grid.inner(f.min_vector, ones)) /
                  (f.grid.norm(f.min_vector) * f.grid.norm(ones));
    CHECK(corr > 0.999);
}

TEST_CASE("kernel reconstruction improves with more terms") {
    Kernel k = make_kernel(Process::Bridge);
    Spectrum sp = base_spectrum(Process::Bridge, 64, 256);
    Vector probes(3);
    probes << 0.21, 0.5, 0.83;
    double e8 = reconstruction_error(sp, k, 8, probes);
    double e32 = reconstruction_error(sp, k, 32, probes);
    double e64 = reconstruction_error(sp, k, 64, probes);
    CHECK(e32 < e8);
    CHECK(e64 < e32);
}

TEST_CASE("interlacing of rank-one updates") {
    Kernel k = make_kernel(Process::Bridge);
    Spectrum base = nystrom_spectrum(k, 400, 15, false);
    for (double alpha : {2.0, -1.0}) {
        Transform tr = make_transform(k, Weight::constant_one(), alpha);
        Spectrum t = nystrom_spectrum(transformed_kernel(tr), 400, 15, false);
        InterlacingResult r = interlacing_check(base, t, tr.Q());
        INFO("alpha = " << alpha << " witness " << r.witness);
        CHECK(r.ok);
    }
    // alpha = 0: equal spectra interlace trivially
    InterlacingResult r0 = interlacing_check(base, base, 0.0);
    CHECK(r0.ok);
}

TEST_CASE("fourier coefficients of psi") {
    Kernel k = make_kernel(Process::Bridge);
    Transform tr = make_transform(k, Weight::constant_one(), 1.0);
    Spectrum sp = base_spectrum(Process::Bridge, 200, 2048);
    FourierCoefficients fc = fourier_coefficients(sp, tr, 200);
    // a_k = 2 sqrt(2) / (k pi)^3 for odd k, zero for even k
    for (int k1 : {1, 3, 7})
        CHECK(fc.a[k1 - 1] ==
              Approx(2.0 * std::sqrt(2.0) / std::pow(k1 * pi, 3.0)).epsilon(1e-10));
    for (int k1 : {2, 4, 10}) CHECK(std::abs(fc.a[k1 - 1]) < 1e-12);
    // partial sums increase towards q
    CHECK(fc.partial_qsum[10] < fc.partial_qsum[100]);
    CHECK(fc.partial_qsum[199] == Approx(1.0 / 12.0).margin(1e-6));

    // phi = u_m: a_k = lambda_m delta_km
    Weight um = Weight::function(
        [&sp](double t) { return sp.eval(1, t); }, "u2");
    Transform tm = make_transform(k, um, 0.5);
    FourierCoefficients fm = fourier_coefficients(sp, tm, 6);
    for (int j = 0; j < 6; ++j) {
        double expect = j == 1 ? sp.eigenvalues[1] : 0.0;
        CHECK(fm.a[j] == Approx(expect).margin(1e-12));
    }
}

TEST_CASE("eigenfunction weight shortcut") {
    Spectrum sp = base_spectrum(Process::Bridge, 6, 256);
    const int m = 2;
    double q = sp.eigenvalues[m];

    Spectrum s0 = eigenfunction_weight_shortcut(sp, m, 0.0);
    CHECK((s0.eigenvalues - sp.eigenvalues).cwiseAbs().maxCoeff() == 0.0);

    Spectrum sc = eigenfunction_weight_shortcut(sp, m, 1.0 / q);
    CHECK(sc.eigenvalues[sc.count() - 1] == Approx(0.0).margin(1e-18));

    Spectrum sd = eigenfunction_weight_shortcut(sp, m, 2.0 / q);
    CHECK((sd.eigenvalues - sp.eigenvalues).cwiseAbs().maxCoeff() < 1e-16);

    CHECK_THROWS_AS(eigenfunction_weight_shortcut(sp, 17, 1.0), PreconditionError);
}
