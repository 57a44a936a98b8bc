#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "klx/transformed_kl.hpp"

using namespace klx;
using Catch::Approx;

TEST_CASE("example matching") {
    Kernel w = make_kernel(Process::Wiener), b = make_kernel(Process::Bridge);
    CHECK(*match_catalog(make_transform(w, Weight::constant_one(), 1.0)) == EquationId::WienerOne);
    CHECK(*match_catalog(make_transform(b, Weight::constant_one(), 1.0)) == EquationId::BridgeOne);
    CHECK(*match_catalog(make_transform(b, parse_weight("poly:t*(1-t)"), 1.0)) ==
          EquationId::BridgeParabola);
    CHECK(*match_catalog(make_transform(make_kernel(Process::IntegratedCenteredWiener),
                                        Weight::constant_one(), 1.0)) == EquationId::IcwienerOne);
    CHECK(*match_catalog(make_transform(b, Weight::normal_quantile(), 0.5)) == EquationId::BridgeQuantile);
    CHECK_FALSE(match_catalog(make_transform(w, Weight::point_mass(1.0), 1.0)).has_value());
}

TEST_CASE("alpha = 0 returns the base spectrum") {
    Transform tr = make_transform(make_kernel(Process::Bridge), Weight::constant_one(), 0.0);
    Spectrum sp = transformed_kl(tr, 6, 512);
    for (int k = 1; k <= 6; ++k)
        CHECK(sp.eigenvalues[k - 1] == Approx(1.0 / (k * pi * k * pi)).epsilon(1e-14));
}

TEST_CASE("half the bridge eigenpairs ignore Q") {
    // the sine family (2 k pi)^{-2} with u = sqrt(2) sin(2 pi k t) appears for
    // every alpha because those eigenfunctions are orthogonal to psi
    Kernel b = make_kernel(Process::Bridge);
    for (double alpha : {2.0, 12.0}) {
        Transform tr = make_transform(b, Weight::constant_one(), alpha);
        Spectrum sp = transformed_kl(tr, 9, 512);
        bool found1 = false, found2 = false;
        for (Index i = 0; i < sp.count(); ++i) {
            if (sp.entries[i].branch != 0) continue;
            if (std::abs(sp.eigenvalues[i] - 1.0 / (4.0 * pi * pi)) < 1e-14) {
                found1 = true;
                CHECK(sp.eval(i, 0.31) ==
                      Approx(std::sqrt(2.0) * std::sin(2.0 * pi * 0.31)).epsilon(1e-10));
            }
            if (std::abs(sp.eigenvalues[i] - 1.0 / (16.0 * pi * pi)) < 1e-14) found2 = true;
        }
        CHECK(found1);
        CHECK(found2);
    }
}

TEST_CASE("fourth-order eigenfunctions match the displayed form") {
    Transform tr = make_transform(make_kernel(Process::IntegratedCenteredWiener),
                                  Weight::constant_one(), 40.0);
    Spectrum sp = transformed_kl(tr, 8, 1024);
    // locate a second-family entry and compare against the direct expression
    // gamma (cos(2 tau t) + cosh(2 tau t) - 2 + tan(tau) sin(2 tau t)
    //        - tanh(tau) sinh(2 tau t))
    bool checked = false;
    for (Index i = 0; i < sp.count(); ++i) {
        if (sp.entries[i].branch != 1) continue;
        double tau = sp.entries[i].x;
        CHECK(sp.eigenvalues[i] == Approx(std::pow(2.0 * tau, -4.0)).epsilon(1e-13));
        auto direct = [tau](double t) {
            return std::cos(2.0 * tau * t) + std::cosh(2.0 * tau * t) - 2.0 +
                   std::tan(tau) * std::sin(2.0 * tau * t) -
                   std::tanh(tau) * std::sinh(2.0 * tau * t);
        };
        // ratio of sampled values fixes the normalization
        double ratio = sp.eval(i, 0.3) / direct(0.3);
        for (double t : {0.1, 0.45, 0.7})
            CHECK(sp.eval(i, t) == Approx(ratio * direct(t)).margin(1e-8));
        checked = true;
        break;
    }
    CHECK(checked);
    CHECK(orthonormality_error(sp) < 1e-6);
}

TEST_CASE("normal-quantile example agrees with the oracle") {
    Transform tr = make_transform(make_kernel(Process::Bridge), Weight::normal_quantile(), 0.4);
    Spectrum an = transformed_kl(tr, 6, 1024);
    Spectrum ny = nystrom_spectrum(transformed_kernel(tr), 800, 6, false);
    for (int k = 0; k < 6; ++k)
        CHECK(an.eigenvalues[k] == Approx(ny.eigenvalues[k]).epsilon(1e-3));
    CHECK(orthonormality_error(an) < 1e-6);
}

TEST_CASE("transforms outside the catalog fall back to nystrom") {
    Transform tr = make_transform(make_kernel(Process::Slepian),
                                  parse_weight("delta:0+delta:1"), 0.3);
    Spectrum sp = transformed_kl(tr, 5, 512);
    CHECK(sp.provenance == Provenance::Nystrom);
    CHECK(sp.eigenvalues[0] > sp.eigenvalues[1]);
}
