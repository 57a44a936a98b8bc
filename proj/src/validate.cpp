#include "klx/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "klx/eigenroots.hpp"
#include "klx/montecarlo.hpp"
#include "klx/quadrature.hpp"
#include "klx/smallball.hpp"
#include "klx/spectrum.hpp"
#include "klx/transform.hpp"
#include "klx/transformed_kl.hpp"

namespace klx {

namespace {

double rel_err(double measured, double expected) {
    return std::abs(measured - expected) / std::max(std::abs(expected), 1e-300);
}

void push(Checks& out, const std::string& suite, const std::string& name, double measured,
          double tol, const std::string& note) {
    out.push_back({suite, name, measured < tol, measured, tol, note});
}

Vector uniform_probes(int n) {
    Vector p(n);
    for (int i = 0; i < n; ++i) p[i] = (i + 0.5) / n;
    return p;
}

// --- criterion 1: catalog small-ball constants ----------------------------

void prop1_constants(Checks& out) {
    const std::string suite = "smallball";
    const double spi = std::sqrt(pi);
    struct Case {
        const char* name;
        Process proc;
        const char* weight;
        double alpha;  // ignored for critical cases
        bool crit;
        double expect_C;
        double expect_beta;
    };
    const Case cases[] = {
        {"C1.wiener-noncritical", Process::Wiener, "const1", 1.0, false, 6.0 / spi, 0.5},
        {"C1.wiener-critical", Process::Wiener, "const1", 0.0, true,
         2.0 / std::sqrt(3.0 * pi), -0.5},
        {"C1.bridge-noncritical", Process::Bridge, "const1", 6.0, false,
         4.0 * std::sqrt(2.0) / spi, 0.0},
        {"C1.bridge-critical", Process::Bridge, "const1", 0.0, true,
         1.0 / std::sqrt(6.0 * pi), -1.0},
        {"C1.bridge-tt-noncritical", Process::Bridge, "poly:t*(1-t)", 1.0, false,
         2.0 * std::sqrt(2.0) / (spi * (1.0 - 17.0 / 5040.0)), 0.0},
        {"C1.bridge-tt-critical", Process::Bridge, "poly:t*(1-t)", 0.0, true,
         std::sqrt(17.0) / (2.0 * std::sqrt(21.0 * pi)), -1.0},
        {"C1.icwiener-noncritical", Process::IntegratedCenteredWiener, "const1", 1.0, false,
         4.0 * std::sqrt(2.0) / (std::sqrt(3.0 * pi) * (1.0 - 1.0 / 120.0)), -1.0 / 6.0},
        {"C1.icwiener-critical", Process::IntegratedCenteredWiener, "const1", 0.0, true,
         1.0 / (3.0 * std::sqrt(5.0 * pi)), -5.0 / 6.0},
        {"C1.normquant-noncritical", Process::Bridge, "normquant", 0.5, false,
         4.0 * std::sqrt(2.0) / spi, 0.0},
        {"C1.iwiener-delta-noncritical", Process::IntegratedWiener, "delta:1", 1.0, false,
         4.0 * std::sqrt(6.0) / spi, 1.0 / 6.0},
    };
    for (const auto& c : cases) {
        Kernel k = make_kernel(c.proc);
        Transform tr = make_transform(k, parse_weight(c.weight), c.crit ? 0.0 : c.alpha);
        AsymptoticDescriptor base = base_smallball(c.proc);
        AsymptoticDescriptor res =
            c.crit ? theorem3_scale(base, tr.q(), tr.phi_l2_norm())
                   : theorem1_scale(base, tr.q(), c.alpha);
        double err = rel_err(res.C, c.expect_C);
        err = std::max(err, std::abs(res.beta - c.expect_beta));
        err = std::max(err, rel_err(res.D, base.D));
        err = std::max(err, std::abs(res.d - base.d));
        push(out, suite, c.name, err, 1e-12, "constant vs closed form, relative");
    }
}

// --- criterion 2: eigen-equation reductions ------------------------------

void eigen_reductions(Checks& out) {
    const std::string suite = "spectra";
    {
        RootSequence rs = solve_roots(make_eigen_spec(EquationId::WienerOne, 0.0), 12);
        double worst = 0.0;
        for (int k = 0; k < 12; ++k)
            worst = std::max(worst, std::abs(rs.merged[k].x - (k + 0.5) * pi));
        push(out, suite, "C2.wiener-q0-lattice", worst, 1e-10, "Wiener equation at Q=0 gives (k-1/2)pi");
    }
    const std::pair<EquationId, const char*> merged_cases[] = {
        {EquationId::BridgeOne, "C2.bridge-q0-merge"},
        {EquationId::BridgeParabola, "C2.bridge-tt-q0-merge"},
        {EquationId::IcwienerOne, "C2.icwiener-q0-merge"},
    };
    for (auto [ex, name] : merged_cases) {
        RootSequence rs = solve_roots(make_eigen_spec(ex, 0.0), 8);
        double worst = 0.0;
        for (std::size_t j = 0; j < rs.merged.size(); ++j)
            worst = std::max(worst, std::abs(rs.merged[j].x - (j + 1) * pi / 2.0));
        push(out, suite, name, worst, 1e-10, "Q=0 merges to the sine lattice in omega");
    }
    {
        Transform tr = make_transform(make_kernel(Process::Wiener), Weight::constant_one(), 3.0);
        EigenEquationSpec spec = make_eigen_spec(EquationId::WienerOne, tr.q(), 3.0);
        RootSequence rs = solve_roots(spec, 8);
        double worst = 0.0;
        for (const auto& r : rs.merged) worst = std::max(worst, std::abs(std::tan(r.x) - r.x));
        push(out, suite, "C2.wiener-alpha3-tan", worst, 1e-10, "alpha=3 reduces to tan(w)=w");
        push(out, suite, "C2.wiener-alpha3-root1",
             std::abs(rs.merged[0].x - 4.493409457909064), 1e-9, "first root of tan(w)=w");
    }
    {
        Transform tr = make_transform(make_kernel(Process::Bridge), Weight::constant_one(), 12.0);
        EigenEquationSpec spec = make_eigen_spec(EquationId::BridgeOne, tr.q(), 12.0);
        RootSequence rs = solve_roots(spec, 8);
        double worst = 0.0;
        for (double tau : rs.second_branch) worst = std::max(worst, std::abs(std::tan(tau) - tau));
        push(out, suite, "C2.bridge-alpha12-tan", worst, 1e-10, "alpha=12 reduces to tan(tau)=tau");
    }
}

// --- criterion 3: analytic KL vs Nystrom oracle --------------------------

void oracle_agreement(Checks& out) {
    const std::string suite = "spectra";
    struct Case {
        const char* name;
        Process proc;
        const char* weight;
    };
    const Case cases[] = {
        {"wiener1", Process::Wiener, "const1"},
        {"bridge1", Process::Bridge, "const1"},
        {"bridgett", Process::Bridge, "poly:t*(1-t)"},
        {"icwiener1", Process::IntegratedCenteredWiener, "const1"},
    };
    for (const auto& c : cases) {
        Kernel k = make_kernel(c.proc);
        Weight w = parse_weight(c.weight);
        double q = make_transform(k, w, 0.0).q();
        const double alphas[] = {0.0, 1.0, 1.0 / q, 2.0 / q};
        const char* tags[] = {"a0", "a1", "acrit", "adual"};
        for (int i = 0; i < 4; ++i) {
            Transform tr = make_transform(k, w, alphas[i]);
            Spectrum analytic = transformed_kl(tr, 10, 512);
            Spectrum oracle = nystrom_spectrum(transformed_kernel(tr), 1000, 10, false);
            double worst = 0.0;
            for (int j = 0; j < 10; ++j)
                worst = std::max(worst, rel_err(analytic.eigenvalues[j], oracle.eigenvalues[j]));
            push(out, suite, std::string("C3.") + c.name + "-" + tags[i], worst, 1e-3,
                 "first 10 eigenvalues, analytic vs nystrom(1000)");
        }
    }
}

// --- criterion 4: Fredholm ratio ------------------------------------------

void fredholm_checks(Checks& out) {
    const std::string suite = "spectra";
    Kernel k = make_kernel(Process::Bridge);
    Weight w = Weight::constant_one();
    Spectrum base = base_spectrum(Process::Bridge, 501, 64);
    {
        Transform tr = make_transform(k, w, 2.0);
        Spectrum t = transformed_kl(tr, 500, 64);
        double ratio = fredholm_ratio(base, t, 500);
        push(out, suite, "C4.bridge-alpha2", std::abs(ratio - 25.0 / 36.0), 1e-2,
             "partial product at N=500 vs (1-alpha q)^2");
    }
    {
        Transform tr = make_transform(k, w, 24.0);  // 2/q
        Spectrum t = transformed_kl(tr, 500, 64);
        double ratio = fredholm_ratio(base, t, 500);
        push(out, suite, "C4.bridge-duality", std::abs(ratio - 1.0), 1e-6,
             "alpha = 2/q gives ratio 1");
    }
}

// --- criterion 5: Parseval ---------------------------------------------

void parseval_checks(Checks& out) {
    const std::string suite = "spectra";
    struct Case {
        const char* name;
        Process proc;
        const char* weight;
    };
    const Case cases[] = {
        {"C5.bridge-const1", Process::Bridge, "const1"},
        {"C5.bridge-tt", Process::Bridge, "poly:t*(1-t)"},
        {"C5.wiener-const1", Process::Wiener, "const1"},
        {"C5.wiener-tt", Process::Wiener, "poly:t*(1-t)"},
    };
    for (const auto& c : cases) {
        Kernel k = make_kernel(c.proc);
        Transform tr = make_transform(k, parse_weight(c.weight), 1.0);
        Spectrum sp = base_spectrum(c.proc, 200, 2048);
        FourierCoefficients fc = fourier_coefficients(sp, tr, 200);
        double got = fc.partial_qsum[199];
        push(out, suite, c.name, rel_err(got, tr.q()), 1e-2,
             "sum a_k^2 mu_k over k<=200 vs q");
    }
}

// --- criterion 6: critical zero mode ------------------------------------

void zero_mode_check(Checks& out) {
    const std::string suite = "spectra";
    NystromFull full =
        nystrom_transformed_min_mode(make_kernel(Process::Bridge), Weight::constant_one(),
                                     12.0, 1000);
    double lam1 = full.eigenvalues_desc[0];
    double lam_min = full.eigenvalues_desc[full.eigenvalues_desc.size() - 1];
    push(out, suite, "C6.zero-eigenvalue", std::abs(lam_min) / lam1, 1e-6,
         "smallest nystrom eigenvalue over largest");
    Vector ones = Vector::Ones(full.grid.size());
    double corr = std::abs(full.grid.inner(full.min_vector, ones)) /
                  (full.grid.norm(full.min_vector) * full.grid.norm(ones));
    push(out, suite, "C6.zero-mode-shape", 1.0 - corr, 1e-3,
         "1 - |corr(eigenvector, phi)| with phi = 1");
}

// --- criterion 7: double root ---------------------------------------------

void double_root_check(Checks& out) {
    const std::string suite = "spectra";
    EigenEquationSpec spec = make_eigen_spec(EquationId::BridgeOne, bridge_double_root_Q(1));
    RootSequence rs = solve_roots(spec, 3);
    double gap = std::abs(rs.first_branch[0] - rs.second_branch[0]);
    push(out, suite, "C7.double-root-gap", gap, 1e-8,
         "branch roots coincide at Q = Q_1");
    bool flagged = !rs.merged.empty() && rs.merged[0].multiplicity == 2 &&
                   std::abs(rs.merged[0].x - pi) < 1e-8;
    out.push_back({suite, "C7.multiplicity-flag", flagged, flagged ? 0.0 : 1.0, 0.5,
                   "merged root at pi carries multiplicity 2"});
}

// --- criterion 8: pathwise-transform covariance Monte Carlo ----------------

void main_lemma_mc(Checks& out, std::uint64_t seed) {
    const std::string suite = "lemma";
    Kernel k = make_kernel(Process::Bridge);
    Transform tr = make_transform(k, Weight::constant_one(), 5.0);
    Spectrum sp = base_spectrum(Process::Bridge, 6000, 64);
    CovarianceReport rep =
        covariance_vs_kernel(sp, tr, uniform_probes(32), 100000, 6000, seed);
    push(out, suite, "C8.transform-covariance", rep.max_z, 4.0,
         "empirical covariance vs the rank-one kernel, max |z| over 32x32 probes");
}

// --- criterion 9: duality Monte Carlo --------------------------------------

void corollary1_mc(Checks& out, std::uint64_t seed) {
    const std::string suite = "montecarlo";
    {
        Transform tr = make_transform(make_kernel(Process::Bridge), Weight::constant_one(), 3.0);
        double z = duality_mc_check(tr, uniform_probes(24), 20000, 2000, seed);
        push(out, suite, "C9.bridge-alpha3-21", z, 4.0,
             "covariances at alpha and 2/q-alpha, combined-SE units");
    }
    {
        Transform tr = make_transform(make_kernel(Process::Wiener), Weight::point_mass(1.0), 0.5);
        double z = duality_mc_check(tr, uniform_probes(24), 20000, 2000, seed + 1);
        push(out, suite, "C9.wiener-delta1-05-15", z, 4.0,
             "Wiener with delta(t-1), alpha 0.5 vs 1.5");
    }
}

// --- criterion 10: Theorem 2 vs Theorem 3 ---------------------------------

void thm23_cross_check(Checks& out) {
    const std::string suite = "smallball";
    AsymptoticDescriptor base = base_smallball(Process::Bridge);
    Transform tr = make_transform(make_kernel(Process::Bridge), Weight::constant_one(), 12.0);
    AsymptoticDescriptor dens = density_asymptotics(base);
    AsymptoticDescriptor closed = theorem3_scale(base, tr.q(), tr.phi_l2_norm());

    auto run_at = [&](double eps) {
        double r = eps * eps;
        int n = 4001;
        Vector rg(n);
        for (int i = 0; i < n; ++i) rg[i] = 1.05 * r * i / (n - 1);
        DistributionCurve curve = curve_from_functions(
            [&base](double x) { return eval_asymptotic(base, std::sqrt(std::max(x, 1e-300))); },
            [&dens](double x) {
                if (x <= 0.0) return 0.0;
                return dens.C * std::pow(x, dens.beta) * std::exp(-dens.D / x);
            },
            rg);
        double pipeline = theorem2_convolution(curve, tr.q(), tr.phi_l2_norm(), eps);
        double direct = eval_asymptotic(closed, eps);
        return rel_err(pipeline, direct);
    };
    push(out, suite, "C10.eps-0.02", run_at(0.02), 0.03,
         "convolution pipeline vs closed form at eps=0.02");
    push(out, suite, "C10.eps-0.05", run_at(0.05), 0.10,
         "convolution pipeline vs closed form at eps=0.05");
}

// --- criterion 11: deconvolution against a chi-square oracle ---------------

void deconvolution_mc(Checks& out, std::uint64_t /*seed*/) {
    const std::string suite = "smallball";
    // frozen oracle streams: the 2-SE band over 20 probe points is a
    // fixed-seed regression, not a per-seed guarantee
    const std::uint64_t oracle_seed = 42, oracle_offset = 1000000;
    const double l1 = 1.0, l2 = 0.25;
    const int n_in = 2000000, n_or = 2000000;
    Vector lam(2);
    lam << l1, l2;
    SampleBatch in = sample_norm2(lam, n_in, oracle_seed, l1 + l2, oracle_offset);
    Vector lam2(1);
    lam2 << l2;
    SampleBatch oracle = sample_norm2(lam2, n_or, oracle_seed, l2,
                                      oracle_offset + (static_cast<std::uint64_t>(1) << 33));

    const int ng = 2000;
    Vector rg(ng);
    for (int i = 0; i < ng; ++i) rg[i] = 8.0 * i / (ng - 1);
    DistributionCurve curve = curve_from_samples(in.norm2, rg);
    Vector H(ng);
    for (int j = 0; j < ng; ++j) H[j] = std::exp(rg[j] / (2.0 * l1));

    Vector probes(20);
    for (int i = 0; i < 20; ++i) probes[i] = 0.02 + (1.0 - 0.02) * i / 19.0;
    DistributionCurve dec = deconvolve_first(curve, l1, probes);
    DistributionCurve orc = curve_from_samples(oracle.norm2, probes);

    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        double r = probes[i];
        // delta-method variance of the deconvolved value
        Vector c = deconvolve_coefficients(curve.r, r);
        double pref = std::sqrt(2.0 * l1 / pi) * std::exp(-r / (2.0 * l1));
        double var = 0.0;
        for (int a = 0; a < ng; ++a) {
            if (c[a] == 0.0) continue;
            for (int b = 0; b < ng; ++b) {
                if (c[b] == 0.0) continue;
                double cov =
                    (curve.F[std::min(a, b)] - curve.F[a] * curve.F[b]) / static_cast<double>(n_in);
                var += c[a] * H[a] * c[b] * H[b] * cov;
            }
        }
        var = var * pref * pref;
        double p = orc.F[i];
        double se = std::sqrt(var + p * (1.0 - p) / static_cast<double>(n_or));
        worst = std::max(worst, std::abs(dec.F[i] - p) / (2.0 * se));
    }
    push(out, suite, "C11.two-term-chisq", worst, 1.0,
         "deconvolved CDF vs fixed-seed oracle, in units of 2 SE");
}

// --- criterion 12: contour-integral limit ----------------------------------

void jensen_checks(Checks& out) {
    const std::string suite = "smallball";
    {
        const int K = 60;
        JensenProbe p;
        p.gamma1 = 0.0;
        p.gamma2 = 1.0;
        p.b.resize(K);
        p.mu.resize(K);
        for (int k = 1; k <= K; ++k) {
            p.b[k - 1] = std::pow(2.0, -k);
            p.mu[k - 1] = static_cast<double>(k) * k;
        }
        p.R = 1e6;
        p.theta_grid = 8192;
        double target = 0.0;  // ln(sum 2^-k) = ln 1
        double e6 = std::abs(jensen_limit(p) - target);
        push(out, suite, "C12.geometric-R1e6", e6, 1e-3, "ln|sum b_k| = 0 probe");
        p.R = 1e7;
        double e7 = std::abs(jensen_limit(p) - target);
        out.push_back({suite, "C12.geometric-shrink", e7 <= e6 + 1e-12, e7, e6 + 1e-12,
                       "error does not grow from R=1e6 to 1e7 (noise floor 1e-12)"});
    }
    {
        const int K = 10000;
        JensenProbe p;
        p.gamma1 = 1.0;
        p.gamma2 = 1.0;
        p.b.resize(K);
        p.mu.resize(K);
        for (int k = 1; k <= K; ++k) {
            p.b[k - 1] = 1.0 / (static_cast<double>(k) * k);
            p.mu[k - 1] = static_cast<double>(k) * k;
        }
        p.R = 1e6;
        p.theta_grid = 8192;
        double target = std::log(1.0 + pi * pi / 6.0);
        double e6 = std::abs(jensen_limit(p) - target);
        push(out, suite, "C12.zeta2-R1e6", e6, 1e-3, "ln(1 + pi^2/6) probe");
        p.R = 1e7;
        double e7 = std::abs(jensen_limit(p) - target);
        out.push_back({suite, "C12.zeta2-shrink", e7 < e6, e7, e6,
                       "error shrinks from R=1e6 to 1e7"});
    }
}

// --- additional suite content (invariants beyond the numbered criteria) ----

void lemma_extras(Checks& out, std::uint64_t seed) {
    const std::string suite = "lemma";
    // duality at covariance level: identical kernels on a 64-grid
    {
        Kernel k = make_kernel(Process::Bridge);
        Weight w = Weight::constant_one();
        Transform a = make_transform(k, w, 3.0);
        Transform b = make_transform(k, w, dual_alpha(a.q(), 3.0));
        Kernel ka = transformed_kernel(a), kb = transformed_kernel(b);
        Vector p = uniform_probes(64);
        double worst = 0.0;
        for (Index i = 0; i < p.size(); ++i)
            for (Index j = 0; j < p.size(); ++j)
                worst = std::max(worst, std::abs(ka.eval(p[i], p[j]) - kb.eval(p[i], p[j])));
        push(out, suite, "duality-covariance-grid", worst, 1e-12,
             "transformed kernels at alpha and 2/q - alpha");
    }
    // 1 + Q q = (1 - alpha q)^2 across a sweep
    {
        double worst = 0.0;
        Kernel k = make_kernel(Process::Bridge);
        for (double alpha : {-2.0, 0.5, 3.0, 12.0, 24.0, 30.0}) {
            Transform tr = make_transform(k, Weight::constant_one(), alpha);
            worst = std::max(worst,
                             std::abs(1.0 + tr.Q() * tr.q() - tr.one_minus_qalpha_sq()));
        }
        push(out, suite, "q-alpha-identity", worst, 1e-12, "1 + Qq = (1 - alpha q)^2");
    }
    // q by both of its defining forms
    {
        double worst = 0.0;
        struct { Process p; const char* w; } cases[] = {
            {Process::Wiener, "const1"},
            {Process::Bridge, "poly:t*(1-t)"},
            {Process::Slepian, "delta:0+delta:1"},
            {Process::Bridge, "normquant"},
        };
        for (auto& c : cases) {
            Kernel k = make_kernel(c.p);
            Weight w = parse_weight(c.w);
            Transform tr = make_transform(k, w, 1.0);
            worst = std::max(worst, std::abs(tr.q() - compute_q_double_route(k, w)));
        }
        push(out, suite, "q-two-routes", worst, 1e-8, "int psi phi vs double integral");
    }
    // randomized pathwise-covariance checks at small scale
    {
        struct { Process p; const char* w; double alpha; } cases[] = {
            {Process::Bridge, "poly:t*(1-t)", 100.0},
            {Process::Wiener, "poly:1-t", 2.5},
            {Process::Bridge, "poly:t^2", -1.5},
        };
        double worst = 0.0;
        int idx = 0;
        for (auto& c : cases) {
            Kernel k = make_kernel(c.p);
            Transform tr = make_transform(k, parse_weight(c.w), c.alpha);
            Spectrum sp = base_spectrum(c.p, 1500, 64);
            CovarianceReport rep =
                covariance_vs_kernel(sp, tr, uniform_probes(16), 20000, 1500, seed + 17 + idx++);
            worst = std::max(worst, rep.max_z);
        }
        push(out, suite, "covariance-sweep", worst, 4.0,
             "catalog sweep empirical covariance, max |z|");
    }
}

void spectra_extras(Checks& out) {
    const std::string suite = "spectra";
    // interlacing, both Q signs, Nystrom oracle
    {
        Kernel k = make_kernel(Process::Bridge);
        Weight w = Weight::constant_one();
        for (double alpha : {2.0, -1.0}) {
            Transform tr = make_transform(k, w, alpha);
            Spectrum base = nystrom_spectrum(k, 600, 20, false);
            Spectrum t = nystrom_spectrum(transformed_kernel(tr), 600, 20, false);
            InterlacingResult r = interlacing_check(base, t, tr.Q());
            std::ostringstream name;
            name << "interlacing-alpha" << alpha;
            out.push_back({suite, name.str(), r.ok, r.ok ? 0.0 : 1.0, 0.5,
                           "rank-one interlacing, first 20 eigenvalues"});
        }
    }
    // eigenfunction-weight shortcut: critical alpha inserts a zero eigenvalue
    {
        Spectrum sp = base_spectrum(Process::Bridge, 6, 256);
        int m = 1;
        double lam = sp.eigenvalues[m];
        Spectrum crit = eigenfunction_weight_shortcut(sp, m, 1.0 / lam);
        double tail = crit.eigenvalues[crit.count() - 1];
        push(out, suite, "shortcut-critical-zero", std::abs(tail), 1e-18,
             "phi = u_m at alpha = 1/lambda_m zeroes the entry");
        Spectrum dual = eigenfunction_weight_shortcut(sp, m, 2.0 / lam);
        double diff = (dual.eigenvalues - sp.eigenvalues).cwiseAbs().maxCoeff();
        push(out, suite, "shortcut-duality", diff, 1e-15, "alpha = 2/q leaves the spectrum");
    }
    // orthonormality of an analytic transformed family
    {
        Transform tr = make_transform(make_kernel(Process::Bridge), Weight::constant_one(), 5.0);
        Spectrum t = transformed_kl(tr, 12, 2048);
        push(out, suite, "transformed-orthonormality", orthonormality_error(t), 1e-6,
             "grid inner products of the KL family");
    }
}

void smallball_extras(Checks& out, std::uint64_t seed) {
    const std::string suite = "smallball";
    {
        auto [d1, D1] = green_constants(1);
        auto [d2, D2] = green_constants(2);
        auto [d3, D3] = green_constants(3);
        double err = std::abs(d1 - 1.0) + std::abs(D1 - 0.125) + std::abs(d2 - 1.0 / 3.0) +
                     std::abs(D2 - 0.375) + std::abs(d3 - 0.2) +
                     std::abs(D3 - 2.5 * std::pow(3.0, -1.2));
        push(out, suite, "green-constants", err, 1e-12, "(d, D) for ell = 1, 2, 3");
    }
    {
        // density asymptotics shift: bridge exponent beta - d - 1 = -2
        AsymptoticDescriptor dens = density_asymptotics(base_smallball(Process::Bridge));
        double err = std::abs(dens.beta + 2.0) +
                     rel_err(dens.C, base_smallball(Process::Bridge).C * 0.125);
        push(out, suite, "density-exponent", err, 1e-12, "density form instance for the bridge");
    }
    {
        // F = o(F') near zero, tested as a trend on an MC curve
        Spectrum sp = base_spectrum(Process::Bridge, 64, 64);
        SampleBatch b = sample_norm2(sp.eigenvalues, 200000, seed + 5, sp.trace, 0);
        Vector rg(60);
        for (int i = 0; i < 60; ++i) rg[i] = 0.01 + (0.30 - 0.01) * i / 59.0;
        DistributionCurve c = curve_from_samples(b.norm2, rg);
        bool ok = density_ratio_trend(c);
        out.push_back({suite, "lemma21-trend", ok, ok ? 0.0 : 1.0, 0.5,
                       "F/F' grows with r on the tabulated range"});
    }
}

void montecarlo_extras(Checks& out, std::uint64_t seed) {
    const std::string suite = "montecarlo";
    {
        // norm^2 means: bridge 1/6, Wiener 1/2
        Spectrum sb = base_spectrum(Process::Bridge, 2000, 64);
        SampleBatch bb = sample_norm2(sb.eigenvalues.head(1000), 100000, seed + 2, sb.trace, 0);
        double mean_b = bb.norm2.mean();
        double se_b = std::sqrt((bb.norm2.array() - mean_b).square().mean() / 100000.0);
        push(out, suite, "norm2-mean-bridge",
             std::abs(mean_b + bb.tail_bound - 1.0 / 6.0) / (4.0 * se_b), 1.0,
             "empirical mean + tail vs trace, 4 SE units");
        Spectrum sw = base_spectrum(Process::Wiener, 2000, 64);
        SampleBatch bw = sample_norm2(sw.eigenvalues.head(1000), 100000, seed + 3, sw.trace, 0);
        double mean_w = bw.norm2.mean();
        double se_w = std::sqrt((bw.norm2.array() - mean_w).square().mean() / 100000.0);
        push(out, suite, "norm2-mean-wiener",
             std::abs(mean_w + bw.tail_bound - 0.5) / (4.0 * se_w), 1.0,
             "empirical mean + tail vs trace, 4 SE units");
    }
    {
        // critical functional annihilation and independence
        Kernel k = make_kernel(Process::Bridge);
        Transform tr = make_transform(k, Weight::constant_one(), 12.0);
        Spectrum sp = base_spectrum(Process::Bridge, 512, 1024);
        SampleBatch b = sample_paths(sp, 10000, 512, seed + 4);
        auto [resid, corr] = critical_functional_check(tr, b);
        push(out, suite, "critical-functional-residual", resid, 5e-3,
             "max |<phi, transformed path>| over 1e4 paths");
        push(out, suite, "critical-independence", std::abs(corr), 0.03,
             "corr(transformed path, <phi,X>)");
    }
    {
        // two-route norm^2 distributions agree (KS below the 1% critical value)
        Kernel k = make_kernel(Process::Bridge);
        Transform tr = make_transform(k, Weight::constant_one(), 5.0);
        const int terms = 192, n = 10000;
        Spectrum base = base_spectrum(Process::Bridge, terms, 768);
        Weight w = Weight::constant_one();
        SampleBatch paths = sample_paths(base, n, terms, seed + 6, nullptr, &w);
        SampleBatch tp = transform_paths(paths, tr);
        Vector norm_a(n);
        for (int p = 0; p < n; ++p) {
            double acc = 0.0;
            for (Index i = 0; i < tp.eval_grid.size(); ++i)
                acc += tp.eval_grid.weights[i] * tp.paths(p, i) * tp.paths(p, i);
            norm_a[p] = acc;
        }
        Spectrum tkl = transformed_kl(tr, terms, 256);
        SampleBatch nb = sample_norm2(tkl.eigenvalues.head(terms), n, seed + 7,
                                      std::numeric_limits<double>::quiet_NaN(),
                                      static_cast<std::uint64_t>(1) << 34);
        double ks = two_sample_ks(norm_a, nb.norm2);
        double crit = 1.6276 * std::sqrt(2.0 / static_cast<double>(n));
        push(out, suite, "two-route-ks", ks, crit,
             "pathwise norms vs chi-square series, KS statistic");
    }
    {
        // moderate-eps trend: the probability ratio approaches the Theorem-1
        // factor from below as eps decreases; the asymptotic band is checked
        // at the deepest radius the sample sizes support
        Kernel k = make_kernel(Process::Bridge);
        Transform tr = make_transform(k, Weight::constant_one(), 6.0);
        Spectrum base = base_spectrum(Process::Bridge, 384, 64);
        Spectrum t = transformed_kl(tr, 384, 64);
        const int n = 400000;
        SampleBatch nb = sample_norm2(base.eigenvalues, n, seed + 8, base.trace, 0);
        SampleBatch nt = sample_norm2(t.eigenvalues, n, seed + 9, t.trace,
                                      static_cast<std::uint64_t>(1) << 35);
        double factor = 1.0 / std::abs(1.0 - tr.alpha() * tr.q());
        const double eps_list[] = {0.5, 0.35, 0.25};
        double dev[3];
        for (int i = 0; i < 3; ++i) {
            SmallBallEstimate eb = empirical_small_ball(nb, eps_list[i]);
            SmallBallEstimate et = empirical_small_ball(nt, eps_list[i]);
            dev[i] = std::abs(et.estimate / eb.estimate / factor - 1.0);
        }
        bool monotone = dev[0] > dev[1] && dev[1] > dev[2];
        out.push_back({suite, "smallball-ratio-trend", monotone, dev[2], dev[0],
                       "|ratio/factor - 1| falls along eps = 0.5, 0.35, 0.25"});
        push(out, suite, "smallball-ratio-band", dev[2], 0.15,
             "ratio within 15% of the Theorem-1 factor at eps = 0.25");
    }
}

}  // namespace

Checks run_suite_lemma(std::uint64_t seed) {
    Checks out;
    main_lemma_mc(out, seed);
    lemma_extras(out, seed);
    return out;
}

Checks run_suite_spectra(std::uint64_t seed) {
    Checks out;
    (void)seed;
    eigen_reductions(out);
    oracle_agreement(out);
    fredholm_checks(out);
    parseval_checks(out);
    zero_mode_check(out);
    double_root_check(out);
    spectra_extras(out);
    return out;
}

Checks run_suite_smallball(std::uint64_t seed) {
    Checks out;
    prop1_constants(out);
    thm23_cross_check(out);
    deconvolution_mc(out, seed);
    jensen_checks(out);
    smallball_extras(out, seed);
    return out;
}

Checks run_suite_montecarlo(std::uint64_t seed) {
    Checks out;
    corollary1_mc(out, seed);
    montecarlo_extras(out, seed);
    return out;
}

Checks run_suite(const std::string& suite, std::uint64_t seed) {
    if (suite == "lemma") return run_suite_lemma(seed);
    if (suite == "spectra") return run_suite_spectra(seed);
    if (suite == "smallball") return run_suite_smallball(seed);
    if (suite == "montecarlo") return run_suite_montecarlo(seed);
    if (suite == "all") {
        Checks out = run_suite_lemma(seed);
        Checks s = run_suite_spectra(seed);
        out.insert(out.end(), s.begin(), s.end());
        s = run_suite_smallball(seed);
        out.insert(out.end(), s.begin(), s.end());
        s = run_suite_montecarlo(seed);
        out.insert(out.end(), s.begin(), s.end());
        return out;
    }
    throw ConfigError("unknown suite '" + suite +
                      "' (expected lemma|spectra|smallball|montecarlo|all)");
}

bool all_pass(const Checks& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::string render_report_text(const Checks& checks, const std::string& suite,
                               std::uint64_t seed) {
    std::ostringstream os;
    os << "klx validation report\n";
    os << "suite=" << suite << " seed=" << seed << "\n";
    int failed = 0;
    for (const auto& c : checks) {
        if (!c.pass) ++failed;
        os << "[" << c.suite << "] " << (c.pass ? "PASS" : "FAIL") << " " << c.name
           << " measured=" << fmt_double(c.measured) << " tol=" << fmt_double(c.tol) << " :: "
           << c.note << "\n";
    }
    os << "RESULT " << (failed == 0 ? "PASS" : "FAIL") << " checks=" << checks.size()
       << " failed=" << failed << "\n";
    return os.str();
}

std::string render_report_json(const Checks& checks, const std::string& suite,
                               std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["suite"] = suite;
    j["seed"] = seed;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["suite"] = c.suite;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["measured"] = c.measured;
        e["tol"] = c.tol;
        e["note"] = c.note;
        j["checks"].push_back(e);
    }
    j["pass"] = all_pass(checks);
    return j.dump(2) + "\n";
}

}  // namespace klx
