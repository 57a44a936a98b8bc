#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "klx/normal.hpp"
#include "klx/weight.hpp"

using namespace klx;
using Catch::Approx;

TEST_CASE("polynomial expression grammar") {
    auto c = parse_polynomial("t*(1-t)");
    REQUIRE(c.size() == 3);
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 1.0);
    CHECK(c[2] == -1.0);

    c = parse_polynomial("t^2/2 - t^3/6");
    CHECK(c[2] == Approx(0.5));
    CHECK(c[3] == Approx(-1.0 / 6.0));

    c = parse_polynomial("(1-t)^2*3/4");
    CHECK(c[0] == Approx(0.75));
    CHECK(c[1] == Approx(-1.5));
    CHECK(c[2] == Approx(0.75));

    CHECK(parse_polynomial("17/5040")[0] == Approx(17.0 / 5040.0));
    CHECK(parse_polynomial("-t")[1] == -1.0);

    CHECK_THROWS_AS(parse_polynomial("t/(1-t)"), ConfigError);  // not a polynomial
    CHECK_THROWS_AS(parse_polynomial("t^-1"), ConfigError);
    CHECK_THROWS_AS(parse_polynomial("x+1"), ConfigError);
    CHECK_THROWS_AS(parse_polynomial(""), ConfigError);
}

TEST_CASE("weight spec grammar") {
    Weight w = parse_weight("const1");
    CHECK(w.fn_value(0.3) == 1.0);
    CHECK(w.square_integrable());

    w = parse_weight("poly:t*(1-t)");
    CHECK(w.fn_value(0.5) == Approx(0.25));
    REQUIRE(w.poly_coeffs().has_value());

    w = parse_weight("delta:1.0");
    REQUIRE(w.atoms().size() == 1);
    CHECK(w.atoms()[0].kind == WeightAtom::Kind::PointMass);
    CHECK(w.atoms()[0].t0 == 1.0);
    CHECK_FALSE(w.square_integrable());

    w = parse_weight("ddelta:1");
    CHECK(w.atoms()[0].kind == WeightAtom::Kind::Dipole);

    w = parse_weight("delta:0+delta:1");
    REQUIRE(w.atoms().size() == 2);

    w = parse_weight("2*delta:0.5");
    CHECK(w.atoms()[0].coeff == Approx(2.0));

    // '+' inside a polynomial does not split atoms
    w = parse_weight("poly:t^2+t+1");
    CHECK(w.atoms().empty());
    CHECK(w.fn_value(1.0) == Approx(3.0));

    w = parse_weight("poly:t*(1-t)+delta:1");
    CHECK(w.has_function_part());
    CHECK(w.atoms().size() == 1);

    CHECK_THROWS_AS(parse_weight("delta:2"), ConfigError);   // off the interval
    CHECK_THROWS_AS(parse_weight("fourier:3"), ConfigError); // unknown kind
    CHECK_THROWS_AS(parse_weight(""), ConfigError);
    CHECK_THROWS_AS(parse_weight("csv:missing_weight.csv"), ConfigError);
}

TEST_CASE("normal quantile weight") {
    Weight w = parse_weight("normquant");
    CHECK(w.is_normal_quantile());
    CHECK_FALSE(w.square_integrable());
    // phi(t) = 1/pdf(quantile(t)); at t = 1/2 this is sqrt(2 pi)
    CHECK(w.fn_value(0.5) == Approx(std::sqrt(2.0 * pi)).epsilon(1e-12));
}

TEST_CASE("tabulated weights interpolate and validate") {
    Vector v(3);
    v << 0.0, 1.0, 0.0;
    Weight w = Weight::tabulated(v);
    CHECK(w.fn_value(0.25) == Approx(0.5));
    CHECK(w.function_breakpoints().size() == 1);
    v[1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Weight::tabulated(v), ConfigError);
}
