#include <catch2/catch_amalgamated.hpp>

#include "klx/runconfig.hpp"
#include "klx/types.hpp"

using namespace klx;

TEST_CASE("config parsing and canonical round trip") {
    std::string text =
        "# comment line\n"
        "process = wiener\n"
        "weight = poly:t*(1-t)\n"
        "alpha = 3.5\n"
        "eps = 0.1, 0.05,0.02\n"
        "seed = 99\n"
        "\n"
        "out = results.json\n";
    RunConfig cfg = parse_config_text(text);
    CHECK(cfg.process == "wiener");
    CHECK(cfg.alpha == 3.5);
    REQUIRE(cfg.eps.size() == 3);
    CHECK(cfg.eps[1] == 0.05);
    CHECK(cfg.seed == 99);

    // canonicalization is a fixpoint: parse(serialize(.)) reproduces itself
    std::string canon = cfg.canonical();
    RunConfig cfg2 = parse_config_text(canon);
    CHECK(cfg2.canonical() == canon);
}

TEST_CASE("config rejects malformed input") {
    CHECK_THROWS_AS(parse_config_text("process wiener\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("alpha = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("paths = -4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("frobnicate = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_file("missing.cfg"), ConfigError);
}
