#include <doctest.h>

#include "harness.hpp"

#include <quadtwist/error.hpp>

using namespace quadtwist;
using namespace quadtwist::harness;

TEST_CASE("shift parsing")
{
    auto a = parse_shifts("0.02,0:0.05,-0.5");
    REQUIRE(a.size() == 2);
    CHECK(a[1] == Complex(0.05, -0.5));
    CHECK(parse_shifts("0.1").front() == Complex(0.1, 0));
    CHECK(parse_shifts(format_shifts(a)) == a);
    CHECK_THROWS_AS(parse_shifts("x,1"), ConfigError);
    CHECK(format_double(0.5) == "5.0000000000000000e-01");
}

TEST_CASE("inversions")
{
    CHECK(inversions({0.3, 0.2, 0.1}) == 0);
    CHECK(inversions({0.3, 0.4, 0.1, 0.2}) == 2);
    CHECK(inversions({}) == 0);
}

TEST_CASE("config validation")
{
    RunConfig cfg;
    cfg.command = "compare";
    CHECK_NOTHROW(validate(cfg));
    cfg.eta = 1.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.eta = 2.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.eta = 1.3;
    cfg.ell = 4;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.ell = 3;
    cfg.max_swap = 2;
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    RunConfig decay;
    decay.command = "swap-decay";
    decay.max_swap = 2;
    CHECK_NOTHROW(validate(decay));
    decay.max_swap = 3;
    CHECK_THROWS_AS(validate(decay), ConfigError);

    RunConfig bad;
    bad.command = "nope";
    CHECK_THROWS_AS(dispatch(bad), ConfigError);

    RunConfig pc;
    pc.command = "poisson-check";
    pc.moduli = {2};
    CHECK_THROWS_AS(validate(pc), ConfigError);
}

TEST_CASE("tolerance override")
{
    RunConfig cfg;
    cfg.command = "poisson-check";
    cfg.big_d = {200};
    cfg.moduli = {3};
    Report ok = dispatch(cfg);
    CHECK(ok.pass);
    cfg.tolerance = 1e-30;
    Report strict = dispatch(cfg);
    CHECK_FALSE(strict.pass);
    CHECK(strict.results.front().tolerance == 1e-30);

    Suite s = suite_local_identities({.seed = 3, .tolerance = 1e-30});
    CHECK_FALSE(s.pass());
    CHECK(suite_local_identities({.seed = 3}).pass());
}

TEST_CASE("swap-decay report")
{
    RunConfig cfg;
    cfg.command = "swap-decay";
    cfg.shifts = {0.002, 0.004};
    cfg.max_swap = 2;
    Report r = dispatch(cfg);
    CHECK(r.pass);
    CHECK(r.results.front().value.real() == doctest::Approx(-0.2).epsilon(0.25));
    CHECK(r.csv.rfind("d,jswap_magnitude\r\n", 0) == 0);
    auto j = report_json(r);
    CHECK(j["config"]["command"] == "swap-decay");
    CHECK(j["results"].size() == 1);
}
