#include <cmath>

#include "doctest.h"
#include "opplab/grammar.hpp"

using namespace opplab;

TEST_CASE("family grammar") {
    CHECK(grammar::parse_family("uniform").family() == Family::Uniform);
    auto p = grammar::parse_family("power:alpha=0.5");
    CHECK(p.family() == Family::Power);
    CHECK(p.power_alpha() == 0.5);

    auto ra = grammar::parse_family("ratioA:c=k^-1");
    CHECK(ra.family() == Family::RatioA);
    CHECK(ra.c_at(4) == doctest::Approx(0.25).epsilon(1e-15));

    auto rb = grammar::parse_family("ratioB:c=1");
    CHECK(rb.family() == Family::RatioB);
    CHECK(rb.c_at(3) == 1.0);
    CHECK(grammar::parse_family("ratioB:c=const=2.5").c_at(1) == 2.5);

    CHECK_THROWS_AS(grammar::parse_family("gaussian"), ConfigError);
    CHECK_THROWS_AS(grammar::parse_family("power:alpha=1.5"), ConfigError);
}

TEST_CASE("scheme grammar") {
    auto luroth = grammar::parse_scheme("luroth");
    CHECK(luroth.name == "luroth");
    CHECK(luroth.constant_parameters());

    auto s = grammar::parse_scheme("phi=const:2,y=const:0.5,dist=power:alpha=0.5,b1=3");
    CHECK(*s.const_phi == 2.0);
    CHECK(*s.const_y == 0.5);
    CHECK(s.b1 == 3);
    CHECK(s.dist.family() == Family::Power);

    auto engel = grammar::parse_scheme("phi=identity,y=const:0");
    CHECK_FALSE(engel.constant_parameters());
    CHECK(engel.phi(1, 7.0) == 7.0);

    CHECK_THROWS_AS(grammar::parse_scheme("phi=const:1.5"), ConfigError);
    CHECK_THROWS_AS(grammar::parse_scheme("y=const:-1"), ConfigError);
    CHECK_THROWS_AS(grammar::parse_scheme("nonsense"), ConfigError);
}

TEST_CASE("weight grammar") {
    auto w = grammar::parse_weights("a=1/k,b=log^2(n),limit=0.5");
    CHECK(w.a(4) == 0.25);
    CHECK(w.b(100) == doctest::Approx(std::pow(std::log(100.0), 2.0)).epsilon(1e-15));
    CHECK(*w.limit == 0.5);

    auto w2 = grammar::parse_weights("a=log^1(k)/k,b=log^3(n)");
    CHECK(w2.a(10) == doctest::Approx(std::log(10.0) / 10.0).epsilon(1e-15));
    CHECK(w2.a(1) == 0.0);  // log 1 = 0: first weight vanishes

    auto w3 = grammar::parse_weights("a=const:1,b=n^2.2,alpha=0.5");
    CHECK(w3.a(9) == 1.0);
    CHECK(w3.b(10) == doctest::Approx(std::pow(10.0, 2.2)).epsilon(1e-15));
    CHECK(w3.alpha == 0.5);

    auto dist = grammar::parse_family("ratioA:c=k^-1");
    auto w4 = grammar::parse_weights("a=1/c_k,b=Cn_logCn", &dist);
    CHECK(w4.a(5) == 5.0);
    double c3 = 1.0 + 2.0 + 3.0;  // C_3 for c_k = 1/k
    CHECK(w4.b(3) == doctest::Approx(c3 * std::log(c3)).epsilon(1e-12));

    CHECK_THROWS_AS(grammar::parse_weights("a=1/k"), ConfigError);           // b missing
    CHECK_THROWS_AS(grammar::parse_weights("a=1/c_k,b=log^2(n)"), ConfigError);  // no c_seq
    CHECK_THROWS_AS(grammar::parse_weights("a=1/k,b=log^2(n),alpha=1.5"), ConfigError);
}

TEST_CASE("plan and list grammars") {
    auto plan = grammar::parse_plan("trunc.b=3,gamma=1.2");
    CHECK(plan.b == 3.0);
    CHECK(plan.gamma == 1.2);
    CHECK_THROWS_AS(grammar::parse_plan("trunc.b=1.5"), ConfigError);

    auto grid = grammar::parse_index_list("1e4,1e5");
    REQUIRE(grid.size() == 2);
    CHECK(grid[0] == 10000);
    CHECK(grid[1] == 100000);
    CHECK_THROWS_AS(grammar::parse_index_list("1.5"), ConfigError);

    auto xs = grammar::parse_real_list("1.5,2,5,10");
    CHECK(xs.size() == 4);
    CHECK(xs[3] == 10.0);
}
