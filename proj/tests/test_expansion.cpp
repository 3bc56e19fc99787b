#include <cmath>

#include "doctest.h"
#include "opplab/analytic.hpp"
#include "opplab/expansion.hpp"

using namespace opplab;

TEST_CASE("delta formula and endpoint identity") {
    CHECK(delta(1.0, 1.0, 0.0) == 1.0);
    CHECK(delta(1.0, 2.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(delta(2.0, 5.0, 1.0) == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
    CHECK(delta(2.0, 2.0, 0.7) == 1.0);
    CHECK_THROWS_AS(delta(2.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(delta(1.0, 2.0, -0.1), DomainError);
}

TEST_CASE("next_digit inverts the digit law by hand") {
    auto luroth = ExpansionScheme::luroth();
    // U = 0.5 sits in (1/3, 1/2], so B = 2 and R = 2
    Step s = next_digit(luroth, 1, 1.0, 0.0, 0.5);
    CHECK(s.digit == 2.0);
    CHECK(s.ratio == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_FALSE(s.overflow);

    // U = 0.7 in (1/2, 1] -> B = 1, R = 1
    s = next_digit(luroth, 1, 1.0, 0.0, 0.7);
    CHECK(s.digit == 1.0);
    CHECK(s.ratio == 1.0);

    // U -> 1-: digit hits the lower endpoint phi(h)
    s = next_digit(luroth, 1, 1.0, 0.0, 1.0 - 1e-15);
    CHECK(s.digit == 1.0);
    CHECK(s.ratio == 1.0);

    CHECK_THROWS_AS(next_digit(luroth, 1, 1.0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(next_digit(luroth, 1, 1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("simulate rejects zero-length runs and is deterministic") {
    auto luroth = ExpansionScheme::luroth();
    RngStream s0(42, 0, Purpose::Simulate);
    CHECK_THROWS_AS(simulate(luroth, 0, s0), DomainError);

    RngStream a(42, 3, Purpose::Simulate);
    RngStream b(42, 3, Purpose::Simulate);
    Trajectory ta = simulate(luroth, 500, a);
    Trajectory tb = simulate(luroth, 500, b);
    REQUIRE(ta.ratios.size() == tb.ratios.size());
    for (std::size_t i = 0; i < ta.ratios.size(); ++i) {
        CHECK(ta.ratios[i] == tb.ratios[i]);  // bit-identical
        CHECK(ta.digits[i] == tb.digits[i]);
        CHECK(ta.draws[i] == tb.draws[i]);
    }
}

TEST_CASE("trajectory invariants: growth constraint, R >= 1, bracketing") {
    for (auto scheme : {ExpansionScheme::luroth(),
                        ExpansionScheme::constant(2.0, 0.5, DistributionSpec::power(0.5)),
                        ExpansionScheme::identity_phi(0.0, DistributionSpec::uniform())}) {
        RngStream stream(11, 0, Purpose::Simulate);
        Trajectory t = simulate(scheme, 10000, stream);
        double h = static_cast<double>(scheme.b1);
        for (std::size_t i = 0; i < t.ratios.size(); ++i) {
            double phi = scheme.phi(static_cast<std::int64_t>(i) + 1, h);
            CHECK(t.digits[i + 1] >= phi);
            CHECK(t.ratios[i] >= 1.0);
            double inv_u = 1.0 / t.draws[i];
            double a_n = 1.0 / (phi * (1.0 + t.y_values[i]));
            CHECK(t.ratios[i] <= inv_u * (1.0 + 1e-12));
            CHECK(inv_u - a_n < t.ratios[i] + 1e-9);
            h = t.digits[i + 1];
        }
    }
}

TEST_CASE("digit masses partition the unit interval") {
    // sum over digits of F(delta(k)) - F(delta(k+1)) telescopes to
    // F(delta(phi)) - remainder; checked by brute summation to k_max = 1e7
    // with the analytic remainder accounted for.
    struct Case {
        ExpansionScheme scheme;
        std::int64_t n;
        double h;
        double y;
    };
    std::vector<Case> cases;
    cases.push_back({ExpansionScheme::luroth(), 1, 1.0, 0.0});
    cases.push_back({ExpansionScheme::constant(2.0, 0.5, DistributionSpec::power(0.5)), 2, 3.0, 0.5});
    cases.push_back({ExpansionScheme::constant(1.0, 0.0, DistributionSpec::ratio_a(CSeq::constant(1.0))), 1, 1.0, 0.0});

    const double k_max = 1e7;
    for (const auto& c : cases) {
        double phi = c.scheme.phi(c.n, c.h);
        KahanSum sum;
        for (double k = phi; k < phi + k_max; k += 1.0) {
            double mass = c.scheme.dist.cdf(c.n, delta(phi, k, c.y)) -
                          c.scheme.dist.cdf(c.n, delta(phi, k + 1.0, c.y));
            CHECK(mass >= -1e-16);
            sum.add(mass);
        }
        double remainder = c.scheme.dist.cdf(c.n, delta(phi, phi + k_max, c.y));
        CHECK(c.scheme.dist.cdf(c.n, delta(phi, phi, c.y)) == 1.0);
        CHECK(std::abs(sum.value() + remainder - 1.0) <= 1e-8);
    }
}

TEST_CASE("induced Luroth digit law matches 1/(k(k+1)) pointwise") {
    auto luroth = ExpansionScheme::luroth();
    for (double k = 1.0; k <= 6.0; k += 1.0) {
        double mass = luroth.dist.cdf(1, delta(1.0, k, 0.0)) - luroth.dist.cdf(1, delta(1.0, k + 1.0, 0.0));
        CHECK(mass == doctest::Approx(1.0 / (k * (k + 1.0))).epsilon(1e-14));
    }
}

TEST_CASE("empirical tail of a constant scheme matches the closed form") {
    auto scheme = ExpansionScheme::constant(2.0, 0.5, DistributionSpec::uniform());
    const std::int64_t big_n = 1000000;
    const double x = 2.0;
    double exact = exact_tail_constant_scheme(2.0, 0.5, scheme.dist, 1, x);
    double s_thresh = ceil_eps(x * 2.0 + (x - 1.0) * 0.5 * 2.0);
    std::int64_t hits = 0;
    RngStream stream(5, 0, Purpose::Oracle);
    simulate_visit(scheme, big_n, stream, [&](std::int64_t, const Step& st) {
        if (st.digit >= s_thresh - 0.5) ++hits;
    });
    double phat = static_cast<double>(hits) / static_cast<double>(big_n);
    double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(big_n));
    CHECK(std::abs(phat - exact) <= 4.0 * se);
}

TEST_CASE("scheme construction guards") {
    CHECK_THROWS_AS(ExpansionScheme::constant(0.0, 0.0, DistributionSpec::uniform()), DomainError);
    CHECK_THROWS_AS(ExpansionScheme::constant(1.5, 0.0, DistributionSpec::uniform()), DomainError);
    CHECK_THROWS_AS(ExpansionScheme::constant(1.0, -0.5, DistributionSpec::uniform()), DomainError);
}
