#include <cmath>
#include <vector>

#include "doctest.h"
#include "opplab/distributions.hpp"
#include "opplab/rng.hpp"
#include "oracles.hpp"

using namespace opplab;

namespace {

std::vector<DistributionSpec> all_specs() {
    std::vector<DistributionSpec> specs;
    specs.push_back(DistributionSpec::uniform());
    specs.push_back(DistributionSpec::power(0.5));
    specs.push_back(DistributionSpec::power(0.25));
    specs.push_back(DistributionSpec::ratio_a(CSeq::constant(1.0)));
    specs.push_back(DistributionSpec::ratio_a(CSeq::power_decay(1.0)));
    specs.push_back(DistributionSpec::ratio_b(CSeq::constant(1.0)));
    specs.push_back(DistributionSpec::ratio_b(CSeq::power_decay(0.5)));
    return specs;
}

}  // namespace

TEST_CASE("cdf closed forms at hand-computed points") {
    auto uni = DistributionSpec::uniform();
    CHECK(uni.cdf(1, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(uni.cdf(1, -0.1) == 0.0);
    CHECK(uni.cdf(1, 1.5) == 1.0);

    auto ra = DistributionSpec::ratio_a(CSeq::constant(1.0));
    CHECK(ra.cdf(1, 0.4) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    auto rb = DistributionSpec::ratio_b(CSeq::constant(1.0));
    CHECK(rb.cdf(1, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rb.cdf(1, 1.01) == 1.0);
}

TEST_CASE("quantile closed forms and the RatioB atom") {
    auto ra = DistributionSpec::ratio_a(CSeq::constant(1.0));
    CHECK(ra.quantile(1, 2.0 / 3.0) == doctest::Approx(0.4).epsilon(1e-14));

    auto rb = DistributionSpec::ratio_b(CSeq::constant(1.0));
    CHECK(rb.quantile(1, 0.9) == 1.0);  // atom region: p > 1/(1+c)
    CHECK(rb.quantile(1, 0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    CHECK(DistributionSpec::uniform().quantile(1, 0.7) == 0.7);
    CHECK_THROWS_AS(DistributionSpec::uniform().quantile(1, 1.5), DomainError);
}

TEST_CASE("cdf/quantile roundtrips hold to 1e-12") {
    for (const auto& spec : all_specs()) {
        for (std::int64_t n : {1, 3, 7}) {
            for (int i = 1; i < 200; ++i) {
                double p = i / 200.0;
                if (spec.family() == Family::RatioB && p > 1.0 / (1.0 + spec.c_at(n)) - 1e-9)
                    continue;
                CHECK(std::abs(spec.cdf(n, spec.quantile(n, p)) - p) <= 1e-12);
            }
            // quantile(cdf(x)) = x on the support interior
            double hi = spec.family() == Family::RatioA ? 1.0 / (1.0 + spec.c_at(n)) : 1.0;
            for (int i = 1; i < 100; ++i) {
                double x = hi * i / 100.0;
                CHECK(std::abs(spec.quantile(n, spec.cdf(n, x)) - x) <= 1e-12);
            }
        }
    }
}

TEST_CASE("Y survival function at hand-computed points") {
    CHECK(DistributionSpec::uniform().y_tail(1, 4.0) == doctest::Approx(0.25).epsilon(1e-15));
    auto ra = DistributionSpec::ratio_a(CSeq::constant(1.0));
    CHECK(ra.y_tail(1, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ra.y_tail(1, 1.5) == 1.0);  // below the support gap 1+c
    auto rb = DistributionSpec::ratio_b(CSeq::constant(1.0));
    CHECK(rb.y_tail(1, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("truncated mean closed forms at hand-computed points") {
    CHECK(DistributionSpec::uniform().y_truncated_mean(1, std::exp(1.0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(DistributionSpec::power(0.5).y_truncated_mean(1, 4.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
    auto rb = DistributionSpec::ratio_b(CSeq::constant(1.0));
    CHECK(rb.y_truncated_mean(1, 1.0) == doctest::Approx(0.5).epsilon(1e-14));  // atom only
    CHECK(DistributionSpec::uniform().y_truncated_mean(1, 0.5) == 0.0);
}

TEST_CASE("truncated mean closed forms match survival-function quadrature") {
    for (const auto& spec : all_specs())
        for (std::int64_t n : {1, 5})
            for (double x : {1.5, 2.25, 3.0, 10.0, 27.5}) {
                double closed = spec.y_truncated_mean(n, x);
                double oracle = oracles::trunc_mean_quadrature(spec, n, x);
                CHECK(std::abs(closed - oracle) <= 1e-8);
            }
}

TEST_CASE("psi basics: value at 0, conjugate symmetry, modulus bound") {
    for (const auto& spec : all_specs()) {
        auto at0 = spec.psi(1, 0.0);
        CHECK(at0.real() == 1.0);
        CHECK(at0.imag() == 0.0);

        auto plus = spec.psi(1, 0.05);
        auto minus = spec.psi(1, -0.05);
        CHECK(plus.real() == doctest::Approx(minus.real()).epsilon(1e-12));
        CHECK(plus.imag() == doctest::Approx(-minus.imag()).epsilon(1e-12));

        for (double t : {0.01, 0.05, 0.2, 0.5, 1.0})
            CHECK(std::abs(spec.psi(1, t)) <= 1.0 + 1e-9);
    }
}

TEST_CASE("psi matches an independent Monte Carlo average") {
    for (const auto& spec : all_specs()) {
        double t = 0.05;
        auto mc = oracles::mc_psi(spec, 1, t, 1000000, 99);
        auto quad = spec.psi(1, t);
        CHECK(std::abs(quad - mc.mean) <= 3.0 * mc.se + 1e-6);
    }
}

TEST_CASE("cdf is nondecreasing on a grid for every family") {
    for (const auto& spec : all_specs()) {
        for (std::int64_t n : {1, 2, 4, 8, 16}) {
            double prev = -1.0;
            for (int i = 0; i <= 1000; ++i) {
                double x = 1.2 * i / 1000.0;
                double v = spec.cdf(n, x);
                CHECK(v >= prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("tail profile: uniformity deviation decays toward 0") {
    for (const auto& spec : all_specs()) {
        TailProfile tp = spec.tail_profile();
        double prev = 1e300;
        for (double t : {1e-2, 1e-3, 1e-4}) {
            double worst = 0.0;
            for (std::int64_t n = 1; n <= 10; ++n)
                worst = std::max(worst, std::abs(spec.cdf(n, t) / std::pow(t, tp.alpha) - tp.c_unif));
            CHECK(worst <= prev + 1e-15);
            prev = worst;
        }
    }
}

TEST_CASE("Lipschitz bound holds on random pairs when the constant exists") {
    for (const auto& spec : all_specs()) {
        auto m = spec.tail_profile().lipschitz_m;
        if (!m) continue;
        RngStream stream(7, 0, Purpose::Oracle);
        for (int i = 0; i < 10000; ++i) {
            double x = stream.next_open01();
            double y = stream.next_open01();
            if (x < y) std::swap(x, y);
            CHECK(spec.cdf(3, x) - spec.cdf(3, y) <= *m * (x - y) * (1.0 + 1e-12) + 1e-15);
        }
    }
}

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(DistributionSpec::power(0.0), DomainError);
    CHECK_THROWS_AS(DistributionSpec::power(1.0), DomainError);
    CHECK_THROWS_AS(CSeq::constant(0.0), DomainError);
    CHECK_THROWS_AS(CSeq::power_decay(-1.0), DomainError);
    CSeq unbounded;
    unbounded.fn = [](std::int64_t k) { return static_cast<double>(k); };
    unbounded.sup = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(DistributionSpec::ratio_a(unbounded), DomainError);
}
