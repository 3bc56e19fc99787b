#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "opplab/experiments.hpp"
#include "opplab/grammar.hpp"
#include "opplab/rng.hpp"

using namespace opplab;

namespace {

ExperimentConfig small_weak_law() {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::luroth();
    cfg.weights = grammar::parse_weights("a=1/k,b=log^2(n),limit=0.5");
    cfg.n_grid = {500, 1000};
    cfg.replications = 40;
    cfg.base_seed = 123;
    return cfg;
}

}  // namespace

TEST_CASE("weak law runs are bit-reproducible and thread-count independent") {
    auto cfg = small_weak_law();
    std::string first = run_weak_law(cfg).csv();
    std::string second = run_weak_law(cfg).csv();
    CHECK(first == second);

    setenv("OPPLAB_THREADS", "1", 1);
    std::string serial = run_weak_law(cfg).csv();
    setenv("OPPLAB_THREADS", "4", 1);
    std::string parallel = run_weak_law(cfg).csv();
    unsetenv("OPPLAB_THREADS");
    CHECK(serial == parallel);
    CHECK(serial == first);
}

TEST_CASE("weak law: single-replication boundary equals the direct formula") {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::luroth();
    cfg.weights.a = [](std::int64_t) { return 1.0; };
    cfg.weights.b = [](std::int64_t) { return 2.0; };
    cfg.weights.label = "unit";
    cfg.n_grid = {1};
    cfg.replications = 1;
    cfg.base_seed = 9;
    auto res = run_weak_law(cfg);

    RngStream stream(9, 0, Purpose::WeakLaw);
    Step s = next_digit(cfg.scheme, 1, 1.0, 0.0, stream.next_open01());
    CHECK(res.samples.at(1).at(0) == s.ratio / 2.0);
}

TEST_CASE("weak law: exceedance frequencies are monotone in epsilon") {
    auto cfg = small_weak_law();
    cfg.epsilons = {0.01, 0.05, 0.2, 0.7};
    auto res = run_weak_law(cfg);
    for (std::int64_t n : cfg.n_grid) {
        double prev = 2.0;
        for (double e : cfg.epsilons) {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "exceed_centering_eps%g", e);
            double freq = -1.0;
            for (const auto& r : res.rows)
                if (r.n == n && r.name == buf) freq = r.value;
            REQUIRE(freq >= 0.0);
            CHECK(freq <= prev + 1e-15);
            prev = freq;
        }
    }
    for (const auto& c : res.checks) CHECK(c.pass);
}

TEST_CASE("strong law config guards") {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::identity_phi(0.0, DistributionSpec::uniform());
    cfg.weights = grammar::parse_weights("a=log^1(k)/k,b=log^3(n)");
    cfg.mode = Mode::StrongLawExact;
    cfg.n_grid = {100};
    CHECK_THROWS_AS(run_strong_law(cfg), ConfigError);  // needs independence

    ExperimentConfig cfg2;
    cfg2.scheme = ExpansionScheme::constant(1.0, 0.0, DistributionSpec::power(0.5));
    cfg2.weights = cfg.weights;
    cfg2.mode = Mode::StrongLawExact;
    cfg2.n_grid = {100};
    CHECK_THROWS_AS(run_strong_law(cfg2), ConfigError);  // alpha != 1

    ExperimentConfig cfg3;
    cfg3.scheme = ExpansionScheme::luroth();
    cfg3.mode = Mode::StrongLawGeneral;
    cfg3.plan.gamma = 1.0;
    cfg3.n_grid = {100};
    CHECK_THROWS_AS(run_strong_law(cfg3), ConfigError);  // gamma must exceed 1

    ExperimentConfig cfg4 = small_weak_law();
    cfg4.n_grid = {100, 100};
    CHECK_THROWS_AS(run_weak_law(cfg4), ConfigError);  // grid not increasing
}

TEST_CASE("general strong law values shrink along a trajectory") {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::luroth();
    cfg.mode = Mode::StrongLawGeneral;
    cfg.plan.gamma = 1.2;
    cfg.n_grid = {100, 1000, 10000};
    cfg.replications = 5;
    cfg.base_seed = 31;
    auto res = run_strong_law(cfg);
    for (std::int64_t r = 0; r < cfg.replications; ++r) {
        double first = res.samples.at(100)[r];
        double last = res.samples.at(10000)[r];
        CHECK(std::isfinite(first));
        CHECK(last < first);
    }
}

TEST_CASE("tail validator agrees with the sandwich for a RatioA scheme") {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::constant(1.0, 0.0, DistributionSpec::ratio_a(CSeq::constant(1.0)));
    cfg.mode = Mode::TailValidate;
    cfg.base_seed = 77;
    cfg.n_samples = 200000;
    cfg.x_grid = {3.0};
    auto res = validate_tails(cfg);
    CHECK(res.all_pass());
    double phat = -1.0;
    for (const auto& r : res.rows)
        if (r.name == "x3_phat") phat = r.value;
    // sandwich (F(1/4), F(1/3)) = (1/3, 1/2)
    CHECK(phat > 1.0 / 3.0 - 0.01);
    CHECK(phat < 0.5 + 0.01);
}

TEST_CASE("independence validator handles the dependent Engel-type scheme") {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::identity_phi(0.0, DistributionSpec::uniform());
    cfg.mode = Mode::IndepValidate;
    cfg.base_seed = 13;
    cfg.n_samples = 200000;
    cfg.pairs = {{2.0, 2.0}};
    auto res = validate_independence(cfg);  // dependence-bound check only
    CHECK(res.all_pass());
    bool saw_bound = false;
    for (const auto& r : res.rows)
        if (r.name == "x2_y2_dependence_bound") {
            saw_bound = true;
            CHECK(r.value == doctest::Approx(0.25).epsilon(1e-12));
        }
    CHECK(saw_bound);

    // no independence assertion is possible without a Lipschitz constant
    ExperimentConfig bad = cfg;
    bad.scheme = ExpansionScheme::identity_phi(0.0, DistributionSpec::ratio_b(CSeq::constant(1.0)));
    CHECK_THROWS_AS(validate_independence(bad), ConfigError);
}

TEST_CASE("CF validator guards and trivial case") {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::luroth();
    cfg.mode = Mode::CFValidate;
    cfg.base_seed = 3;
    cfg.n_samples = 10000;

    cfg.t_vector = {1.5};
    CHECK_THROWS_AS(validate_cf(cfg), ConfigError);
    cfg.t_vector = std::vector<double>(9, 0.01);
    CHECK_THROWS_AS(validate_cf(cfg), ConfigError);

    cfg.t_vector = {0.0};
    auto res = validate_cf(cfg);  // distance 0 <= 0
    CHECK(res.all_pass());
    for (const auto& r : res.rows)
        if (r.name == "cf_distance") CHECK(r.value <= 1e-12);
}

TEST_CASE("tail-equivalence report needs constant parameters") {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::identity_phi(0.0, DistributionSpec::uniform());
    cfg.mode = Mode::TailEquivValidate;
    cfg.x_grid = {2.0};
    CHECK_THROWS_AS(validate_tail_equivalence(cfg), ConfigError);

    cfg.scheme = ExpansionScheme::luroth();
    cfg.x_grid = {1.0, 10.0, 100.0};
    auto res = validate_tail_equivalence(cfg);
    CHECK(res.all_pass());
}

TEST_CASE("truncation diagnostic decays and rejects shallow gamma") {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::luroth();
    cfg.mode = Mode::TruncDiagnostic;
    cfg.plan = TruncationPlan{2.0, 0.75};
    cfg.n_grid = {1000, 1000000};
    cfg.replications = 1;
    cfg.base_seed = 17;
    auto res = trunc_diagnostic(cfg);
    double final_v = res.samples.at(1000000)[0];
    CHECK(std::abs(final_v) < 0.05);

    cfg.plan.gamma = 0.4;
    CHECK_THROWS_AS(trunc_diagnostic(cfg), ConfigError);

    cfg.plan.gamma = 0.75;
    cfg.scheme = ExpansionScheme::identity_phi(0.0, DistributionSpec::uniform());
    CHECK_THROWS_AS(trunc_diagnostic(cfg), ConfigError);
}
