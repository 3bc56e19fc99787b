#include "opplab/suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "opplab/grammar.hpp"
#include "opplab/rng.hpp"

namespace opplab::suite {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

std::string manifest_for(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "scheme=" << cfg.scheme.name << "\n";
    os << "weights=" << cfg.weights.label << "\n";
    os << "ngrid=";
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) os << (i ? "," : "") << cfg.n_grid[i];
    os << "\nreps=" << cfg.replications << "\nseed=" << cfg.base_seed << "\n";
    os << "mode=" << static_cast<int>(cfg.mode) << "\n";
    os << "samples=" << cfg.n_samples << "\n";
    os << "plan.b=" << cfg.plan.b << "\ngamma=" << cfg.plan.gamma << "\n";
    if (!cfg.x_grid.empty()) {
        os << "x=";
        for (std::size_t i = 0; i < cfg.x_grid.size(); ++i) os << (i ? "," : "") << cfg.x_grid[i];
        os << "\n";
    }
    if (!cfg.pairs.empty()) {
        os << "pairs=";
        for (std::size_t i = 0; i < cfg.pairs.size(); ++i)
            os << (i ? ";" : "") << cfg.pairs[i].first << "," << cfg.pairs[i].second;
        os << "\n";
    }
    if (!cfg.t_vector.empty()) {
        os << "t=";
        for (std::size_t i = 0; i < cfg.t_vector.size(); ++i) os << (i ? "," : "") << cfg.t_vector[i];
        os << "\n";
    }
    return os.str();
}

void maybe_write(const std::string& out_dir, const std::string& sub,
                 const ExperimentResult& res, const ExperimentConfig& cfg) {
    if (out_dir.empty()) return;
    write_experiment((std::filesystem::path(out_dir) / sub).string(), res, manifest_for(cfg));
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---- criterion implementations --------------------------------------------

CriterionResult c1_exact_tail_sandwich() {
    auto dist = DistributionSpec::uniform();
    bool ok = true;
    std::string detail;
    for (double x : {1.0, 1.5, 2.0, 5.0, 10.0, 100.5}) {
        double exact = exact_tail_constant_scheme(1.0, 0.0, dist, 1, x);
        double expect = 1.0 / ceil_eps(x);
        auto [lo, hi] = tail_sandwich(dist, 1, x);
        bool here = exact == expect && lo <= exact && exact <= hi;
        ok = ok && here;
        if (!here) detail += " x=" + fmt(x) + " exact=" + fmt(exact);
    }
    if (ok) detail = "all grid points exact and sandwiched";
    return {1, "exact_tail_vs_sandwich", ok, detail};
}

CriterionResult c2_mc_tail(std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::luroth();
    cfg.mode = Mode::TailValidate;
    cfg.base_seed = seed;
    cfg.n_samples = 1000000;
    cfg.x_grid = {1.5, 2.0, 5.0, 10.0};
    cfg.label = "mc_tail_luroth";
    auto res = validate_tails(cfg);
    maybe_write(out_dir, "c2_mc_tail", res, cfg);
    std::string detail = "4-SE agreement with 1/ceil(x) at x in {1.5,2,5,10}";
    if (!res.all_pass()) {
        detail = "";
        for (auto& c : res.checks)
            if (!c.pass) detail += " " + c.name + "(" + c.detail + ")";
    }
    return {2, "mc_tail_vs_exact_oracle", res.all_pass(), detail};
}

CriterionResult c3_independence(std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::luroth();
    cfg.mode = Mode::IndepValidate;
    cfg.base_seed = seed;
    cfg.n_samples = 1000000;
    cfg.pairs = {{2.0, 3.0}, {3.0, 5.0}};
    cfg.label = "independence_luroth";
    auto res = validate_independence(cfg);
    maybe_write(out_dir, "c3_independence", res, cfg);
    std::string detail = "joint exceedance matches product of exact tails to 4 SE";
    if (!res.all_pass()) {
        detail = "";
        for (auto& c : res.checks)
            if (!c.pass) detail += " " + c.name + "(" + c.detail + ")";
    }
    return {3, "independence_product_tails", res.all_pass(), detail};
}

struct WeakLawOutcome {
    bool centering_ok;
    bool window_ok;
    std::string detail;
};

WeakLawOutcome eval_weak_law(const ExperimentResult& res, const ExperimentConfig& cfg,
                             double window_lo, double window_hi) {
    WeakLawOutcome out{true, true, ""};
    for (std::int64_t n : cfg.n_grid) {
        double med = median_of(res.samples.at(n));
        double cent = centering(cfg.scheme.dist, cfg.weights, n);
        double dev = med - cent;
        if (std::abs(dev) > 0.1) out.centering_ok = false;
        out.detail += "n=" + std::to_string(n) + ": median=" + fmt(med) + " centering=" +
                      fmt(cent) + " dev=" + fmt(dev) + "; ";
    }
    double med_final = median_of(res.samples.at(cfg.n_grid.back()));
    out.window_ok = med_final >= window_lo && med_final <= window_hi;
    out.detail += "final median " + fmt(med_final) + " vs window [" + fmt(window_lo) + "," +
                  fmt(window_hi) + "]";
    return out;
}

CriterionResult c4_weaklaw_uniform(std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::luroth();
    cfg.weights = grammar::parse_weights("a=log^0(k)/k,b=log^2(n),limit=0.5");
    cfg.n_grid = {10000, 100000};
    cfg.replications = 300;
    cfg.base_seed = seed;
    cfg.label = "weaklaw_uniform_b2";
    auto res = run_weak_law(cfg);
    maybe_write(out_dir, "c4_weaklaw_uniform", res, cfg);
    auto out = eval_weak_law(res, cfg, 0.3, 0.7);
    return {4, "weaklaw_uniform_b2", out.centering_ok && out.window_ok, out.detail};
}

CriterionResult c5_weaklaw_ratio_a(std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.scheme = grammar::parse_scheme("phi=const:1,y=const:0,dist=ratioA:c=k^-1");
    cfg.weights = grammar::parse_weights("a=1/c_k,b=Cn_logCn,limit=0.5", &cfg.scheme.dist);
    cfg.n_grid = {10000, 100000};
    cfg.replications = 300;
    cfg.base_seed = seed;
    cfg.label = "weaklaw_ratio_a";
    auto res = run_weak_law(cfg);
    maybe_write(out_dir, "c5_weaklaw_ratio_a", res, cfg);
    auto out = eval_weak_law(res, cfg, 0.3, 0.7);
    auto lim = limits_ratio_a(CSeq::power_decay(1.0), 1000000);
    bool ell_ok = std::abs(lim.ell - (-0.5)) <= 0.1;
    out.detail += "; ell_1e6=" + fmt(lim.ell);
    return {5, "weaklaw_ratio_a", out.centering_ok && out.window_ok && ell_ok, out.detail};
}

CriterionResult c6_weaklaw_ratio_b(std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.scheme = grammar::parse_scheme("phi=const:1,y=const:0,dist=ratioB:c=k^-1");
    cfg.weights = grammar::parse_weights("a=1/c_k,b=Cn_logCn,limit=0.5", &cfg.scheme.dist);
    cfg.n_grid = {10000, 100000};
    cfg.replications = 300;
    cfg.base_seed = seed;
    cfg.label = "weaklaw_ratio_b";
    auto res = run_weak_law(cfg);
    maybe_write(out_dir, "c6_weaklaw_ratio_b", res, cfg);
    auto out = eval_weak_law(res, cfg, 0.3, 0.7);
    return {6, "weaklaw_ratio_b", out.centering_ok && out.window_ok, out.detail};
}

CriterionResult c7_weaklaw_degenerate(std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.scheme = grammar::parse_scheme("phi=const:1,y=const:0,dist=power:alpha=0.5");
    cfg.weights = grammar::parse_weights("a=const:1,b=n^2.2,alpha=0.5,limit=0");
    cfg.n_grid = {100, 10000, 1000000};
    cfg.replications = 200;
    cfg.base_seed = seed;
    cfg.label = "weaklaw_degenerate_power";
    auto res = run_weak_law(cfg);
    maybe_write(out_dir, "c7_weaklaw_degenerate", res, cfg);
    std::vector<double> meds;
    std::string detail;
    for (std::int64_t n : cfg.n_grid) {
        meds.push_back(median_of(res.samples.at(n)));
        detail += "median(" + std::to_string(n) + ")=" + fmt(meds.back()) + "; ";
    }
    bool decreasing = meds[0] > meds[1] && meds[1] > meds[2];
    bool small = meds[2] < 0.2;
    detail += "strictly decreasing=" + std::string(decreasing ? "yes" : "no");
    return {7, "weaklaw_degenerate_power", decreasing && small, detail};
}

CriterionResult c8_strong_law_exact(std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::luroth();
    cfg.weights = grammar::parse_weights("a=log^1(k)/k,b=log^3(n),limit=0.333333333333333333");
    cfg.mode = Mode::StrongLawExact;
    cfg.n_grid = {10000000};
    cfg.replications = 20;
    cfg.base_seed = seed;
    cfg.label = "strong_law_exact_b3";
    auto res = run_strong_law(cfg);
    maybe_write(out_dir, "c8_strong_law_exact", res, cfg);
    const auto& finals = res.samples.at(cfg.n_grid.back());
    double cent = centering(cfg.scheme.dist, cfg.weights, cfg.n_grid.back());
    int in_window = 0, near_centering = 0;
    for (double v : finals) {
        if (v >= 0.15 && v <= 0.55) ++in_window;
        if (std::abs(v - cent) <= 0.1) ++near_centering;
    }
    std::string detail = std::to_string(in_window) + "/20 in [0.15,0.55]; " +
                         std::to_string(near_centering) + "/20 within 0.1 of centering=" + fmt(cent);
    return {8, "strong_law_exact_b3", in_window >= 18 && near_centering >= 18, detail};
}

CriterionResult c9_strong_law_general(std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::luroth();
    cfg.mode = Mode::StrongLawGeneral;
    cfg.plan.gamma = 1.2;
    cfg.n_grid = {1000000};
    cfg.replications = 100;
    cfg.base_seed = seed;
    cfg.label = "strong_law_general";
    auto res = run_strong_law(cfg);
    maybe_write(out_dir, "c9_strong_law_general", res, cfg);
    int small = 0;
    for (double v : res.samples.at(cfg.n_grid.back()))
        if (v < 0.01) ++small;
    std::string detail = std::to_string(small) + "/100 seeds below 0.01 at n=1e6";
    return {9, "strong_law_general", small >= 95, detail};
}

CriterionResult c10_cf_distance(std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.scheme = ExpansionScheme::luroth();
    cfg.mode = Mode::CFValidate;
    cfg.base_seed = seed;
    cfg.n_samples = 100000;
    cfg.t_vector = {0.05, -0.03};
    cfg.label = "cf_distance_n2";
    auto res2 = validate_cf(cfg);
    maybe_write(out_dir, "c10_cf_distance", res2, cfg);

    ExperimentConfig cfg1 = cfg;
    cfg1.t_vector = {0.05};
    cfg1.label = "cf_distance_n1";
    auto res1 = validate_cf(cfg1);
    if (!out_dir.empty()) maybe_write(out_dir, "c10_cf_distance_n1", res1, cfg1);

    bool ok = res2.all_pass() && res1.all_pass();
    std::string detail;
    for (auto& r : res2.rows)
        if (r.name == "cf_distance" || r.name == "cf_bound")
            detail += "n=2 " + r.name + "=" + fmt(r.value) + "; ";
    for (auto& r : res1.rows)
        if (r.name == "cf_distance" || r.name == "cf_bound")
            detail += "n=1 " + r.name + "=" + fmt(r.value) + "; ";
    return {10, "cf_distance_bound", ok, detail};
}

// quadrature oracle for the truncated mean: E[Y I(Y<=x)] = 1 + int_1^x S - x S(x)
double trunc_mean_oracle(const DistributionSpec& spec, std::int64_t n, double x) {
    if (x < 1.0) return 0.0;
    auto integrand = [&](double t) { return spec.y_tail(n, t); };
    auto quad = quadrature::adaptive_simpson(integrand, 1.0, x, 1e-12);
    return 1.0 + quad.value - x * spec.y_tail(n, x);
}

CriterionResult c11_unit_invariants(std::uint64_t seed) {
    bool ok = true;
    std::string detail;

    std::vector<DistributionSpec> specs;
    specs.push_back(DistributionSpec::uniform());
    specs.push_back(DistributionSpec::power(0.5));
    specs.push_back(DistributionSpec::power(0.25));
    specs.push_back(DistributionSpec::ratio_a(CSeq::constant(1.0)));
    specs.push_back(DistributionSpec::ratio_a(CSeq::power_decay(1.0)));
    specs.push_back(DistributionSpec::ratio_b(CSeq::constant(1.0)));
    specs.push_back(DistributionSpec::ratio_b(CSeq::power_decay(0.5)));

    // cdf/quantile roundtrips
    double max_rt = 0.0;
    for (const auto& spec : specs) {
        for (std::int64_t n : {1, 3, 7}) {
            for (int i = 1; i < 200; ++i) {
                double p = i / 200.0;
                if (spec.family() == Family::RatioB && p > 1.0 / (1.0 + spec.c_at(n)) - 1e-9)
                    continue;  // atom region: quantile is the constant 1
                max_rt = std::max(max_rt, std::abs(spec.cdf(n, spec.quantile(n, p)) - p));
            }
        }
    }
    if (max_rt > 1e-12) {
        ok = false;
        detail += "roundtrip err " + fmt(max_rt) + "; ";
    }

    // truncated mean vs quadrature
    double max_tm = 0.0;
    for (const auto& spec : specs)
        for (std::int64_t n : {1, 5})
            for (double x : {1.5, 3.0, 10.0, 27.5})
                max_tm = std::max(max_tm,
                                  std::abs(spec.y_truncated_mean(n, x) - trunc_mean_oracle(spec, n, x)));
    if (max_tm > 1e-8) {
        ok = false;
        detail += "trunc-mean err " + fmt(max_tm) + "; ";
    }

    // delta endpoint identity
    if (delta(1.0, 1.0, 0.0) != 1.0 || delta(2.0, 2.0, 0.7) != 1.0 || delta(3.0, 3.0, 1.25) != 1.0) {
        ok = false;
        detail += "delta endpoint not exact; ";
    }

    // Luroth digit-law chi-square, 50 bins + tail, df 50, significance 1e-3
    {
        const std::int64_t big_n = 1000000;
        RngStream stream(seed, 0, Purpose::Oracle);
        std::vector<std::int64_t> counts(52, 0);
        auto scheme = ExpansionScheme::luroth();
        simulate_visit(scheme, big_n, stream, [&](std::int64_t, const Step& s) {
            std::int64_t d = s.overflow ? 51 : std::min<std::int64_t>(static_cast<std::int64_t>(s.digit), 51);
            counts[static_cast<std::size_t>(d)] += 1;
        });
        double chi2 = 0.0;
        for (int k = 1; k <= 50; ++k) {
            double e = big_n * (1.0 / k - 1.0 / (k + 1.0));
            double d = counts[static_cast<std::size_t>(k)] - e;
            chi2 += d * d / e;
        }
        double e_tail = big_n / 51.0;
        double d_tail = counts[51] - e_tail;
        chi2 += d_tail * d_tail / e_tail;
        if (chi2 > 86.661) {
            ok = false;
            detail += "digit-law chi2 " + fmt(chi2) + " > 86.661; ";
        } else {
            detail += "chi2=" + fmt(chi2) + "; ";
        }
    }

    // uniformity-condition decay per family
    for (const auto& spec : specs) {
        TailProfile tp = spec.tail_profile();
        double prev = 1e300;
        for (double t : {1e-2, 1e-3, 1e-4}) {
            double worst = 0.0;
            for (std::int64_t n = 1; n <= 10; ++n)
                worst = std::max(worst, std::abs(spec.cdf(n, t) / std::pow(t, tp.alpha) - tp.c_unif));
            if (worst > prev + 1e-15) {
                ok = false;
                detail += "uniformity not decaying for " + spec.label() + "; ";
            }
            prev = worst;
        }
    }

    if (ok && detail.empty()) detail = "all unit invariants hold";
    return {11, "unit_invariants", ok, detail};
}

CriterionResult c12_reproducibility(std::uint64_t seed) {
    ExperimentConfig tails;
    tails.scheme = ExpansionScheme::luroth();
    tails.mode = Mode::TailValidate;
    tails.base_seed = seed;
    tails.n_samples = 100000;
    tails.x_grid = {2.0, 5.0};
    tails.label = "repro_tails";

    ExperimentConfig weak;
    weak.scheme = ExpansionScheme::luroth();
    weak.weights = grammar::parse_weights("a=log^0(k)/k,b=log^2(n),limit=0.5");
    weak.n_grid = {1000, 2000};
    weak.replications = 50;
    weak.base_seed = seed;
    weak.label = "repro_weaklaw";

    bool ok = validate_tails(tails).csv() == validate_tails(tails).csv() &&
              run_weak_law(weak).csv() == run_weak_law(weak).csv();
    return {12, "reproducibility", ok,
            ok ? "reruns byte-identical" : "rerun CSV outputs differ"};
}

}  // namespace

bool SuiteResult::all_pass() const {
    for (const auto& c : criteria)
        if (!c.pass) return false;
    return true;
}

std::string SuiteResult::report() const {
    std::ostringstream os;
    for (const auto& c : criteria)
        os << (c.pass ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << " | "
           << c.detail << "\n";
    os << "suite: " << (all_pass() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

void write_experiment(const std::string& dir, const ExperimentResult& res,
                      const std::string& manifest) {
    std::filesystem::create_directories(dir);
    std::filesystem::path base(dir);
    write_text(base / "result.csv", res.csv());
    write_text(base / "summary.txt", res.summary());
    write_text(base / "manifest.txt", manifest + "config_hash=" + std::to_string(res.config_hash) + "\n");
}

SuiteResult run_acceptance(std::uint64_t base_seed, const std::string& out_dir) {
    SuiteResult sr;
    sr.criteria.push_back(c1_exact_tail_sandwich());
    sr.criteria.push_back(c2_mc_tail(base_seed, out_dir));
    sr.criteria.push_back(c3_independence(base_seed, out_dir));
    sr.criteria.push_back(c4_weaklaw_uniform(base_seed, out_dir));
    sr.criteria.push_back(c5_weaklaw_ratio_a(base_seed, out_dir));
    sr.criteria.push_back(c6_weaklaw_ratio_b(base_seed, out_dir));
    sr.criteria.push_back(c7_weaklaw_degenerate(base_seed, out_dir));
    sr.criteria.push_back(c8_strong_law_exact(base_seed, out_dir));
    sr.criteria.push_back(c9_strong_law_general(base_seed, out_dir));
    sr.criteria.push_back(c10_cf_distance(base_seed, out_dir));
    sr.criteria.push_back(c11_unit_invariants(base_seed));
    sr.criteria.push_back(c12_reproducibility(base_seed));
    return sr;
}

}  // namespace opplab::suite
