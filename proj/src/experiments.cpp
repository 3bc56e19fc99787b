#include "opplab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "opplab/rng.hpp"

namespace opplab {

namespace {

constexpr double kWilsonZ = 3.290526731491926;  // 99.9% two-sided

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    double pos = p * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, 0.5);
}

void push_summary_rows(ExperimentResult& res, std::int64_t n, const std::vector<double>& vals) {
    KahanSum s;
    for (double v : vals) s.add(v);
    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    res.rows.push_back({n, "mean", s.value() / static_cast<double>(vals.size())});
    res.rows.push_back({n, "median", quantile_sorted(sorted, 0.5)});
    res.rows.push_back({n, "q05", quantile_sorted(sorted, 0.05)});
    res.rows.push_back({n, "q25", quantile_sorted(sorted, 0.25)});
    res.rows.push_back({n, "q75", quantile_sorted(sorted, 0.75)});
    res.rows.push_back({n, "q95", quantile_sorted(sorted, 0.95)});
}

void require_grid(const ExperimentConfig& cfg) {
    if (cfg.n_grid.empty()) throw ConfigError("n_grid must be nonempty");
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        if (cfg.n_grid[i] < 1) throw ConfigError("n_grid entries must be >= 1");
        if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
            throw ConfigError("n_grid must be strictly increasing");
    }
    if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
    for (double e : cfg.epsilons)
        if (!(e > 0.0)) throw ConfigError("epsilons must be positive");
}

std::uint64_t hash_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << cfg.scheme.name << '|' << cfg.weights.label << '|';
    for (auto n : cfg.n_grid) os << n << ',';
    os << '|' << cfg.replications << '|' << cfg.base_seed << '|'
       << static_cast<int>(cfg.mode) << '|' << cfg.plan.b << '|' << cfg.plan.gamma << '|'
       << cfg.n_samples << '|' << cfg.target_index << '|';
    for (double x : cfg.x_grid) os << x << ',';
    os << '|';
    for (auto& p : cfg.pairs) os << p.first << ':' << p.second << ',';
    os << '|';
    for (double t : cfg.t_vector) os << t << ',';
    for (double e : cfg.epsilons) os << e << ',';
    return fnv1a(os.str());
}

ExperimentResult make_result(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.base_seed = cfg.base_seed;
    res.config_hash = hash_config(cfg);
    res.label = cfg.label.empty() ? cfg.scheme.name : cfg.label;
    return res;
}

// Dynamic scheduling over independent slots: each task writes only state
// owned by its index, so execution order never changes the outcome.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn) {
    int workers = std::min<std::int64_t>(max_threads(), count);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::int64_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

// Lattice-aware exceedance event R_n >= x: with R_n = (k + phi y)/(phi(1+y))
// the digit event is k >= ceil(x phi + (x-1) y phi), matching the closed-form
// tail's ceiling convention at integer thresholds.
bool exceeds(double phi, double y, double digit, double x) {
    double s = ceil_eps(x * phi + (x - 1.0) * y * phi);
    return digit >= s - 0.5;
}

struct ObservedStep {
    double phi = 0.0;
    double y = 0.0;
    double digit = 0.0;
};

// Simulates `upto` steps on the given stream and returns (phi, y, digit) of
// the requested step indices (sorted, unique, all <= upto).
void observe_steps(const ExpansionScheme& scheme, std::int64_t upto, RngStream& stream,
                   const std::vector<std::int64_t>& wanted, std::vector<ObservedStep>& out) {
    out.assign(wanted.size(), {});
    double h = static_cast<double>(scheme.b1);
    std::size_t wi = 0;
    simulate_visit(scheme, upto, stream, [&](std::int64_t k, const Step& s) {
        if (wi < wanted.size() && k == wanted[wi]) {
            out[wi] = {scheme.phi(k, h), s.y, s.digit};
            ++wi;
        }
        h = s.digit;
    });
}

struct WilsonInterval {
    double lo, hi;
};

WilsonInterval wilson(double phat, double n) {
    double z2 = kWilsonZ * kWilsonZ;
    double denom = 1.0 + z2 / n;
    double center = (phat + z2 / (2.0 * n)) / denom;
    double half = kWilsonZ * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace

int max_threads() {
    if (const char* env = std::getenv("OPPLAB_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? static_cast<int>(hw) : 1;
}

bool ExperimentResult::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string ExperimentResult::csv() const {
    std::string out = "n,stat_name,value\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n);
        out += ',';
        out += r.name;
        out += ',';
        out += fmt(r.value);
        out += '\n';
    }
    return out;
}

std::string ExperimentResult::summary() const {
    std::ostringstream os;
    os << "label=" << label << "\n";
    os << "config_hash=" << config_hash << "\n";
    os << "seed=" << base_seed << "\n";
    for (const auto& c : checks)
        os << (c.pass ? "PASS" : "FAIL") << " " << c.name << " | " << c.detail << "\n";
    if (checks.empty())
        os << "result: PASS (report only, no assertions)\n";
    else
        os << "result: " << (all_pass() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

ExperimentResult run_weak_law(const ExperimentConfig& cfg) {
    if (cfg.mode != Mode::WeakLaw) throw ConfigError("run_weak_law needs mode=WeakLaw");
    require_grid(cfg);
    double wr = weight_ratio(cfg.weights, cfg.n_grid.back());
    if (!(wr < 1.0)) throw ConfigError("small-weights ratio >= 1 at max n: weights unsuitable");

    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res = make_result(cfg);
    const std::int64_t reps = cfg.replications;
    std::vector<double> trend;  // median |W_n - centering_n| across the grid

    for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
        const std::int64_t n = cfg.n_grid[gi];
        std::vector<double> w_vals(reps);
        parallel_for(reps, [&](std::int64_t r) {
            RngStream stream(cfg.base_seed, static_cast<std::uint64_t>(gi) * reps + r,
                             Purpose::WeakLaw);
            KahanSum s;
            simulate_visit(cfg.scheme, n, stream,
                           [&](std::int64_t k, const Step& st) { s.add(cfg.weights.a(k) * st.ratio); });
            w_vals[r] = s.value() / cfg.weights.b(n);
        });

        double cent = centering(cfg.scheme.dist, cfg.weights, n);
        push_summary_rows(res, n, w_vals);
        res.rows.push_back({n, "centering", cent});
        res.rows.push_back({n, "median_minus_centering", median_of(w_vals) - cent});
        res.rows.push_back({n, "weight_ratio", weight_ratio(cfg.weights, n)});

        std::vector<double> eps = cfg.epsilons;
        std::sort(eps.begin(), eps.end());
        double prev_freq = 1.0;
        bool monotone = true;
        for (double e : eps) {
            std::int64_t exc_c = 0, exc_l = 0;
            for (double w : w_vals) {
                if (std::abs(w - cent) > e) ++exc_c;
                if (cfg.weights.limit && std::abs(w - *cfg.weights.limit) > e) ++exc_l;
            }
            double freq = static_cast<double>(exc_c) / static_cast<double>(reps);
            if (freq > prev_freq + 1e-15) monotone = false;
            prev_freq = freq;
            res.rows.push_back({n, "exceed_centering_eps" + fmt_short(e), freq});
            if (cfg.weights.limit)
                res.rows.push_back({n, "exceed_limit_eps" + fmt_short(e),
                                    static_cast<double>(exc_l) / static_cast<double>(reps)});
        }
        res.checks.push_back({"exceedance_monotone_n" + std::to_string(n), monotone,
                              "frequencies nonincreasing in epsilon"});

        std::vector<double> devs(w_vals.size());
        for (std::size_t i = 0; i < w_vals.size(); ++i) devs[i] = std::abs(w_vals[i] - cent);
        trend.push_back(median_of(devs));
        res.rows.push_back({n, "median_abs_dev_centering", trend.back()});
        res.samples[n] = std::move(w_vals);
    }

    if (trend.size() >= 2) {
        int inversions = 0;
        for (std::size_t i = 1; i < trend.size(); ++i)
            if (trend[i] > trend[i - 1] + 1e-15) ++inversions;
        res.checks.push_back({"weak_law_trend", inversions <= 1,
                              "median |W_n - centering| inversions: " + std::to_string(inversions)});
    }
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

ExperimentResult run_strong_law(const ExperimentConfig& cfg) {
    if (cfg.mode != Mode::StrongLawExact && cfg.mode != Mode::StrongLawGeneral)
        throw ConfigError("run_strong_law needs a strong-law mode");
    require_grid(cfg);
    const bool exact = cfg.mode == Mode::StrongLawExact;
    if (exact) {
        if (!cfg.scheme.constant_parameters())
            throw ConfigError("exact strong law is proved only for constant-parameter schemes");
        if (cfg.scheme.dist.tail_profile().alpha != 1.0)
            throw ConfigError("exact strong law needs tail exponent alpha = 1");
    } else {
        if (!(cfg.plan.gamma > 1.0))
            throw ConfigError("general strong law needs gamma > 1");
    }

    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res = make_result(cfg);
    const std::int64_t reps = cfg.replications;
    const std::int64_t max_n = cfg.n_grid.back();
    std::vector<std::vector<double>> vals(cfg.n_grid.size(), std::vector<double>(reps));

    parallel_for(reps, [&](std::int64_t r) {
        RngStream stream(cfg.base_seed, static_cast<std::uint64_t>(r), Purpose::StrongLaw);
        KahanSum s;
        std::size_t gi = 0;
        simulate_visit(cfg.scheme, max_n, stream, [&](std::int64_t k, const Step& st) {
            if (exact)
                s.add(cfg.weights.a(k) * st.ratio);
            else
                s.add(st.ratio / static_cast<double>(k));
            if (gi < cfg.n_grid.size() && k == cfg.n_grid[gi]) {
                double norm = exact ? cfg.weights.b(k)
                                    : std::pow(static_cast<double>(k), cfg.plan.gamma);
                vals[gi][r] = s.value() / norm;
                ++gi;
            }
        });
    });

    for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
        const std::int64_t n = cfg.n_grid[gi];
        push_summary_rows(res, n, vals[gi]);
        if (exact)
            res.rows.push_back({n, "centering", centering(cfg.scheme.dist, cfg.weights, n)});
        for (std::int64_t r = 0; r < reps; ++r)
            res.rows.push_back({n, "w_rep" + std::to_string(r), vals[gi][r]});
        res.samples[n] = std::move(vals[gi]);
    }
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

ExperimentResult validate_tails(const ExperimentConfig& cfg) {
    if (cfg.mode != Mode::TailValidate) throw ConfigError("validate_tails needs mode=TailValidate");
    if (cfg.x_grid.empty()) throw ConfigError("validate_tails needs a nonempty x grid");
    for (double x : cfg.x_grid)
        if (!(x >= 1.0)) throw ConfigError("tail thresholds must satisfy x >= 1");
    if (cfg.n_samples < 1) throw ConfigError("n_samples must be >= 1");
    if (cfg.target_index < 1) throw ConfigError("target_index must be >= 1");

    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res = make_result(cfg);
    const std::int64_t big_n = cfg.n_samples;
    const std::int64_t m = cfg.target_index;
    const std::size_t nx = cfg.x_grid.size();
    std::vector<std::vector<std::uint8_t>> events(nx, std::vector<std::uint8_t>(big_n, 0));
    const std::vector<std::int64_t> wanted{m};

    parallel_for(big_n, [&](std::int64_t i) {
        RngStream stream(cfg.base_seed, static_cast<std::uint64_t>(i), Purpose::TailValidate);
        std::vector<ObservedStep> obs;
        observe_steps(cfg.scheme, m, stream, wanted, obs);
        for (std::size_t xi = 0; xi < nx; ++xi)
            events[xi][i] = exceeds(obs[0].phi, obs[0].y, obs[0].digit, cfg.x_grid[xi]) ? 1 : 0;
    });

    const bool constant = cfg.scheme.constant_parameters();
    for (std::size_t xi = 0; xi < nx; ++xi) {
        double x = cfg.x_grid[xi];
        std::int64_t count = 0;
        for (std::uint8_t e : events[xi]) count += e;
        double phat = static_cast<double>(count) / static_cast<double>(big_n);
        auto [lower, upper] = tail_sandwich(cfg.scheme.dist, m, x);
        WilsonInterval wi = wilson(phat, static_cast<double>(big_n));

        res.rows.push_back({m, "x" + fmt_short(x) + "_phat", phat});
        res.rows.push_back({m, "x" + fmt_short(x) + "_sandwich_lo", lower});
        res.rows.push_back({m, "x" + fmt_short(x) + "_sandwich_hi", upper});
        res.rows.push_back({m, "x" + fmt_short(x) + "_wilson_lo", wi.lo});
        res.rows.push_back({m, "x" + fmt_short(x) + "_wilson_hi", wi.hi});

        bool sandwich_ok = wi.hi >= lower - 1e-15 && wi.lo <= upper + 1e-15;
        res.checks.push_back({"sandwich_x" + fmt_short(x), sandwich_ok,
                              "phat=" + fmt_short(phat) + " wilson=[" + fmt_short(wi.lo) + "," +
                                  fmt_short(wi.hi) + "] bounds=[" + fmt_short(lower) + "," +
                                  fmt_short(upper) + "]"});
        if (constant) {
            double p = exact_tail_constant_scheme(*cfg.scheme.const_phi, *cfg.scheme.const_y,
                                                  cfg.scheme.dist, m, x);
            double tol = 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(big_n));
            res.rows.push_back({m, "x" + fmt_short(x) + "_exact", p});
            res.checks.push_back({"exact_tail_x" + fmt_short(x), std::abs(phat - p) <= tol + 1e-15,
                                  "phat=" + fmt_short(phat) + " exact=" + fmt_short(p) +
                                      " tol=" + fmt_short(tol)});
        }
    }
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

ExperimentResult validate_independence(const ExperimentConfig& cfg) {
    if (cfg.mode != Mode::IndepValidate)
        throw ConfigError("validate_independence needs mode=IndepValidate");
    if (cfg.pairs.empty()) throw ConfigError("validate_independence needs threshold pairs");
    for (auto& [x, y] : cfg.pairs)
        if (!(x >= 1.0 && y >= 1.0)) throw ConfigError("thresholds must satisfy x, y >= 1");
    if (cfg.n_samples < 1) throw ConfigError("n_samples must be >= 1");

    const bool constant = cfg.scheme.constant_parameters();
    const bool has_m = cfg.scheme.dist.tail_profile().lipschitz_m.has_value();
    if (!constant && !has_m)
        throw ConfigError(
            "independence assertion needs a constant-parameter scheme; the dependence-bound "
            "check additionally needs a Lipschitz constant");

    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res = make_result(cfg);
    const std::int64_t big_n = cfg.n_samples;
    const std::size_t np = cfg.pairs.size();
    std::vector<std::vector<std::uint8_t>> e1(np, std::vector<std::uint8_t>(big_n, 0));
    std::vector<std::vector<std::uint8_t>> e2(np, std::vector<std::uint8_t>(big_n, 0));
    const std::vector<std::int64_t> wanted{1, 2};

    parallel_for(big_n, [&](std::int64_t i) {
        RngStream stream(cfg.base_seed, static_cast<std::uint64_t>(i), Purpose::IndepValidate);
        std::vector<ObservedStep> obs;
        observe_steps(cfg.scheme, 2, stream, wanted, obs);
        for (std::size_t pi = 0; pi < np; ++pi) {
            e1[pi][i] = exceeds(obs[0].phi, obs[0].y, obs[0].digit, cfg.pairs[pi].first) ? 1 : 0;
            e2[pi][i] = exceeds(obs[1].phi, obs[1].y, obs[1].digit, cfg.pairs[pi].second) ? 1 : 0;
        }
    });

    for (std::size_t pi = 0; pi < np; ++pi) {
        auto [x, y] = cfg.pairs[pi];
        std::int64_t c1 = 0, c2 = 0, cj = 0;
        for (std::int64_t i = 0; i < big_n; ++i) {
            c1 += e1[pi][i];
            c2 += e2[pi][i];
            cj += e1[pi][i] & e2[pi][i];
        }
        double nd = static_cast<double>(big_n);
        double p1 = c1 / nd, p2 = c2 / nd, pj = cj / nd;
        std::string tag = "x" + fmt_short(x) + "_y" + fmt_short(y);
        std::int64_t row_n = static_cast<std::int64_t>(pi) + 1;
        res.rows.push_back({row_n, tag + "_joint_hat", pj});
        res.rows.push_back({row_n, tag + "_marg1_hat", p1});
        res.rows.push_back({row_n, tag + "_marg2_hat", p2});

        if (constant) {
            double q1 = exact_tail_constant_scheme(*cfg.scheme.const_phi, *cfg.scheme.const_y,
                                                   cfg.scheme.dist, 1, x);
            double q2 = exact_tail_constant_scheme(*cfg.scheme.const_phi, *cfg.scheme.const_y,
                                                   cfg.scheme.dist, 2, y);
            double prod = q1 * q2;
            double tol = 4.0 * std::sqrt(prod * (1.0 - prod) / nd);
            res.rows.push_back({row_n, tag + "_product_exact", prod});
            res.checks.push_back({"independence_" + tag, std::abs(pj - prod) <= tol + 1e-15,
                                  "joint=" + fmt_short(pj) + " product=" + fmt_short(prod) +
                                      " tol=" + fmt_short(tol)});
        }
        if (has_m) {
            double bound = dependence_bound(cfg.scheme.dist, 1, 2, x, y);
            double se = std::sqrt(pj * (1.0 - pj) / nd) + std::sqrt(p1 * (1.0 - p1) / nd) +
                        std::sqrt(p2 * (1.0 - p2) / nd);
            double dev = std::abs(pj - p1 * p2);
            res.rows.push_back({row_n, tag + "_dependence_bound", bound});
            res.rows.push_back({row_n, tag + "_factorization_dev", dev});
            res.checks.push_back({"dependence_bound_" + tag, dev <= bound + 4.0 * se + 1e-15,
                                  "dev=" + fmt_short(dev) + " bound=" + fmt_short(bound) +
                                      " 4se=" + fmt_short(4.0 * se)});
        }
    }
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

ExperimentResult validate_cf(const ExperimentConfig& cfg) {
    if (cfg.mode != Mode::CFValidate) throw ConfigError("validate_cf needs mode=CFValidate");
    if (cfg.t_vector.empty() || cfg.t_vector.size() > 8)
        throw ConfigError("t vector must have 1..8 entries");
    for (double t : cfg.t_vector)
        if (!(std::abs(t) <= 1.0)) throw ConfigError("|t_k| <= 1 required");
    if (cfg.n_samples < 2) throw ConfigError("n_samples must be >= 2");

    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res = make_result(cfg);
    const std::int64_t big_n = cfg.n_samples;
    const std::int64_t len = static_cast<std::int64_t>(cfg.t_vector.size());
    std::vector<double> re(big_n), im(big_n);

    parallel_for(big_n, [&](std::int64_t i) {
        RngStream stream(cfg.base_seed, static_cast<std::uint64_t>(i), Purpose::CFValidate);
        KahanSum acc;
        simulate_visit(cfg.scheme, len, stream, [&](std::int64_t k, const Step& s) {
            acc.add(cfg.t_vector[static_cast<std::size_t>(k - 1)] * s.ratio);
        });
        re[i] = std::cos(acc.value());
        im[i] = std::sin(acc.value());
    });

    KahanSum sre, sim, sre2, sim2;
    for (std::int64_t i = 0; i < big_n; ++i) {
        sre.add(re[i]);
        sim.add(im[i]);
        sre2.add(re[i] * re[i]);
        sim2.add(im[i] * im[i]);
    }
    double nd = static_cast<double>(big_n);
    std::complex<double> mc(sre.value() / nd, sim.value() / nd);
    double var = (sre2.value() / nd - mc.real() * mc.real()) +
                 (sim2.value() / nd - mc.imag() * mc.imag());
    var = std::max(var, 0.0);
    double se = std::sqrt(var / nd);

    std::complex<double> prod(1.0, 0.0);
    double t_sum = 0.0;
    for (std::int64_t k = 1; k <= len; ++k) {
        double tk = cfg.t_vector[static_cast<std::size_t>(k - 1)];
        prod *= cfg.scheme.dist.psi(k, tk);
        t_sum += std::abs(tk);
    }

    double distance = std::abs(mc - prod);
    double bound = t_sum + 3.0 * se;
    res.rows.push_back({len, "cf_distance", distance});
    res.rows.push_back({len, "cf_bound", bound});
    res.rows.push_back({len, "cf_margin", bound - distance});
    res.rows.push_back({len, "cf_se", se});
    res.rows.push_back({len, "mc_re", mc.real()});
    res.rows.push_back({len, "mc_im", mc.imag()});
    res.rows.push_back({len, "psi_prod_re", prod.real()});
    res.rows.push_back({len, "psi_prod_im", prod.imag()});
    res.checks.push_back({"cf_distance_bound", distance <= bound + 1e-15,
                          "distance=" + fmt_short(distance) + " bound=" + fmt_short(bound)});
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

ExperimentResult validate_tail_equivalence(const ExperimentConfig& cfg) {
    if (cfg.mode != Mode::TailEquivValidate)
        throw ConfigError("validate_tail_equivalence needs mode=TailEquivValidate");
    if (!cfg.scheme.constant_parameters())
        throw ConfigError("tail equivalence is stated for constant-parameter schemes");
    if (cfg.x_grid.empty()) throw ConfigError("needs a nonempty x grid");
    for (double x : cfg.x_grid)
        if (!(x >= 1.0)) throw ConfigError("x >= 1 required");

    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res = make_result(cfg);
    const std::int64_t m = cfg.target_index;
    double x_max = *std::max_element(cfg.x_grid.begin(), cfg.x_grid.end());
    bool any_underflow = false;
    double dev_at_max = 0.0;

    for (double x : cfg.x_grid) {
        TailRatio r = uniform_tail_ratio(*cfg.scheme.const_phi, *cfg.scheme.const_y,
                                         cfg.scheme.dist, m, x);
        res.rows.push_back({m, "x" + fmt_short(x) + "_tail_ratio", r.value});
        res.rows.push_back({m, "x" + fmt_short(x) + "_underflow", r.underflow ? 1.0 : 0.0});
        if (r.underflow) any_underflow = true;
        if (x == x_max) dev_at_max = std::abs(r.value - 1.0);
    }
    double g = *cfg.scheme.const_phi * (1.0 + *cfg.scheme.const_y);
    double tol = std::max(0.05, (g + 1.0) / x_max);
    res.checks.push_back({"tail_ratio_to_one", !any_underflow && dev_at_max <= tol,
                          "|ratio(x_max) - 1|=" + fmt_short(dev_at_max) + " tol=" + fmt_short(tol)});
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

ExperimentResult trunc_diagnostic(const ExperimentConfig& cfg) {
    if (cfg.mode != Mode::TruncDiagnostic)
        throw ConfigError("trunc_diagnostic needs mode=TruncDiagnostic");
    if (!cfg.scheme.constant_parameters())
        throw ConfigError("truncation diagnostic needs a constant-parameter scheme");
    if (!(cfg.plan.gamma > 0.5)) throw ConfigError("diagnostic needs gamma > 1/2");
    require_grid(cfg);
    if (cfg.n_grid.back() < 2) throw ConfigError("diagnostic needs n >= 2");

    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res = make_result(cfg);
    const std::int64_t reps = cfg.replications;
    const std::int64_t max_n = cfg.n_grid.back();
    ExpectedGTruncTable table(*cfg.scheme.const_phi, *cfg.scheme.const_y, cfg.scheme.dist);
    std::vector<std::vector<double>> vals(cfg.n_grid.size(), std::vector<double>(reps));

    parallel_for(reps, [&](std::int64_t r) {
        RngStream stream(cfg.base_seed, static_cast<std::uint64_t>(r), Purpose::TruncDiagnostic);
        KahanSum s;
        std::size_t gi = 0;
        simulate_visit(cfg.scheme, max_n, stream, [&](std::int64_t k, const Step& st) {
            // k = 1 clamps to c_1 = 0 on both sides: the centered term vanishes
            if (k >= 2) {
                double level = cfg.plan.level(k);
                double g = std::min(st.ratio, level);
                s.add((g - table.at(k, level)) / static_cast<double>(k));
            }
            if (gi < cfg.n_grid.size() && k == cfg.n_grid[gi]) {
                vals[gi][r] = s.value() / std::pow(static_cast<double>(k), cfg.plan.gamma);
                ++gi;
            }
        });
    });

    for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
        const std::int64_t n = cfg.n_grid[gi];
        push_summary_rows(res, n, vals[gi]);
        for (std::int64_t r = 0; r < reps; ++r)
            res.rows.push_back({n, "v_rep" + std::to_string(r), vals[gi][r]});
        res.samples[n] = std::move(vals[gi]);
    }
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace opplab
