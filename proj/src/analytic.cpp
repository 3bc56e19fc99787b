#include "opplab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace opplab {

double weight_ratio(const WeightScheme& w, std::int64_t n) {
    if (n < 1) throw DomainError("weight_ratio: n >= 1 required");
    KahanSum s;
    for (std::int64_t k = 1; k <= n; ++k) {
        double ak = w.a(k);
        if (ak < 0.0) throw DomainError("weight_ratio: a_k must be nonnegative");
        s.add(std::pow(ak, w.alpha));
    }
    return s.value() / std::pow(w.b(n), w.alpha);
}

SequenceStats sequence_stats(const CSeq& c_seq, std::int64_t n) {
    if (n < 1) throw DomainError("sequence_stats: n >= 1 required");
    KahanSum c_sum, log_sum, m_sum;
    for (std::int64_t k = 1; k <= n; ++k) {
        double c = c_seq(k);
        if (!(c > 0.0)) throw DomainError("sequence_stats: c_k must be positive");
        c_sum.add(1.0 / c);
        log_sum.add(std::log(c) / c);
        m_sum.add(std::log((c + 1.0) / c) / c);
    }
    SequenceStats st;
    st.n = n;
    st.c_sum = c_sum.value();
    double denom = st.c_sum * std::log(st.c_sum);
    if (denom > 0.0) {
        st.ell = log_sum.value() / denom;
        st.kappa = static_cast<double>(n) / denom;
        st.m = m_sum.value() / denom;
    } else {
        st.ell = st.kappa = st.m = std::numeric_limits<double>::quiet_NaN();
    }
    return st;
}

RatioALimits limits_ratio_a(const CSeq& c_seq, std::int64_t n) {
    SequenceStats st = sequence_stats(c_seq, n);
    if (!(st.c_sum > 1.0)) throw DomainError("limits_ratio_a: needs C_n > 1");
    return {st.ell, st.kappa, st.ell + 1.0 + st.kappa};
}

RatioBLimits limits_ratio_b(const CSeq& c_seq, std::int64_t n) {
    SequenceStats st = sequence_stats(c_seq, n);
    if (!(st.c_sum > 1.0)) throw DomainError("limits_ratio_b: needs C_n > 1");
    return {st.m, 1.0 - st.m};
}

double centering(const DistributionSpec& spec, const WeightScheme& w, std::int64_t n) {
    if (n < 1) throw DomainError("centering: n >= 1 required");
    double bn = w.b(n);
    if (!(bn > 0.0)) throw DomainError("centering: b_n must be positive");
    KahanSum s;
    for (std::int64_t k = 1; k <= n; ++k) {
        double ak = w.a(k);
        if (ak == 0.0) continue;
        s.add(ak * spec.y_truncated_mean(k, bn / ak));
    }
    return s.value() / bn;
}

double exact_tail_constant_scheme(double c_phi, double d_y, const DistributionSpec& spec,
                                  std::int64_t n, double x) {
    if (x < 1.0) throw DomainError("exact_tail_constant_scheme: x >= 1 required");
    double s = ceil_eps(x * c_phi + (x - 1.0) * d_y * c_phi);
    return spec.cdf(n, c_phi * (1.0 + d_y) / (s + c_phi * d_y));
}

std::pair<double, double> tail_sandwich(const DistributionSpec& spec, std::int64_t n, double x) {
    if (x < 1.0) throw DomainError("tail_sandwich: x >= 1 required");
    return {spec.cdf(n, 1.0 / (x + 1.0)), spec.cdf(n, 1.0 / x)};
}

double dependence_bound(const DistributionSpec& spec, std::int64_t i, std::int64_t j,
                        double x, double y) {
    if (x < 1.0 || y < 1.0) throw DomainError("dependence_bound: x, y >= 1 required");
    TailProfile p = spec.tail_profile();
    if (!p.lipschitz_m)
        throw NoLipschitzConstant("dependence_bound: family has no uniform Lipschitz constant");
    double m = *p.lipschitz_m;
    return m * (spec.cdf(i, 1.0 / x) / (y * y) + spec.cdf(j, 1.0 / y) / (x * x));
}

double TruncationPlan::level(std::int64_t n) const {
    if (n < 1) throw DomainError("truncation level: n >= 1 required");
    double ln = std::log(static_cast<double>(n));
    return static_cast<double>(n) * std::pow(ln, b);
}

double g_trunc(double x, std::int64_t n, const TruncationPlan& plan) {
    if (n < 2) throw DomainError("g_trunc: n >= 2 required");
    double c = plan.level(n);
    if (x < -c) return -c;
    if (x > c) return c;
    return x;
}

TailRatio uniform_tail_ratio(double c_phi, double d_y, const DistributionSpec& spec,
                             std::int64_t n, double x) {
    double num = exact_tail_constant_scheme(c_phi, d_y, spec, n, x);
    double den = spec.y_tail(n, x);
    if (den < 1e-300) return {0.0, true};
    return {num / den, false};
}

namespace {

// Tail integral of the piecewise-constant exact tail, in the w = s + 1 + d*phi
// variable: (1/g) * int F_k(g/w) dw over [w_lo, w_hi], closed form per family.
double closed_tail_integral(const DistributionSpec& spec, std::int64_t k, double g,
                            double w_lo, double w_hi) {
    if (!(w_hi > w_lo)) return 0.0;
    switch (spec.family()) {
        case Family::Uniform:
            return std::log(w_hi / w_lo);
        case Family::Power: {
            double a = spec.power_alpha();
            return std::pow(g, a - 1.0) * (std::pow(w_hi, 1.0 - a) - std::pow(w_lo, 1.0 - a)) /
                   (1.0 - a);
        }
        case Family::RatioA: {
            double c = spec.c_at(k);
            double w_cut = g * (1.0 + c);  // F = 1 for w <= w_cut
            double total = 0.0;
            if (w_lo < w_cut) {
                double hi = std::min(w_hi, w_cut);
                total += (hi - w_lo) / g;
                w_lo = hi;
            }
            if (w_hi > w_lo) total += std::log((w_hi - c * g) / (w_lo - c * g));
            return total;
        }
        case Family::RatioB: {
            double c = spec.c_at(k);
            return std::log((w_hi + c * g) / (w_lo + c * g));
        }
    }
    return 0.0;
}

// int_1^T P(R_k > t) dt for a constant-parameter scheme: pieces of width 1/g
// at t_j = (j + d*phi)/g, value F_k(g/(j+1+d*phi)) on (t_j, t_{j+1}].
// Exact summation for the first `head` pieces, then a midpoint-corrected
// closed-form integral for the rest.
double head_piece_sum(double c_phi, double d_y, const DistributionSpec& spec, std::int64_t k,
                      std::int64_t head) {
    const double g = c_phi * (1.0 + d_y);
    const double dphi = c_phi * d_y;
    KahanSum s;
    for (double j = c_phi; j <= c_phi + static_cast<double>(head) - 1.0; j += 1.0)
        s.add(spec.cdf(k, g / (j + 1.0 + dphi)) / g);
    return s.value();
}

double tail_area(double c_phi, double d_y, const DistributionSpec& spec, std::int64_t k,
                 double t_end, std::int64_t head, const double* cached_full_head) {
    if (t_end <= 1.0) return 0.0;
    const double g = c_phi * (1.0 + d_y);
    const double dphi = c_phi * d_y;
    const double j_first = c_phi;  // t_{j_first} = 1
    // last piece index: t_end in (t_J, t_{J+1}] with J = s(t_end) - 1
    const double j_last = ceil_eps(t_end * g - dphi) - 1.0;
    if (j_last < j_first) return 0.0;

    KahanSum area;
    double j_head_end = std::min(j_last - 1.0, j_first + static_cast<double>(head) - 1.0);
    if (cached_full_head && j_head_end == j_first + static_cast<double>(head) - 1.0) {
        area.add(*cached_full_head);
    } else {
        for (double j = j_first; j <= j_head_end; j += 1.0)
            area.add(spec.cdf(k, g / (j + 1.0 + dphi)) / g);
    }

    if (j_last - 1.0 > j_head_end) {
        // remaining full pieces j in [j_head_end+1, j_last-1]; midpoint rule
        // in reverse: sum_j f(j) ~ int over [a-1/2, b+1/2]
        double a = j_head_end + 1.0;
        double b = j_last - 1.0;
        area.add(closed_tail_integral(spec, k, g, a - 0.5 + 1.0 + dphi, b + 0.5 + 1.0 + dphi));
    }
    // partial piece at j_last: from t_{j_last} to t_end
    double t_j = (j_last + dphi) / g;
    area.add(spec.cdf(k, g / (j_last + 1.0 + dphi)) * (t_end - t_j));
    return area.value();
}

}  // namespace

double expected_g_trunc(double c_phi, double d_y, const DistributionSpec& spec,
                        std::int64_t k, double level) {
    if (level < 1.0) return std::max(level, 0.0);
    return 1.0 + tail_area(c_phi, d_y, spec, k, level, 4000, nullptr);
}

constexpr std::int64_t kTableHead = 2000;

ExpectedGTruncTable::ExpectedGTruncTable(double c_phi, double d_y, DistributionSpec spec)
    : c_phi_(c_phi), d_y_(d_y), spec_(std::move(spec)) {
    if (!spec_.index_dependent()) {
        head_sum_ = head_piece_sum(c_phi_, d_y_, spec_, 1, kTableHead);
        head_cached_ = true;
    }
}

double ExpectedGTruncTable::at(std::int64_t k, double level) const {
    if (level < 1.0) return std::max(level, 0.0);
    return 1.0 + tail_area(c_phi_, d_y_, spec_, k, level, kTableHead,
                           head_cached_ ? &head_sum_ : nullptr);
}

}  // namespace opplab
