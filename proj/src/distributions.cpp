#include "opplab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace opplab {

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

CSeq CSeq::constant(double v) {
    if (!(v > 0.0)) throw DomainError("c sequence must be positive");
    CSeq s;
    s.fn = [v](std::int64_t) { return v; };
    s.sup = v;
    s.is_constant = true;
    s.const_value = v;
    return s;
}

CSeq CSeq::power_decay(double beta) {
    if (beta < 0.0) throw DomainError("c_k = k^-beta needs beta >= 0");
    if (beta == 0.0) return constant(1.0);
    CSeq s;
    s.fn = [beta](std::int64_t k) { return std::pow(static_cast<double>(k), -beta); };
    s.sup = 1.0;  // attained at k = 1
    s.is_constant = false;
    return s;
}

DistributionSpec DistributionSpec::uniform() {
    DistributionSpec d;
    d.family_ = Family::Uniform;
    d.label_ = "uniform";
    return d;
}

DistributionSpec DistributionSpec::power(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("power family needs alpha in (0,1)");
    DistributionSpec d;
    d.family_ = Family::Power;
    d.alpha_ = alpha;
    d.label_ = "power:alpha=" + format_double(alpha);
    return d;
}

DistributionSpec DistributionSpec::ratio_a(CSeq c_seq) {
    if (!(c_seq.sup > 0.0) || !std::isfinite(c_seq.sup))
        throw DomainError("ratioA needs a finite positive sup of c_n");
    DistributionSpec d;
    d.family_ = Family::RatioA;
    d.c_seq_ = std::move(c_seq);
    d.label_ = d.c_seq_.is_constant ? "ratioA:c=const=" + format_double(d.c_seq_.const_value)
                                    : "ratioA:c=seq(sup=" + format_double(d.c_seq_.sup) + ")";
    return d;
}

DistributionSpec DistributionSpec::ratio_b(CSeq c_seq) {
    DistributionSpec d;
    d.family_ = Family::RatioB;
    d.c_seq_ = std::move(c_seq);
    d.label_ = d.c_seq_.is_constant ? "ratioB:c=const=" + format_double(d.c_seq_.const_value)
                                    : "ratioB:c=seq(sup=" + format_double(d.c_seq_.sup) + ")";
    return d;
}

bool DistributionSpec::index_dependent() const {
    if (family_ == Family::RatioA || family_ == Family::RatioB) return !c_seq_.is_constant;
    return false;
}

double DistributionSpec::cdf(std::int64_t n, double x) const {
    if (x < 0.0) return 0.0;
    switch (family_) {
        case Family::Uniform:
            return x >= 1.0 ? 1.0 : x;
        case Family::Power:
            return x >= 1.0 ? 1.0 : std::pow(x, alpha_);
        case Family::RatioA: {
            double c = c_seq_(n);
            if (x >= 1.0 / (1.0 + c)) return 1.0;
            return clamp_prob(x / (1.0 - c * x));
        }
        case Family::RatioB: {
            double c = c_seq_(n);
            // Jump of size c/(1+c) attributed to x = 1 from the right:
            // cdf(1) = 1/(1+c), cdf(x) = 1 for x > 1.
            if (x > 1.0) return 1.0;
            return clamp_prob(x / (1.0 + c * x));
        }
    }
    return 0.0;
}

double DistributionSpec::quantile(std::int64_t n, double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile needs p in [0,1]");
    switch (family_) {
        case Family::Uniform:
            return p;
        case Family::Power:
            return std::pow(p, 1.0 / alpha_);
        case Family::RatioA: {
            double c = c_seq_(n);
            return p / (1.0 + c * p);
        }
        case Family::RatioB: {
            double c = c_seq_(n);
            if (p > 1.0 / (1.0 + c)) return 1.0;  // the atom
            return p / (1.0 - c * p);
        }
    }
    return 0.0;
}

double DistributionSpec::y_tail(std::int64_t n, double y) const {
    if (y < 1.0) return 1.0;
    switch (family_) {
        case Family::Uniform:
            return 1.0 / y;
        case Family::Power:
            return std::pow(y, -alpha_);
        case Family::RatioA: {
            double c = c_seq_(n);
            if (y < 1.0 + c) return 1.0;
            return 1.0 / (y - c);
        }
        case Family::RatioB: {
            double c = c_seq_(n);
            return 1.0 / (y + c);
        }
    }
    return 0.0;
}

double DistributionSpec::y_truncated_mean(std::int64_t n, double x) const {
    if (x < 1.0) return 0.0;
    switch (family_) {
        case Family::Uniform:
            return std::log(x);
        case Family::Power:
            return (alpha_ / (1.0 - alpha_)) * (std::pow(x, 1.0 - alpha_) - 1.0);
        case Family::RatioA: {
            double c = c_seq_(n);
            if (x < 1.0 + c) return 0.0;
            // antiderivative of t/(t-c)^2 is log(t-c) - c/(t-c), between 1+c and x
            return std::log(x - c) - c / (x - c) + c;
        }
        case Family::RatioB: {
            double c = c_seq_(n);
            // atom contributes P(Y = 1) * 1 = c/(1+c); already inside the
            // closed form log((x+c)/(1+c)) + c/(x+c)
            return std::log((x + c) / (1.0 + c)) + c / (x + c);
        }
    }
    return 0.0;
}

namespace {

// k-th derivative of the Y-survival function at v, for the asymptotic tail
// of the oscillatory integral. All four families have S of either the form
// (v + d)^-1 or v^-alpha.
struct SurvivalShape {
    bool is_power = false;
    double d = 0.0;      // S(v) = 1/(v + d)
    double alpha = 1.0;  // S(v) = v^-alpha

    double deriv(int k, double v) const {
        if (is_power) {
            double coef = 1.0;
            for (int j = 0; j < k; ++j) coef *= (alpha + j);
            double sign = (k % 2 == 0) ? 1.0 : -1.0;
            return sign * coef * std::pow(v, -alpha - k);
        }
        double coef = 1.0;
        for (int j = 1; j <= k; ++j) coef *= j;
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        return sign * coef * std::pow(v + d, -(k + 1));
    }
};

}  // namespace

std::complex<double> DistributionSpec::psi(std::int64_t n, double t) const {
    using cd = std::complex<double>;
    if (t == 0.0) return cd(1.0, 0.0);
    if (t < 0.0) return std::conj(psi(n, -t));

    const cd it(0.0, t);

    // E[e^{itY}] = e^{it} + it * J with J = int_1^inf e^{itv} P(Y > v) dv.
    // J is split into a closed-form flat piece (RatioA support gap), a
    // numeric piece on [a0, W], and an integration-by-parts tail from W.
    SurvivalShape shape;
    double a0 = 1.0;
    cd flat(0.0, 0.0);
    switch (family_) {
        case Family::Uniform:
            shape.d = 0.0;
            break;
        case Family::Power:
            shape.is_power = true;
            shape.alpha = alpha_;
            break;
        case Family::RatioA: {
            double c = c_seq_(n);
            shape.d = -c;
            a0 = 1.0 + c;
            flat = (std::exp(it * a0) - std::exp(it)) / it;  // S = 1 on [1, 1+c]
            break;
        }
        case Family::RatioB:
            shape.d = c_seq_(n);
            break;
    }

    double w_end = std::max(a0 + 1.0, 40.0 / t);
    auto integrand = [&](double v) { return std::exp(it * v) / (shape.is_power ? std::pow(v, shape.alpha) : (v + shape.d)); };
    auto quad = quadrature::adaptive_simpson(integrand, a0, w_end, 1e-10);

    constexpr int kOrder = 10;
    cd tail(0.0, 0.0);
    cd it_pow = it;
    const cd osc = std::exp(it * w_end);
    for (int k = 0; k < kOrder; ++k) {
        tail -= osc * shape.deriv(k, w_end) / it_pow;
        it_pow *= it;
    }
    double tail_remainder = std::abs(shape.deriv(kOrder - 1, w_end)) / std::pow(t, kOrder);

    double err = t * (quad.error + tail_remainder);
    if (err > 1e-6)
        throw QuadratureBudgetExceeded("psi error estimate " + std::to_string(err) + " exceeds 1e-6");

    return std::exp(cd(0.0, t)) + it * (flat + quad.value + tail);
}

TailProfile DistributionSpec::tail_profile() const {
    TailProfile p;
    switch (family_) {
        case Family::Uniform:
            p = {1.0, 1.0, 1.0};
            break;
        case Family::Power:
            // density alpha x^{alpha-1} blows up at 0: no uniform Lipschitz bound
            p = {alpha_, 1.0, std::nullopt};
            break;
        case Family::RatioA: {
            double cs = c_seq_.sup;
            p = {1.0, 1.0, (1.0 + cs) * (1.0 + cs)};
            break;
        }
        case Family::RatioB:
            // the cdf jumps at x = 1: no Lipschitz constant
            p = {1.0, 1.0, std::nullopt};
            break;
    }
    return p;
}

}  // namespace opplab
