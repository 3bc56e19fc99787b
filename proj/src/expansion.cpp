#include "opplab/expansion.hpp"

#include <cmath>
#include <limits>

namespace opplab {

namespace {

constexpr double kDigitLimit = 9007199254740992.0;  // 2^53

double require_integer_phi(double v) {
    if (!(v >= 1.0) || std::floor(v) != v)
        throw DomainError("phi must be integer-valued and >= 1");
    return v;
}

}  // namespace

ExpansionScheme ExpansionScheme::luroth() {
    return constant(1.0, 0.0, DistributionSpec::uniform());
}

ExpansionScheme ExpansionScheme::constant(double c_phi, double d_y, DistributionSpec dist) {
    require_integer_phi(c_phi);
    if (d_y < 0.0) throw DomainError("y rule must be nonnegative");
    ExpansionScheme s;
    s.phi = [c_phi](std::int64_t, double) { return c_phi; };
    s.y_rule = [d_y](std::int64_t, const std::vector<double>&) { return d_y; };
    s.dist = std::move(dist);
    s.const_phi = c_phi;
    s.const_y = d_y;
    s.name = "phi=const:" + std::to_string(static_cast<long long>(c_phi)) +
             ",y=const:" + std::to_string(d_y) + ",dist=" + s.dist.label();
    if (c_phi == 1.0 && d_y == 0.0 && s.dist.family() == Family::Uniform) s.name = "luroth";
    return s;
}

ExpansionScheme ExpansionScheme::identity_phi(double d_y, DistributionSpec dist) {
    if (d_y < 0.0) throw DomainError("y rule must be nonnegative");
    ExpansionScheme s;
    s.phi = [](std::int64_t, double h) { return h; };
    s.y_rule = [d_y](std::int64_t, const std::vector<double>&) { return d_y; };
    s.dist = std::move(dist);
    s.const_y = d_y;
    s.name = "phi=identity,y=const:" + std::to_string(d_y) + ",dist=" + s.dist.label();
    return s;
}

Step next_digit(const ExpansionScheme& scheme, std::int64_t n, double h_n, double y_n, double p) {
    if (!(h_n >= 1.0)) throw DomainError("next_digit: digit history must start at h >= 1");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("next_digit: p must lie in (0,1)");
    if (y_n < 0.0) throw DomainError("next_digit: y must be nonnegative");

    const double phi = require_integer_phi(scheme.phi(n, h_n));
    const double u = scheme.dist.quantile(n, p);
    // phi may have saturated to infinity on Engel-type chains; keep inf*0
    // from poisoning the arithmetic
    const double phiy = y_n == 0.0 ? 0.0 : phi * y_n;
    const double g = phi * (1.0 + y_n);  // numerator of delta
    const double candidate = g / u - phiy;

    Step step;
    step.draw = u;
    step.y = y_n;

    if (!(candidate <= kDigitLimit)) {
        // Digit astronomically large (or beyond double range): store the real
        // candidate, flag it, and fall back to R = 1/U'. The bracketing
        // invariant caps the induced error at A_n = 1/g <= 1.
        step.digit = std::isnan(candidate) ? std::numeric_limits<double>::infinity() : candidate;
        step.overflow = true;
        step.ratio = 1.0 / u;
        return step;
    }

    double k = std::floor(candidate);
    // Bracket verify-and-adjust in the half-open convention
    // delta(h, k+1, y) < U <= delta(h, k, y).
    if (u > g / (k + phiy)) k -= 1.0;
    else if (u <= g / (k + 1.0 + phiy)) k += 1.0;
    if (k < phi) k = phi;

    step.digit = k;
    step.overflow = false;
    step.ratio = (k + phiy) / g;  // 1/delta(h, k, y)
    if (step.ratio < 1.0) step.ratio = 1.0;
    return step;
}

Trajectory simulate(const ExpansionScheme& scheme, std::int64_t n_steps, RngStream& stream,
                    bool retain_draws) {
    Trajectory t;
    t.scheme_label = scheme.name;
    t.digits.reserve(static_cast<std::size_t>(n_steps) + 1);
    t.overflow.reserve(static_cast<std::size_t>(n_steps) + 1);
    t.digits.push_back(static_cast<double>(scheme.b1));
    t.overflow.push_back(false);
    t.y_values.reserve(n_steps);
    t.ratios.reserve(n_steps);
    if (retain_draws) t.draws.reserve(n_steps);
    simulate_visit(scheme, n_steps, stream, [&](std::int64_t, const Step& s) {
        t.digits.push_back(s.digit);
        t.overflow.push_back(s.overflow);
        t.y_values.push_back(s.y);
        t.ratios.push_back(s.ratio);
        if (retain_draws) t.draws.push_back(s.draw);
    });
    return t;
}

}  // namespace opplab
