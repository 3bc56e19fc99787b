#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opplab/common.hpp"
#include "opplab/distributions.hpp"
#include "opplab/rng.hpp"

namespace opplab {

// delta_j(h, k, y) = phi(h)(1+y) / (k + phi(h) y); equals 1 exactly at k = phi(h).
inline double delta(double phi_val, double k, double y) {
    if (!(phi_val > 0.0)) throw DomainError("delta: phi must be positive");
    if (y < 0.0) throw DomainError("delta: y must be nonnegative");
    if (k < phi_val) throw DomainError("delta: k below phi(h)");
    if (k == phi_val) return 1.0;  // exact at the partition endpoint
    return phi_val * (1.0 + y) / (k + phi_val * y);
}

/// The triple (phi_n, y_n-rule, F_n family) defining the digit chain.
/// phi is restricted to integer values >= 1: the interval-partition
/// argument needs the k = phi(h) endpoint attainable by an integer digit.
struct ExpansionScheme {
    std::function<double(std::int64_t n, double h)> phi;
    std::function<double(std::int64_t n, const std::vector<double>& digits)> y_rule;
    DistributionSpec dist;
    std::int64_t b1 = 1;
    std::string name;

    // Set when the corresponding rule is constant; the independence and
    // exact-tail machinery is only licensed for constant-parameter schemes.
    std::optional<double> const_phi;
    std::optional<double> const_y;

    bool constant_parameters() const { return const_phi.has_value() && const_y.has_value(); }

    static ExpansionScheme luroth();
    static ExpansionScheme constant(double c_phi, double d_y, DistributionSpec dist);
    // phi_n(h) = h (Engel-type growth constraint, dependent ratios)
    static ExpansionScheme identity_phi(double d_y, DistributionSpec dist);
};

struct Step {
    double digit;    // B_{n+1}; exact integer when !overflow
    bool overflow;   // candidate exceeded 2^53; digit stored as a real
    double ratio;    // R_n >= 1
    double draw;     // the F_n-distributed variate U'_n
    double y;        // Y_n used for this step
};

/// One realized path of the chain.
struct Trajectory {
    std::vector<double> digits;    // B_1 .. B_{N+1}
    std::vector<bool> overflow;    // aligned with digits
    std::vector<double> y_values;  // Y_1 .. Y_N
    std::vector<double> ratios;    // R_1 .. R_N
    std::vector<double> draws;     // U'_1 .. U'_N
    std::string scheme_label;
    std::uint64_t seed = 0;
};

Step next_digit(const ExpansionScheme& scheme, std::int64_t n, double h_n, double y_n, double p);

Trajectory simulate(const ExpansionScheme& scheme, std::int64_t n_steps, RngStream& stream,
                    bool retain_draws = true);

/// Streaming form: invokes visit(n, step) for n = 1..n_steps without
/// materializing the whole trajectory. Digit history is still tracked so
/// the y-rule can depend on it.
template <typename Visit>
void simulate_visit(const ExpansionScheme& scheme, std::int64_t n_steps, RngStream& stream,
                    Visit&& visit) {
    if (n_steps < 1) throw DomainError("simulate: n_steps must be >= 1");
    // Constant-y schemes never look at the digit history, so long runs can
    // stay O(1) in memory.
    const bool keep_history = !scheme.const_y.has_value();
    std::vector<double> history;
    if (keep_history) {
        history.reserve(static_cast<std::size_t>(n_steps) + 1);
        history.push_back(static_cast<double>(scheme.b1));
    }
    double h = static_cast<double>(scheme.b1);
    for (std::int64_t n = 1; n <= n_steps; ++n) {
        double y = keep_history ? scheme.y_rule(n, history) : *scheme.const_y;
        Step s = next_digit(scheme, n, h, y, stream.next_open01());
        if (keep_history) history.push_back(s.digit);
        h = s.digit;
        visit(n, s);
    }
}

}  // namespace opplab
