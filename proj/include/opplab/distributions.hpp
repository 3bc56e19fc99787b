#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "opplab/common.hpp"

namespace opplab {

enum class Family { Uniform, Power, RatioA, RatioB };

/// Per-index parameter sequence c_n for the ratio families. Either a
/// constant or k^-beta; arbitrary providers are allowed as long as a finite
/// sup is supplied (RatioA needs it for its tail profile).
struct CSeq {
    std::function<double(std::int64_t)> fn;
    double sup = 0.0;
    bool is_constant = false;
    double const_value = 0.0;

    double operator()(std::int64_t n) const { return fn(n); }

    static CSeq constant(double v);
    static CSeq power_decay(double beta);  // c_k = k^-beta, beta >= 0
};

struct TailProfile {
    double alpha = 1.0;   // tail exponent in F_n(t) ~ c t^alpha as t -> 0
    double c_unif = 1.0;  // the common constant of the uniformity condition
    std::optional<double> lipschitz_m;  // absent when no uniform Lipschitz bound exists
};

/// One of the four parametric cdf families on [0,1], together with the
/// closed-form quantities derived for Y_n = 1/U_n with U_n ~ F_n.
/// Immutable after construction; all operations are pure.
class DistributionSpec {
  public:
    DistributionSpec() = default;  // Uniform

    static DistributionSpec uniform();
    static DistributionSpec power(double alpha);   // alpha in (0,1)
    static DistributionSpec ratio_a(CSeq c_seq);   // F_n(x) = x/(1 - c_n x), needs sup_n c_n < inf
    static DistributionSpec ratio_b(CSeq c_seq);   // F_n(x) = x/(1 + c_n x), jump at x = 1

    Family family() const { return family_; }
    double power_alpha() const { return alpha_; }
    double c_at(std::int64_t n) const { return family_ == Family::RatioA || family_ == Family::RatioB ? c_seq_(n) : 0.0; }
    bool has_c_seq() const { return static_cast<bool>(c_seq_.fn); }
    const CSeq& c_seq() const { return c_seq_; }
    bool index_dependent() const;
    const std::string& label() const { return label_; }

    // cdf of F_n, total in x (0 below the support, 1 above it).
    double cdf(std::int64_t n, double x) const;

    // Smallest x with cdf(x) >= p. Returns exactly 1 in the RatioB atom region.
    double quantile(std::int64_t n, double p) const;

    // P(Y_n > y) for y >= 1.
    double y_tail(std::int64_t n, double y) const;

    // E[Y_n I(Y_n <= x)] in closed form; 0 for x < 1.
    double y_truncated_mean(std::int64_t n, double x) const;

    // psi_n(t) = E[e^{itY_n}]. Throws QuadratureBudgetExceeded if the
    // combined quadrature + analytic tail error estimate exceeds 1e-6.
    std::complex<double> psi(std::int64_t n, double t) const;

    TailProfile tail_profile() const;

  private:
    Family family_ = Family::Uniform;
    double alpha_ = 1.0;  // Power only
    CSeq c_seq_;          // Ratio families only
    std::string label_;
};

}  // namespace opplab
