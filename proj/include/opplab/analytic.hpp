#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "opplab/common.hpp"
#include "opplab/distributions.hpp"

namespace opplab {

/// Weight sequences a_k, b_n with the tail exponent alpha of the scheme and,
/// when the paper supplies one, the exact limit A.
struct WeightScheme {
    std::function<double(std::int64_t)> a;
    std::function<double(std::int64_t)> b;
    double alpha = 1.0;
    std::optional<double> limit;
    std::string label;
};

// sum_{k<=n} a_k^alpha / b_n^alpha — the small-weights condition, reported
// numerically (it should tend to 0 for valid schemes).
double weight_ratio(const WeightScheme& w, std::int64_t n);

/// Finite-n values of the sequence conditions. C_n = sum_{k<=n} 1/c_k;
/// ell, kappa drive the RatioA limit, m the RatioB limit.
struct SequenceStats {
    std::int64_t n = 0;
    double c_sum = 0.0;  // C_n
    double ell = 0.0;
    double kappa = 0.0;
    double m = 0.0;
};

SequenceStats sequence_stats(const CSeq& c_seq, std::int64_t n);

struct RatioALimits {
    double ell;
    double kappa;
    double predicted_limit;  // ell + 1 + kappa
};
// Pre: C_n > 1 (so log C_n > 0).
RatioALimits limits_ratio_a(const CSeq& c_seq, std::int64_t n);

struct RatioBLimits {
    double m;
    double predicted_limit;  // 1 - m
};
RatioBLimits limits_ratio_b(const CSeq& c_seq, std::int64_t n);

// Finite-n centering (1/b_n) sum_{k<=n} a_k E[Y_k I(Y_k <= b_n/a_k)].
// Terms with a_k = 0 contribute nothing.
double centering(const DistributionSpec& spec, const WeightScheme& w, std::int64_t n);

// Exact tail for constant-parameter schemes (phi = c, y = d):
// F_n( c(1+d) / (ceil(xc + (x-1)dc) + cd) ), with the integer-safe ceiling.
double exact_tail_constant_scheme(double c_phi, double d_y, const DistributionSpec& spec,
                                  std::int64_t n, double x);

// (F_n(1/(x+1)), F_n(1/x)); valid as P(R_n > x) bounds when phi_n >= 1.
std::pair<double, double> tail_sandwich(const DistributionSpec& spec, std::int64_t n, double x);

// M [ F_i(1/x)/y^2 + F_j(1/y)/x^2 ]; throws NoLipschitzConstant when the
// spec has no uniform Lipschitz bound.
double dependence_bound(const DistributionSpec& spec, std::int64_t i, std::int64_t j,
                        double x, double y);

/// Truncation machinery: clamp level c_n = n (log n)^b, diagnostic scale n^gamma.
struct TruncationPlan {
    double b = 2.0;      // >= 2
    double gamma = 1.2;  // > 1 for the strong law, > 1/2 for the diagnostic

    double level(std::int64_t n) const;  // c_n = n log^b n
};

double g_trunc(double x, std::int64_t n, const TruncationPlan& plan);

struct TailRatio {
    double value = 0.0;
    bool underflow = false;  // y_tail too small to divide by
};
// P(R_n > x) / P(Y_n > x) for constant schemes.
TailRatio uniform_tail_ratio(double c_phi, double d_y, const DistributionSpec& spec,
                             std::int64_t n, double x);

// E[g(R_k)] for a constant-parameter scheme with clamp level `level`:
// equals level when level < 1, else 1 + int_1^level P(R_k > t) dt with the
// integral evaluated from the exact piecewise-constant closed-form tail.
double expected_g_trunc(double c_phi, double d_y, const DistributionSpec& spec,
                        std::int64_t k, double level);

/// Incremental evaluator for expected_g_trunc over an increasing sequence of
/// levels, shared-head caching for index-independent F. Produces the same
/// values as expected_g_trunc.
class ExpectedGTruncTable {
  public:
    ExpectedGTruncTable(double c_phi, double d_y, DistributionSpec spec);
    double at(std::int64_t k, double level) const;

  private:
    double c_phi_;
    double d_y_;
    DistributionSpec spec_;
    bool head_cached_ = false;  // index-independent F: exact head shared across k
    double head_sum_ = 0.0;
};

}  // namespace opplab
