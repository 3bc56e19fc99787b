#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace opplab {

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct QuadratureBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoLipschitzConstant : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Compensated accumulator (Kahan-Babuska). Long weighted sums over 1e7
/// terms lose several digits with naive accumulation; the log-scale limits
/// downstream are sensitive to that.
class KahanSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Ceiling with an integer-safety epsilon: values within 1e-9 of an integer
// are treated as that integer, so round-decimal thresholds do not straddle
// the boundary because of binary representation.
inline double ceil_eps(double v) {
    double r = std::nearbyint(v);
    if (std::abs(v - r) <= 1e-9) return r;
    return std::ceil(v);
}

inline double clamp_prob(double p) {
    if (p < 0.0) return 0.0;
    if (p > 1.0) return 1.0;
    return p;
}

namespace quadrature {

template <typename T>
struct Result {
    T value{};
    double error = 0.0;
};

namespace detail {

template <typename F, typename T>
Result<T> simpson_rec(F&& f, double a, double b, T va, T vm, T vb,
                      T whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    T vlm = f(lm);
    T vrm = f(rm);
    double h = b - a;
    T left = (h / 12.0) * (va + 4.0 * vlm + vm);
    T right = (h / 12.0) * (vm + 4.0 * vrm + vb);
    T delta = left + right - whole;
    double err = std::abs(delta);
    if (depth <= 0 || err <= 15.0 * tol) {
        Result<T> r;
        r.value = left + right + delta / 15.0;
        r.error = err / 15.0;
        return r;
    }
    auto rl = simpson_rec(f, a, m, va, vlm, vm, left, 0.5 * tol, depth - 1);
    auto rr = simpson_rec(f, m, b, vm, vrm, vb, right, 0.5 * tol, depth - 1);
    Result<T> r;
    r.value = rl.value + rr.value;
    r.error = rl.error + rr.error;
    return r;
}

}  // namespace detail

/// Adaptive Simpson on [a, b]; T may be double or std::complex<double>.
template <typename F>
auto adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 52)
    -> Result<decltype(f(a))> {
    using T = decltype(f(a));
    if (!(b > a)) return {};
    T va = f(a);
    T vb = f(b);
    T vm = f(0.5 * (a + b));
    T whole = ((b - a) / 6.0) * (va + 4.0 * vm + vb);
    return detail::simpson_rec(f, a, b, va, vm, vb, whole, tol, max_depth);
}

}  // namespace quadrature

// FNV-1a, used for config hashes in experiment provenance.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace opplab
