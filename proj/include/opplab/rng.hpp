#pragma once

#include <cstdint>

namespace opplab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Purpose tag: part of the stream id so the same replication index never
// reuses variates across different experiment kinds.
enum class Purpose : std::uint64_t {
    Simulate = 1,
    WeakLaw = 2,
    StrongLaw = 3,
    TailValidate = 4,
    IndepValidate = 5,
    CFValidate = 6,
    TailEquiv = 7,
    TruncDiagnostic = 8,
    Oracle = 9,
};

/// Counter-based stream keyed by (base_seed, replication, purpose).
/// Same key and counter always give the same variate, so replications can
/// run in any order (or in parallel) without changing results.
class RngStream {
  public:
    RngStream(std::uint64_t base_seed, std::uint64_t replication, Purpose purpose)
        : key_(splitmix64(splitmix64(splitmix64(base_seed) ^ (0x9E3779B97F4A7C15ULL * (replication + 1))) ^
                          (0xC2B2AE3D27D4EB4FULL * static_cast<std::uint64_t>(purpose)))) {}

    std::uint64_t next_u64() { return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * (++ctr_)); }

    /// Uniform variate in the open interval (0, 1).
    double next_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

}  // namespace opplab
