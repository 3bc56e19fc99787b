#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "opplab/analytic.hpp"
#include "opplab/expansion.hpp"

namespace opplab {

enum class Mode {
    WeakLaw,
    StrongLawExact,
    StrongLawGeneral,
    TailValidate,
    IndepValidate,
    CFValidate,
    TailEquivValidate,
    TruncDiagnostic,
};

struct ExperimentConfig {
    ExpansionScheme scheme;
    WeightScheme weights;
    std::vector<std::int64_t> n_grid;
    std::int64_t replications = 1;
    std::uint64_t base_seed = 1;
    std::vector<double> epsilons{0.05, 0.1, 0.2};
    Mode mode = Mode::WeakLaw;
    TruncationPlan plan{};

    // validator inputs
    std::int64_t n_samples = 1000000;
    std::vector<double> x_grid;
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> t_vector;
    std::int64_t target_index = 1;  // which R_n the tail validators observe

    std::string label;
};

struct StatRow {
    std::int64_t n;
    std::string name;
    double value;
};

struct CheckLine {
    std::string name;
    bool pass;
    std::string detail;
};

/// Long-format rows plus PASS/FAIL assertion lines. `samples` keeps the raw
/// per-replication values per checkpoint for downstream acceptance checks.
/// Wall time is intentionally not serialized: outputs must be byte-stable.
struct ExperimentResult {
    std::vector<StatRow> rows;
    std::vector<CheckLine> checks;
    std::map<std::int64_t, std::vector<double>> samples;
    std::uint64_t config_hash = 0;
    std::uint64_t base_seed = 0;
    double wall_seconds = 0.0;
    std::string label;

    bool all_pass() const;
    std::string csv() const;
    std::string summary() const;
};

ExperimentResult run_weak_law(const ExperimentConfig& cfg);
ExperimentResult run_strong_law(const ExperimentConfig& cfg);
ExperimentResult validate_tails(const ExperimentConfig& cfg);
ExperimentResult validate_independence(const ExperimentConfig& cfg);
ExperimentResult validate_cf(const ExperimentConfig& cfg);
ExperimentResult validate_tail_equivalence(const ExperimentConfig& cfg);
ExperimentResult trunc_diagnostic(const ExperimentConfig& cfg);

// Worker cap: OPPLAB_THREADS when set, else hardware concurrency.
int max_threads();

}  // namespace opplab
