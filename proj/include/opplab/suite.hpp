#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opplab/experiments.hpp"

namespace opplab::suite {

struct CriterionResult {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

struct SuiteResult {
    std::vector<CriterionResult> criteria;

    bool all_pass() const;
    // One PASS/FAIL line per criterion.
    std::string report() const;
};

/// Runs the full acceptance battery. When out_dir is nonempty, each
/// experiment-backed criterion writes result.csv / summary.txt / manifest.txt
/// under out_dir/c<k>_<name>/.
SuiteResult run_acceptance(std::uint64_t base_seed, const std::string& out_dir);

// Writes the three artifact files for one experiment run.
void write_experiment(const std::string& dir, const ExperimentResult& res,
                      const std::string& manifest);

}  // namespace opplab::suite
