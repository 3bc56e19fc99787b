#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opplab/analytic.hpp"
#include "opplab/distributions.hpp"
#include "opplab/expansion.hpp"

namespace opplab::grammar {

// `uniform | power:alpha=<v> | ratioA:c=<cspec> | ratioB:c=<cspec>` where
// <cspec> is `const=<v>`, `k^-<beta>`, or a bare constant.
DistributionSpec parse_family(const std::string& text);

// `luroth` or comma-separated fields:
// `phi=const:<int> | phi=identity`, `y=const:<d>`, `dist=<family>`, `b1=<int>`.
ExpansionScheme parse_scheme(const std::string& text);

// Comma-separated fields `a=...`, `b=...`, optional `alpha=<v>`, `limit=<v>`.
// a: `1/k | log^p(k)/k | const:<v> | 1/c_k`; b: `log^b(n) | Cn_logCn | n^g`.
// The `1/c_k` and `Cn_logCn` forms need the c-sequence of `dist`.
WeightScheme parse_weights(const std::string& text, const DistributionSpec* dist = nullptr);

// `trunc.b=<real>,gamma=<real>` (either field optional).
TruncationPlan parse_plan(const std::string& text);

// Comma-separated counts; scientific notation like 1e5 accepted.
std::vector<std::int64_t> parse_index_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);

}  // namespace opplab::grammar
