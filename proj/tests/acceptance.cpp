#include <cstdio>

#include "opplab/suite.hpp"

int main() {
    auto result = opplab::suite::run_acceptance(1, "acceptance_out");
    std::fputs(result.report().c_str(), stdout);
    return result.all_pass() ? 0 : 1;
}
