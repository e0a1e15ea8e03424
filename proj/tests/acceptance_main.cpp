// Acceptance runner: one PASS/FAIL line per criterion.

#include <cstdlib>
#include <iostream>
#include <string>

#include "rislab/acceptance.hpp"

int main(int argc, char** argv) {
    rislab::AcceptanceOptions options;
    for (int i = 1; i < argc; ++i) options.criteria.push_back(std::stoi(argv[i]));
    const auto results = rislab::run_acceptance(options, &std::cout);
    int failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
