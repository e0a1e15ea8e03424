#ifndef RISLAB_ACCEPTANCE_HPP
#define RISLAB_ACCEPTANCE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rislab {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::vector<int> criteria;  ///< empty: all of 1..9
    std::uint64_t seed = 20240601;
    int jobs = 1;
};

inline constexpr int kCriterionCount = 9;

/// Runs the acceptance checks in order. When `progress` is set, each result
/// line is written there as soon as the criterion finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            std::ostream* progress = nullptr);

CriterionResult run_criterion(int id, const AcceptanceOptions& options);

/// "PASS [3] title: detail (1.23 s)"
std::string format_result(const CriterionResult& r);

}  // namespace rislab

#endif  // RISLAB_ACCEPTANCE_HPP
