#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "ccheis/config.hpp"
#include "ccheis/group.hpp"

namespace ccheis {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    /// Fitted constants, worst errors and, on failure, the offending spec and values.
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    /// Thins the family and the sample counts for a fast smoke run.
    bool quick = false;
    /// Progress lines go here when set.
    std::ostream* log = nullptr;
};

/// The reference family: a in {(1), (0.5,1), (0.25,0.5,1)}, k_j in {1,2,4}, m in {1,2},
/// b_l in {0, 0.1, 1, 10, 100}.
std::vector<GroupSpec> acceptance_family();
std::vector<double> acceptance_radii();
/// k_top / n >= 1/4.
bool satisfies_top_block_bound(const GroupSpec& spec);

/// Criteria are numbered 1..10; an empty `which` runs all of them.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts, const std::vector<int>& which = {});

std::string format_result(const CriterionResult& r);

} // namespace ccheis
