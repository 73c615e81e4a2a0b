#pragma once

#include <cstdint>

namespace ccheis {

/// Tolerances and budgets shared by the numerical routines.
struct QuadConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-300;
    /// Cap on integrand evaluations for a single adaptive integral.
    long max_evals = 20'000'000;
    long mc_samples = 100'000;
    int mc_strata = 64;
    std::uint64_t seed = 42;
};

} // namespace ccheis
