#pragma once

#include <span>
#include <string>
#include <vector>

#include "escoil/manifest.hpp"
#include "escoil/optimizers.hpp"
#include "escoil/volume.hpp"

namespace escoil {

// Condition number of A^H A above which lls_init refuses to solve.
inline constexpr double kMaxGramCondition = 1e12;

// argmin ||Ax - b|| through the k x k normal equations, with one step of
// iterative refinement. Throws IllConditionedError for rank-deficient A.
std::vector<cplx> lls_init(const CoilImageStack& stack, std::span<const double> b);

struct FitReport {
    FitManifest manifest;
    OptimizeResult optimization; // run that produced the manifest weights
    bool stalled = false;        // line search gave up; manifest holds the best iterate
    std::size_t best_start = 0;  // 0 is the lls_init start, j > 0 the j-th phase restart
    std::size_t total_iterations = 0;
};

// Start j of a phase-restart sequence: coil c of x0 rotated by
// 2*pi*frac(j*sqrt(p)), p the c-th prime. Coil 0 is never rotated and j = 0
// returns x0 unchanged.
std::vector<cplx> restart_point(const std::vector<cplx>& x0, std::size_t j);

// Builds the masked objective, starts from lls_init and runs cfg.method, then
// cfg.restarts more times from restart_point(x0, j); keeps the lowest objective.
// manifest.initial_objective is always the objective at the lls_init start.
FitReport fit(const CoilImageStack& stack, const RssVolume& b, const OptimizerConfig& cfg,
              double threshold = 0.0, std::string volume_id = {});

} // namespace escoil
