#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "escoil/error.hpp"
#include "escoil/manifest.hpp"
#include "escoil/objective.hpp"

namespace escoil {

struct OptimizerConfig {
    Method method = Method::lbfgs;
    std::size_t max_iterations = 500;
    // Stop when ||g|| <= gradient_tolerance * (1 + |f|).
    double gradient_tolerance = 1e-8;
    // Stop when |f_prev - f| <= objective_tolerance * max(|f_prev|, |f|).
    double objective_tolerance = 1e-10;
    std::size_t lbfgs_memory = 10;
    // Fixed GD step; 0 selects 1e-3 * ||x0|| / ||g0||.
    double gd_step = 0.0;
    // Initial LM damping as a multiple of trace(J^T J) / (2k). Zero gives plain Gauss-Newton.
    double lm_damping_init = 1e-3;
    // Extra starts tried by fit() after the lls_init start. The objective is not
    // convex in the relative coil phases, so one local solve can stop in a
    // worse basin when coil phases disagree strongly across the field of view.
    std::size_t restarts = 0;
    // All solvers are deterministic; kept so manifests of stochastic variants stay comparable.
    std::uint64_t seed = 0;

    void validate() const;
};

enum class StopReason { gradient, objective, max_iterations, stalled };

std::string_view to_string(StopReason r);

struct TraceEntry {
    std::size_t iteration = 0;
    double objective = 0.0;
    double gradient_norm = 0.0;
};

struct OptimizeResult {
    Eigen::VectorXd params;
    std::vector<TraceEntry> trace; // entry 0 is the starting point
    std::size_t iterations = 0;    // accepted steps
    std::size_t evaluations = 0;   // objective evaluations
    double initial_objective = 0.0;
    double final_objective = 0.0;
    StopReason reason = StopReason::max_iterations;
};

// Raised when no acceptable step can be found; carries the best iterate.
class StallError : public Error {
public:
    StallError(const std::string& what, OptimizeResult best) : Error(what), best_(std::move(best)) {}
    const OptimizeResult& best() const noexcept { return best_; }

private:
    OptimizeResult best_;
};

OptimizeResult run_gd(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerConfig& cfg);
OptimizeResult run_lm(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerConfig& cfg);
OptimizeResult run_lbfgs(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerConfig& cfg);

// Dispatches on cfg.method.
OptimizeResult run_optimizer(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerConfig& cfg);

} // namespace escoil
