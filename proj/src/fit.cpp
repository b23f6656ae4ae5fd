#include "escoil/fit.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "escoil/error.hpp"
#include "escoil/objective.hpp"
#include "escoil/recon.hpp"

namespace escoil {

std::vector<cplx> lls_init(const CoilImageStack& stack, std::span<const double> b) {
    if (b.size() != stack.matrix_rows()) {
        throw DimensionError("b has " + std::to_string(b.size()) + " entries, A has " +
                             std::to_string(stack.matrix_rows()) + " rows");
    }
    const Eigen::MatrixXcd gram = gram_matrix(stack);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(condition <= kMaxGramCondition)) {
        std::ostringstream msg;
        msg << "coil matrix is rank deficient: Gram condition " << condition << " (eigenvalues " << lo << " .. "
            << hi << ", limit " << kMaxGramCondition << ")";
        throw IllConditionedError(msg.str(), condition);
    }

    const Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    const Eigen::VectorXcd rhs = multiply_adjoint(stack, bv.cast<cplx>());
    const Eigen::LLT<Eigen::MatrixXcd> chol(gram);
    if (chol.info() != Eigen::Success) {
        throw IllConditionedError("Cholesky factorization of the coil Gram matrix failed", condition);
    }
    Eigen::VectorXcd x = chol.solve(rhs);
    // One step of iterative refinement against the true residual.
    const Eigen::VectorXcd residual = rhs - multiply_adjoint(stack, multiply(stack, x));
    x += chol.solve(residual);
    return {x.begin(), x.end()};
}

namespace {

std::size_t nth_prime(std::size_t n) {
    std::size_t found = 0;
    for (std::size_t p = 2;; ++p) {
        bool prime = true;
        for (std::size_t d = 2; d * d <= p; ++d) {
            if (p % d == 0) {
                prime = false;
                break;
            }
        }
        if (prime && found++ == n) {
            return p;
        }
    }
}

} // namespace

std::vector<cplx> restart_point(const std::vector<cplx>& x0, std::size_t j) {
    std::vector<cplx> x = x0;
    for (std::size_t c = 1; c < x.size(); ++c) {
        double turn = static_cast<double>(j) * std::sqrt(static_cast<double>(nth_prime(c - 1)));
        turn -= std::floor(turn);
        x[c] *= std::polar(1.0, 2.0 * std::numbers::pi * turn);
    }
    return x;
}

FitReport fit(const CoilImageStack& stack, const RssVolume& b, const OptimizerConfig& cfg, double threshold,
              std::string volume_id) {
    cfg.validate();
    if (b.slices != stack.slices || b.rows != stack.rows || b.cols != stack.cols) {
        throw DimensionError("RSS volume shape does not match the coil stack");
    }
    const Objective objective = Objective::hellinger(stack, b, threshold);
    const std::vector<cplx> x0 = lls_init(stack, b.values);

    FitReport report;
    double initial = 0.0;
    for (std::size_t j = 0; j <= cfg.restarts; ++j) {
        OptimizeResult run;
        bool stalled = false;
        try {
            run = run_optimizer(objective, to_params(restart_point(x0, j)), cfg);
        } catch (const StallError& stall) {
            run = stall.best();
            stalled = true;
        }
        report.total_iterations += run.iterations;
        if (j == 0) {
            initial = run.initial_objective;
        }
        if (j == 0 || run.final_objective < report.optimization.final_objective) {
            report.optimization = std::move(run);
            report.stalled = stalled;
            report.best_start = j;
        }
    }

    const OptimizeResult& opt = report.optimization;
    if (!(opt.final_objective <= initial)) {
        throw DivergenceError("fit ended above its starting objective");
    }
    FitManifest& m = report.manifest;
    m.volume_id = std::move(volume_id);
    m.weights = to_weights(opt.params);
    m.method = cfg.method;
    m.iterations = report.total_iterations;
    m.initial_objective = initial;
    m.final_objective = opt.final_objective;
    m.threshold = threshold;
    m.crop_rows = stack.rows;
    m.crop_cols = stack.cols;
    return report;
}

} // namespace escoil
