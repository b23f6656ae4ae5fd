#include "escoil/optimizers.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

namespace escoil {

void OptimizerConfig::validate() const {
    if (!(gradient_tolerance > 0.0) || !(objective_tolerance > 0.0)) {
        throw DomainError("optimizer tolerances must be positive");
    }
    if (lbfgs_memory < 1) {
        throw DomainError("lbfgs_memory must be at least 1");
    }
    if (gd_step < 0.0 || lm_damping_init < 0.0) {
        throw DomainError("gd_step and lm_damping_init must be nonnegative");
    }
}

std::string_view to_string(StopReason r) {
    switch (r) {
    case StopReason::gradient:
        return "gradient";
    case StopReason::objective:
        return "objective";
    case StopReason::max_iterations:
        return "max_iterations";
    case StopReason::stalled:
        return "stalled";
    }
    return "?";
}

namespace {

constexpr int kMaxStepTrials = 40;
constexpr double kArmijo = 1e-4;

bool gradient_converged(const Eigen::VectorXd& g, double f, const OptimizerConfig& cfg) {
    return g.norm() <= cfg.gradient_tolerance * (1.0 + std::abs(f));
}

bool objective_converged(double before, double after, const OptimizerConfig& cfg) {
    return after == 0.0 ||
           std::abs(before - after) <= cfg.objective_tolerance * std::max(std::abs(before), std::abs(after));
}

OptimizeResult start(const Eigen::VectorXd& x0, double f0, const Eigen::VectorXd& g0) {
    OptimizeResult out;
    out.params = x0;
    out.initial_objective = f0;
    out.final_objective = f0;
    out.evaluations = 1;
    out.trace.push_back({0, f0, g0.norm()});
    return out;
}

void record(OptimizeResult& out, const Eigen::VectorXd& x, double f, const Eigen::VectorXd& g) {
    ++out.iterations;
    out.params = x;
    out.final_objective = f;
    out.trace.push_back({out.iterations, f, g.norm()});
}

} // namespace

OptimizeResult run_gd(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerConfig& cfg) {
    cfg.validate();
    Eigen::VectorXd g;
    double f = objective.value_and_gradient(x0, g);
    OptimizeResult out = start(x0, f, g);
    if (gradient_converged(g, f, cfg)) {
        out.reason = StopReason::gradient;
        return out;
    }

    double step = cfg.gd_step;
    if (step == 0.0) {
        step = 1e-3 * std::max(x0.norm(), 1e-300) / g.norm();
    }
    const double divergence_limit = 10.0 * out.initial_objective;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd g_try;
    int rejected = 0;
    while (out.iterations < cfg.max_iterations) {
        const Eigen::VectorXd x_try = x - step * g;
        const double f_try = objective.value_and_gradient(x_try, g_try);
        ++out.evaluations;
        if (!(f_try <= divergence_limit) && out.initial_objective > 0.0) {
            throw DivergenceError("gradient descent diverged (objective " + std::to_string(f_try) +
                                  " > 10x initial); use a smaller --gd-step than " + std::to_string(step));
        }
        if (!(f_try <= f)) {
            step *= 0.5;
            if (++rejected >= kMaxStepTrials) {
                out.reason = StopReason::stalled;
                throw StallError("gradient descent: no decrease after 40 step halvings", out);
            }
            continue;
        }
        rejected = 0;
        const double f_prev = f;
        x = x_try;
        f = f_try;
        g = g_try;
        record(out, x, f, g);
        if (gradient_converged(g, f, cfg)) {
            out.reason = StopReason::gradient;
            return out;
        }
        if (objective_converged(f_prev, f, cfg)) {
            out.reason = StopReason::objective;
            return out;
        }
    }
    out.reason = StopReason::max_iterations;
    return out;
}

OptimizeResult run_lm(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerConfig& cfg) {
    cfg.validate();
    const auto n = x0.size();
    Eigen::MatrixXd jtj;
    Eigen::VectorXd jtr;
    objective.gauss_newton(x0, jtj, jtr);
    double f = objective.value(x0);
    Eigen::VectorXd g = 2.0 * jtr;
    OptimizeResult out = start(x0, f, g);
    if (gradient_converged(g, f, cfg)) {
        out.reason = StopReason::gradient;
        return out;
    }

    const double base_damping = jtj.trace() / static_cast<double>(n);
    double lambda = cfg.lm_damping_init * base_damping;
    Eigen::VectorXd x = x0;
    while (out.iterations < cfg.max_iterations) {
        bool accepted = false;
        double f_try = f;
        Eigen::VectorXd x_try;
        for (int trial = 0; trial < kMaxStepTrials; ++trial) {
            Eigen::MatrixXd system = jtj;
            system.diagonal().array() += lambda;
            const Eigen::VectorXd delta = system.ldlt().solve(-jtr);
            x_try = x + delta;
            f_try = objective.value(x_try);
            ++out.evaluations;
            if (delta.allFinite() && f_try <= f) {
                accepted = true;
                lambda /= 10.0;
                break;
            }
            lambda = lambda > 0.0 ? lambda * 10.0 : 1e-3 * base_damping;
        }
        if (!accepted) {
            out.reason = StopReason::stalled;
            throw StallError("Levenberg-Marquardt: no decrease after 40 damping increases", out);
        }
        const double f_prev = f;
        x = x_try;
        f = f_try;
        objective.gauss_newton(x, jtj, jtr);
        g = 2.0 * jtr;
        record(out, x, f, g);
        if (gradient_converged(g, f, cfg)) {
            out.reason = StopReason::gradient;
            return out;
        }
        if (objective_converged(f_prev, f, cfg)) {
            out.reason = StopReason::objective;
            return out;
        }
    }
    out.reason = StopReason::max_iterations;
    return out;
}

namespace {

struct CurvaturePair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
    double rho;
};

// Two-loop recursion: returns -H g for the inverse Hessian approximation H.
Eigen::VectorXd lbfgs_direction(const std::deque<CurvaturePair>& history, const Eigen::VectorXd& g) {
    if (history.empty()) {
        return -g / g.norm();
    }
    Eigen::VectorXd q = g;
    std::vector<double> alpha(history.size());
    for (std::size_t i = history.size(); i-- > 0;) {
        alpha[i] = history[i].rho * history[i].s.dot(q);
        q -= alpha[i] * history[i].y;
    }
    const CurvaturePair& last = history.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
    for (std::size_t i = 0; i < history.size(); ++i) {
        const double beta = history[i].rho * history[i].y.dot(q);
        q += (alpha[i] - beta) * history[i].s;
    }
    return -q;
}

// Strong Wolfe line search (bracket then zoom by bisection of the cubic-free kind).
// On success x_try, f_try, g_try hold the accepted point.
bool wolfe_search(const Objective& objective, const Eigen::VectorXd& x, double f, double slope,
                  const Eigen::VectorXd& d, Eigen::VectorXd& x_try, double& f_try, Eigen::VectorXd& g_try,
                  std::size_t& evaluations) {
    constexpr double c2 = 0.9;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double step = 1.0;
    bool armijo_seen = false;
    Eigen::VectorXd x_ok, g_ok;
    double f_ok = f;
    for (int trial = 0; trial < kMaxStepTrials; ++trial) {
        x_try = x + step * d;
        f_try = objective.value_and_gradient(x_try, g_try);
        ++evaluations;
        if (!(f_try <= f + kArmijo * step * slope)) {
            hi = step;
        } else {
            const double dslope = g_try.dot(d);
            if (std::abs(dslope) <= -c2 * slope) {
                return true;
            }
            if (!armijo_seen || f_try < f_ok) {
                armijo_seen = true;
                x_ok = x_try;
                g_ok = g_try;
                f_ok = f_try;
            }
            if (dslope > 0.0) {
                hi = step;
            } else {
                lo = step;
            }
        }
        step = std::isinf(hi) ? 2.0 * step : 0.5 * (lo + hi);
    }
    if (armijo_seen) {
        x_try = x_ok;
        g_try = g_ok;
        f_try = f_ok;
    }
    return armijo_seen;
}

} // namespace

OptimizeResult run_lbfgs(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerConfig& cfg) {
    cfg.validate();
    Eigen::VectorXd g;
    double f = objective.value_and_gradient(x0, g);
    OptimizeResult out = start(x0, f, g);
    if (gradient_converged(g, f, cfg)) {
        out.reason = StopReason::gradient;
        return out;
    }

    std::deque<CurvaturePair> history;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd x_try;
    Eigen::VectorXd g_try;
    while (out.iterations < cfg.max_iterations) {
        Eigen::VectorXd d = lbfgs_direction(history, g);
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            history.clear();
            d = lbfgs_direction(history, g);
            slope = g.dot(d);
        }

        bool accepted = false;
        double f_try = f;
        for (;;) {
            accepted = wolfe_search(objective, x, f, slope, d, x_try, f_try, g_try, out.evaluations);
            if (accepted || history.empty()) {
                break;
            }
            // Retry once along steepest descent with the memory discarded.
            history.clear();
            d = lbfgs_direction(history, g);
            slope = g.dot(d);
        }
        if (!accepted) {
            out.reason = StopReason::stalled;
            throw StallError("LBFGS line search: no sufficient decrease after 40 trials", out);
        }

        CurvaturePair pair{x_try - x, g_try - g, 0.0};
        const double sy = pair.s.dot(pair.y);
        if (sy > 1e-10 * pair.s.norm() * pair.y.norm()) {
            pair.rho = 1.0 / sy;
            history.push_back(std::move(pair));
            if (history.size() > cfg.lbfgs_memory) {
                history.pop_front();
            }
        }

        const double f_prev = f;
        x = x_try;
        f = f_try;
        g = g_try;
        record(out, x, f, g);
        if (gradient_converged(g, f, cfg)) {
            out.reason = StopReason::gradient;
            return out;
        }
        if (objective_converged(f_prev, f, cfg)) {
            out.reason = StopReason::objective;
            return out;
        }
    }
    out.reason = StopReason::max_iterations;
    return out;
}

OptimizeResult run_optimizer(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerConfig& cfg) {
    switch (cfg.method) {
    case Method::gd:
        return run_gd(objective, x0, cfg);
    case Method::lm:
        return run_lm(objective, x0, cfg);
    case Method::lbfgs:
        return run_lbfgs(objective, x0, cfg);
    }
    throw DomainError("unknown optimizer");
}

} // namespace escoil
