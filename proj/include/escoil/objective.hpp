#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "escoil/volume.hpp"

namespace escoil {

// Optimizers see x in C^k as a real 2k-vector (Re x0, Im x0, Re x1, Im x1, ...).
Eigen::VectorXd to_params(std::span<const cplx> x);
Eigen::VectorXd to_params(const Eigen::VectorXcd& x);
Eigen::VectorXcd to_complex(const Eigen::VectorXd& params);
std::vector<cplx> to_weights(const Eigen::VectorXd& params);

enum class ObjectiveKind {
    // sum over masked rows of (sqrt(r_i) - sqrt(b_i))^2, r_i = sqrt(|(Ax)_i|^2 + eps)
    hellinger,
    // sum over masked rows of |(Ax)_i - b_i|^2; only used to check the solvers
    l2_surrogate,
};

// Smoothing floor used by default: (1e-10 * max b)^2, or the smallest normal
// double when b is identically zero.
double default_epsilon(std::span<const double> b);

// The fit objective over the flattened coil matrix A of a stack.
// Holds a pointer to the stack, which must outlive the objective.
class Objective {
public:
    Objective(const CoilImageStack& stack, std::span<const double> b, std::vector<std::uint8_t> mask,
              double epsilon, ObjectiveKind kind = ObjectiveKind::hellinger);

    // Mask = {b_i > threshold}, epsilon = default_epsilon(b).
    static Objective hellinger(const CoilImageStack& stack, const RssVolume& b, double threshold = 0.0);
    static Objective surrogate(const CoilImageStack& stack, const RssVolume& b);

    std::size_t parameters() const { return 2 * stack_->coils; }
    std::size_t active_rows() const { return active_rows_; }
    double epsilon() const { return epsilon_; }
    ObjectiveKind kind() const { return kind_; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }
    const std::vector<double>& b() const { return b_; }
    const CoilImageStack& stack() const { return *stack_; }

    double value(const Eigen::VectorXd& params) const;
    double value(std::span<const cplx> x) const { return value(to_params(x)); }

    // Gradient with respect to the 2k real parameters; returns the value.
    double value_and_gradient(const Eigen::VectorXd& params, Eigen::VectorXd& gradient) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& params) const;

    // Residual vector r and its Jacobian J with respect to the real
    // parameters, reduced to J^T J and J^T r one chunk of rows at a time.
    // Returns ||r||^2, which equals value(params).
    double gauss_newton(const Eigen::VectorXd& params, Eigen::MatrixXd& jtj, Eigen::VectorXd& jtr) const;

private:
    const CoilImageStack* stack_;
    std::vector<double> b_;
    std::vector<double> sqrt_b_;
    std::vector<std::uint8_t> mask_;
    std::size_t active_rows_ = 0;
    double epsilon_;
    ObjectiveKind kind_;
};

} // namespace escoil
