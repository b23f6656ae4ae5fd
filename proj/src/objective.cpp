#include "escoil/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "escoil/error.hpp"
#include "escoil/recon.hpp"

namespace escoil {

Eigen::VectorXd to_params(std::span<const cplx> x) {
    Eigen::VectorXd p(2 * static_cast<Eigen::Index>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) {
        p(2 * j) = x[j].real();
        p(2 * j + 1) = x[j].imag();
    }
    return p;
}

Eigen::VectorXd to_params(const Eigen::VectorXcd& x) {
    return to_params(std::span<const cplx>(x.data(), static_cast<std::size_t>(x.size())));
}

Eigen::VectorXcd to_complex(const Eigen::VectorXd& params) {
    Eigen::VectorXcd x(params.size() / 2);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        x(j) = cplx(params(2 * j), params(2 * j + 1));
    }
    return x;
}

std::vector<cplx> to_weights(const Eigen::VectorXd& params) {
    const Eigen::VectorXcd x = to_complex(params);
    return {x.begin(), x.end()};
}

double default_epsilon(std::span<const double> b) {
    double bmax = 0.0;
    for (double v : b) {
        bmax = std::max(bmax, v);
    }
    const double eps = (1e-10 * bmax) * (1e-10 * bmax);
    return eps > 0.0 ? eps : std::numeric_limits<double>::min();
}

Objective::Objective(const CoilImageStack& stack, std::span<const double> b, std::vector<std::uint8_t> mask,
                     double epsilon, ObjectiveKind kind)
    : stack_(&stack), b_(b.begin(), b.end()), mask_(std::move(mask)), epsilon_(epsilon), kind_(kind) {
    const std::size_t rows = stack.matrix_rows();
    if (b_.size() != rows) {
        throw DimensionError("b has " + std::to_string(b_.size()) + " entries, A has " + std::to_string(rows) +
                             " rows");
    }
    if (mask_.empty()) {
        mask_.assign(rows, 1);
    }
    if (mask_.size() != rows) {
        throw DimensionError("mask length does not match the rows of A");
    }
    if (!(epsilon_ > 0.0)) {
        throw DomainError("smoothing epsilon must be positive");
    }
    sqrt_b_.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!(b_[i] >= 0.0)) {
            throw DomainError("b must be nonnegative and finite");
        }
        sqrt_b_[i] = std::sqrt(b_[i]);
        active_rows_ += mask_[i] != 0 ? 1 : 0;
    }
}

Objective Objective::hellinger(const CoilImageStack& stack, const RssVolume& b, double threshold) {
    std::vector<std::uint8_t> mask(b.values.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = b.values[i] > threshold ? 1 : 0;
    }
    return {stack, b.values, std::move(mask), default_epsilon(b.values), ObjectiveKind::hellinger};
}

Objective Objective::surrogate(const CoilImageStack& stack, const RssVolume& b) {
    return {stack, b.values, {}, default_epsilon(b.values), ObjectiveKind::l2_surrogate};
}

double Objective::value(const Eigen::VectorXd& params) const {
    const Eigen::VectorXcd z = multiply(*stack_, to_complex(params));
    double sum = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (mask_[i] == 0) {
            continue;
        }
        if (kind_ == ObjectiveKind::hellinger) {
            const double r = std::sqrt(std::norm(z(i)) + epsilon_);
            const double d = std::sqrt(r) - sqrt_b_[i];
            sum += d * d;
        } else {
            sum += std::norm(z(i) - b_[i]);
        }
    }
    return sum;
}

double Objective::value_and_gradient(const Eigen::VectorXd& params, Eigen::VectorXd& gradient) const {
    const Eigen::VectorXcd z = multiply(*stack_, to_complex(params));
    // w holds df/d(conj z) scaled by 2, so that A^H w is (d/dRe + i d/dIm) f.
    Eigen::VectorXcd w(z.size());
    double sum = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (mask_[i] == 0) {
            w(i) = 0.0;
            continue;
        }
        if (kind_ == ObjectiveKind::hellinger) {
            const double r = std::sqrt(std::norm(z(i)) + epsilon_);
            const double sr = std::sqrt(r);
            const double d = sr - sqrt_b_[i];
            sum += d * d;
            w(i) = z(i) * ((1.0 - sqrt_b_[i] / sr) / r);
        } else {
            const cplx d = z(i) - b_[i];
            sum += std::norm(d);
            w(i) = 2.0 * d;
        }
    }
    gradient = to_params(multiply_adjoint(*stack_, w));
    return sum;
}

Eigen::VectorXd Objective::gradient(const Eigen::VectorXd& params) const {
    Eigen::VectorXd g;
    value_and_gradient(params, g);
    return g;
}

double Objective::gauss_newton(const Eigen::VectorXd& params, Eigen::MatrixXd& jtj, Eigen::VectorXd& jtr) const {
    constexpr Eigen::Index kChunk = 2048;
    const auto k = static_cast<Eigen::Index>(stack_->coils);
    const auto per = static_cast<Eigen::Index>(stack_->pixels_per_slice());
    const Eigen::VectorXcd x = to_complex(params);
    // Surrogate rows contribute two real residuals (Re, Im).
    const Eigen::Index residuals_per_row = kind_ == ObjectiveKind::hellinger ? 1 : 2;

    jtj = Eigen::MatrixXd::Zero(2 * k, 2 * k);
    jtr = Eigen::VectorXd::Zero(2 * k);
    Eigen::MatrixXd jac(kChunk * residuals_per_row, 2 * k);
    Eigen::VectorXd res(kChunk * residuals_per_row);
    double sum = 0.0;

    for (std::size_t s = 0; s < stack_->slices; ++s) {
        const auto block = stack_->slice_block(s);
        const Eigen::VectorXcd z = block * x;
        const Eigen::Index base = static_cast<Eigen::Index>(s) * per;
        for (Eigen::Index start = 0; start < per; start += kChunk) {
            const Eigen::Index len = std::min(kChunk, per - start);
            Eigen::Index n = 0;
            for (Eigen::Index p = start; p < start + len; ++p) {
                const auto i = static_cast<std::size_t>(base + p);
                if (mask_[i] == 0) {
                    continue;
                }
                if (kind_ == ObjectiveKind::hellinger) {
                    const double r = std::sqrt(std::norm(z(p)) + epsilon_);
                    const double sr = std::sqrt(r);
                    res(n) = sr - sqrt_b_[i];
                    // d sqrt(r) / d Re x_j = Re(conj z A_pj) / (2 r^{3/2}), d / d Im x_j = -Im(...)
                    const double coef = 0.5 / (r * sr);
                    for (Eigen::Index j = 0; j < k; ++j) {
                        const cplx t = std::conj(z(p)) * block(p, j);
                        jac(n, 2 * j) = coef * t.real();
                        jac(n, 2 * j + 1) = -coef * t.imag();
                    }
                    ++n;
                } else {
                    const cplx d = z(p) - b_[i];
                    res(n) = d.real();
                    res(n + 1) = d.imag();
                    for (Eigen::Index j = 0; j < k; ++j) {
                        const cplx a = block(p, j);
                        jac(n, 2 * j) = a.real();
                        jac(n, 2 * j + 1) = -a.imag();
                        jac(n + 1, 2 * j) = a.imag();
                        jac(n + 1, 2 * j + 1) = a.real();
                    }
                    n += 2;
                }
            }
            if (n == 0) {
                continue;
            }
            const auto j_top = jac.topRows(n);
            const auto r_top = res.head(n);
            jtj.selfadjointView<Eigen::Lower>().rankUpdate(j_top.transpose());
            jtr.noalias() += j_top.transpose() * r_top;
            sum += r_top.squaredNorm();
        }
    }
    jtj.triangularView<Eigen::StrictlyUpper>() = jtj.transpose();
    return sum;
}

} // namespace escoil
