#include "escoil/recon.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include <Eigen/Eigenvalues>
#include <fftw3.h>

#include "escoil/error.hpp"

namespace escoil {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Roll rows and columns by (dr, dc): out[(r + dr) % H][(c + dc) % W] = in[r][c].
ComplexGrid roll(const ComplexGrid& in, std::size_t dr, std::size_t dc) {
    ComplexGrid out(in.rows, in.cols);
    for (std::size_t r = 0; r < in.rows; ++r) {
        const std::size_t rr = (r + dr) % in.rows;
        for (std::size_t c = 0; c < in.cols; ++c) {
            out(rr, (c + dc) % in.cols) = in(r, c);
        }
    }
    return out;
}

ComplexGrid fftshift(const ComplexGrid& g) { return roll(g, g.rows / 2, g.cols / 2); }
ComplexGrid ifftshift(const ComplexGrid& g) { return roll(g, g.rows - g.rows / 2, g.cols - g.cols / 2); }

void check_finite(const ComplexGrid& g) {
    for (const cplx& v : g.data) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw DataError("non-finite value in transform input");
        }
    }
}

// In-place unitary DFT; sign is FFTW_FORWARD or FFTW_BACKWARD.
void dft_inplace(ComplexGrid& g, int sign) {
    if (g.size() == 0) {
        return;
    }
    auto* data = reinterpret_cast<fftw_complex*>(g.data.data());
    fftw_plan plan = nullptr;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_2d(static_cast<int>(g.rows), static_cast<int>(g.cols), data, data, sign,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
    for (cplx& v : g.data) {
        v *= scale;
    }
}

ComplexGrid centered(const ComplexGrid& in, int sign) {
    check_finite(in);
    ComplexGrid g = ifftshift(in);
    dft_inplace(g, sign);
    return fftshift(g);
}

} // namespace

ComplexGrid ifft2_centered(const ComplexGrid& kspace) { return centered(kspace, FFTW_BACKWARD); }

ComplexGrid fft2_centered(const ComplexGrid& image) { return centered(image, FFTW_FORWARD); }

ComplexGrid crop_center(const ComplexGrid& image, std::size_t m, std::size_t n) {
    if (m == 0 || n == 0 || m > image.rows || n > image.cols) {
        throw DimensionError("cannot crop " + std::to_string(image.rows) + "x" + std::to_string(image.cols) +
                             " to " + std::to_string(m) + "x" + std::to_string(n));
    }
    const std::size_t r0 = (image.rows - m) / 2;
    const std::size_t c0 = (image.cols - n) / 2;
    ComplexGrid out(m, n);
    for (std::size_t r = 0; r < m; ++r) {
        std::copy_n(&image(r0 + r, c0), n, &out(r, 0));
    }
    return out;
}

ComplexGrid pad_center(const ComplexGrid& image, std::size_t height, std::size_t width) {
    if (image.rows > height || image.cols > width) {
        throw DimensionError("cannot pad " + std::to_string(image.rows) + "x" + std::to_string(image.cols) +
                             " to " + std::to_string(height) + "x" + std::to_string(width));
    }
    const std::size_t r0 = (height - image.rows) / 2;
    const std::size_t c0 = (width - image.cols) / 2;
    ComplexGrid out(height, width);
    for (std::size_t r = 0; r < image.rows; ++r) {
        std::copy_n(&image(r, 0), image.cols, &out(r0 + r, c0));
    }
    return out;
}

CoilImageStack reconstruct(const KSpaceVolume& v, std::size_t m, std::size_t n) {
    if (m > v.rows || n > v.cols) {
        throw DimensionError("crop " + std::to_string(m) + "x" + std::to_string(n) + " exceeds k-space " +
                             std::to_string(v.rows) + "x" + std::to_string(v.cols));
    }
    CoilImageStack stack(v.slices, v.coils, m, n);
    for (std::size_t s = 0; s < v.slices; ++s) {
        for (std::size_t c = 0; c < v.coils; ++c) {
            const ComplexGrid image = crop_center(ifft2_centered(v.plane(s, c)), m, n);
            std::copy(image.data.begin(), image.data.end(), &stack.at(s, c, 0, 0));
        }
    }
    return stack;
}

RssVolume rss(const CoilImageStack& stack) {
    RssVolume out(stack.slices, stack.rows, stack.cols);
    const std::size_t per = stack.pixels_per_slice();
    for (std::size_t s = 0; s < stack.slices; ++s) {
        for (std::size_t p = 0; p < per; ++p) {
            double sum = 0.0;
            for (std::size_t c = 0; c < stack.coils; ++c) {
                sum += std::norm(stack.pixels[(s * stack.coils + c) * per + p]);
            }
            out.values[s * per + p] = std::sqrt(sum);
        }
    }
    return out;
}

Eigen::MatrixXcd gram_matrix(const CoilImageStack& stack) {
    const auto k = static_cast<Eigen::Index>(stack.coils);
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(k, k);
    for (std::size_t s = 0; s < stack.slices; ++s) {
        const auto block = stack.slice_block(s);
        gram.noalias() += block.adjoint() * block;
    }
    return gram;
}

Eigen::VectorXcd multiply(const CoilImageStack& stack, const Eigen::VectorXcd& x) {
    if (static_cast<std::size_t>(x.size()) != stack.coils) {
        throw DimensionError("weight vector has " + std::to_string(x.size()) + " entries for " +
                             std::to_string(stack.coils) + " coils");
    }
    const auto per = static_cast<Eigen::Index>(stack.pixels_per_slice());
    Eigen::VectorXcd z(static_cast<Eigen::Index>(stack.matrix_rows()));
    for (std::size_t s = 0; s < stack.slices; ++s) {
        z.segment(static_cast<Eigen::Index>(s) * per, per).noalias() = stack.slice_block(s) * x;
    }
    return z;
}

Eigen::VectorXcd multiply_adjoint(const CoilImageStack& stack, const Eigen::VectorXcd& w) {
    if (static_cast<std::size_t>(w.size()) != stack.matrix_rows()) {
        throw DimensionError("adjoint input length does not match l*m*n");
    }
    const auto per = static_cast<Eigen::Index>(stack.pixels_per_slice());
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(stack.coils));
    for (std::size_t s = 0; s < stack.slices; ++s) {
        g.noalias() += stack.slice_block(s).adjoint() * w.segment(static_cast<Eigen::Index>(s) * per, per);
    }
    return g;
}

Eigencoil eigencoil(const CoilImageStack& stack) {
    const Eigen::MatrixXcd gram = gram_matrix(stack);
    const double scale = gram.diagonal().real().sum();
    if (!(scale > 0.0)) {
        throw DegenerateError("eigencoil of an all-zero coil matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram);
    if (solver.info() != Eigen::Success) {
        throw DegenerateError("eigen-decomposition of the coil Gram matrix failed");
    }
    // Eigenvalues come sorted ascending.
    const Eigen::Index k = gram.rows();
    Eigen::VectorXcd mode = solver.eigenvectors().col(k - 1);
    Eigen::Index largest = 0;
    mode.cwiseAbs().maxCoeff(&largest);
    mode *= std::conj(mode(largest)) / std::abs(mode(largest));
    mode(largest) = cplx(mode(largest).real(), 0.0);
    mode.normalize();

    Eigencoil out;
    const Eigen::VectorXcd z = multiply(stack, mode);
    out.combined = EscVolume(stack.slices, stack.rows, stack.cols);
    std::copy(z.begin(), z.end(), out.combined.pixels.begin());
    out.mode.assign(mode.begin(), mode.end());
    out.singular_value = z.norm();
    return out;
}

} // namespace escoil
