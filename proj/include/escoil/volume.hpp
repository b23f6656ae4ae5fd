#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace escoil {

using cplx = std::complex<double>;
using cplxf = std::complex<float>;

// Row-major 2-D grid.
template <typename T>
struct Grid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    Grid() = default;
    Grid(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
    Grid(std::size_t r, std::size_t c, std::vector<T> values)
        : rows(r), cols(c), data(std::move(values)) {}

    T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::size_t size() const { return data.size(); }
};

using ComplexGrid = Grid<cplx>;
using RealGrid = Grid<double>;

// Raw multi-coil k-space, single precision, (slice, coil, row, column) order.
struct KSpaceVolume {
    std::string volume_id;
    std::size_t slices = 0;
    std::size_t coils = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cplxf> samples;

    KSpaceVolume() = default;
    KSpaceVolume(std::size_t l, std::size_t k, std::size_t h, std::size_t w)
        : slices(l), coils(k), rows(h), cols(w), samples(l * k * h * w) {}

    std::size_t index(std::size_t s, std::size_t c, std::size_t r, std::size_t w) const {
        return ((s * coils + c) * rows + r) * cols + w;
    }
    cplxf& at(std::size_t s, std::size_t c, std::size_t r, std::size_t w) {
        return samples[index(s, c, r, w)];
    }
    const cplxf& at(std::size_t s, std::size_t c, std::size_t r, std::size_t w) const {
        return samples[index(s, c, r, w)];
    }

    // One coil's H x W plane, promoted to double.
    ComplexGrid plane(std::size_t s, std::size_t c) const;

    // Throws DimensionError / DataError when an invariant is broken.
    void validate() const;

    friend bool operator==(const KSpaceVolume&, const KSpaceVolume&) = default;
};

// Cropped complex coil images, (slice, coil, row, col) order.
//
// The fit matrix A is the (l*m*n) x k flattening with row index
// (slice * m + row) * n + col and column index = coil. Because each slice
// stores its k coil planes contiguously, the rows of A belonging to slice s
// form a column-major (m*n) x k block starting at slice_data(s).
struct CoilImageStack {
    std::size_t slices = 0;
    std::size_t coils = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cplx> pixels;

    CoilImageStack() = default;
    CoilImageStack(std::size_t l, std::size_t k, std::size_t m, std::size_t n)
        : slices(l), coils(k), rows(m), cols(n), pixels(l * k * m * n) {}

    std::size_t pixels_per_slice() const { return rows * cols; }
    std::size_t matrix_rows() const { return slices * rows * cols; }

    cplx& at(std::size_t s, std::size_t c, std::size_t r, std::size_t w) {
        return pixels[((s * coils + c) * rows + r) * cols + w];
    }
    const cplx& at(std::size_t s, std::size_t c, std::size_t r, std::size_t w) const {
        return pixels[((s * coils + c) * rows + r) * cols + w];
    }

    // Entry A(i, j) of the flattened matrix.
    const cplx& matrix(std::size_t i, std::size_t j) const;

    Eigen::Map<const Eigen::MatrixXcd> slice_block(std::size_t s) const {
        return {pixels.data() + s * coils * rows * cols,
                static_cast<Eigen::Index>(rows * cols), static_cast<Eigen::Index>(coils)};
    }
    Eigen::Map<Eigen::MatrixXcd> slice_block(std::size_t s) {
        return {pixels.data() + s * coils * rows * cols,
                static_cast<Eigen::Index>(rows * cols), static_cast<Eigen::Index>(coils)};
    }
};

// Nonnegative ground truth b, (slice, row, col) order; same row order as A.
struct RssVolume {
    std::size_t slices = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    RssVolume() = default;
    RssVolume(std::size_t l, std::size_t m, std::size_t n)
        : slices(l), rows(m), cols(n), values(l * m * n) {}

    double& at(std::size_t s, std::size_t r, std::size_t c) { return values[(s * rows + r) * cols + c]; }
    double at(std::size_t s, std::size_t r, std::size_t c) const { return values[(s * rows + r) * cols + c]; }
    std::span<const double> slice(std::size_t s) const {
        return {values.data() + s * rows * cols, rows * cols};
    }
};

// Emulated single-coil output: Ax reshaped to (l, m, n), plus optional
// combined k-space at acquisition size (l, kspace_rows, kspace_cols).
struct EscVolume {
    std::size_t slices = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cplx> pixels;

    std::size_t kspace_rows = 0;
    std::size_t kspace_cols = 0;
    std::vector<cplx> kspace;

    EscVolume() = default;
    EscVolume(std::size_t l, std::size_t m, std::size_t n)
        : slices(l), rows(m), cols(n), pixels(l * m * n) {}

    bool has_kspace() const { return !kspace.empty(); }
    cplx& at(std::size_t s, std::size_t r, std::size_t c) { return pixels[(s * rows + r) * cols + c]; }
    const cplx& at(std::size_t s, std::size_t r, std::size_t c) const { return pixels[(s * rows + r) * cols + c]; }
    std::span<const cplx> slice(std::size_t s) const {
        return {pixels.data() + s * rows * cols, rows * cols};
    }
};

// Conversions to the on-disk k=1 ESCV representation.
KSpaceVolume image_payload(const EscVolume& esc, const std::string& volume_id = {});
KSpaceVolume kspace_payload(const EscVolume& esc, const std::string& volume_id = {});
KSpaceVolume rss_payload(const RssVolume& rss, const std::string& volume_id = {});

// Inverse of the payload conversions for k=1 volumes.
EscVolume esc_from_payload(const KSpaceVolume& v);
RssVolume rss_from_payload(const KSpaceVolume& v);

} // namespace escoil
