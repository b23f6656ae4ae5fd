#pragma once

#include <cstddef>
#include <vector>

#include "escoil/volume.hpp"

namespace escoil {

// Centered unitary 2-D transforms: ifftshift, DFT with 1/sqrt(H*W), fftshift.
// Zero frequency sits at index (H/2, W/2) on the k-space side and the object
// is centered on the image side.
ComplexGrid ifft2_centered(const ComplexGrid& kspace);
ComplexGrid fft2_centered(const ComplexGrid& image);

// Rows [(H-m)/2, (H-m)/2 + m) and cols [(W-n)/2, (W-n)/2 + n), floor division.
ComplexGrid crop_center(const ComplexGrid& image, std::size_t m, std::size_t n);

// Inverse of crop_center: embeds an m x n grid at the same offsets of a zero H x W grid.
ComplexGrid pad_center(const ComplexGrid& image, std::size_t height, std::size_t width);

// Per (slice, coil): crop_center(ifft2_centered(kspace), m, n).
CoilImageStack reconstruct(const KSpaceVolume& v, std::size_t m, std::size_t n);

// Per pixel Euclidean norm over coils.
RssVolume rss(const CoilImageStack& stack);

struct Eigencoil {
    EscVolume combined;        // A * mode reshaped to (l, m, n)
    std::vector<cplx> mode;    // leading right singular vector of A, unit norm
    double singular_value = 0; // ||A * mode||
};

// Leading right singular vector via the k x k Gram matrix A^H A. The largest
// magnitude entry of the returned mode is rotated to be real positive.
Eigencoil eigencoil(const CoilImageStack& stack);

// A^H A accumulated slice by slice.
Eigen::MatrixXcd gram_matrix(const CoilImageStack& stack);

// z = A x, length l*m*n.
Eigen::VectorXcd multiply(const CoilImageStack& stack, const Eigen::VectorXcd& x);

// A^H w for a length l*m*n vector w.
Eigen::VectorXcd multiply_adjoint(const CoilImageStack& stack, const Eigen::VectorXcd& w);

} // namespace escoil
