#include "escoil/apply.hpp"

#include <algorithm>
#include <string>

#include "escoil/error.hpp"
#include "escoil/recon.hpp"

namespace escoil {

namespace {

void check_length(std::size_t weights, std::size_t coils) {
    if (weights != coils) {
        throw DimensionError("weight vector has " + std::to_string(weights) + " entries for " +
                             std::to_string(coils) + " coils");
    }
}

} // namespace

EscVolume apply_image_domain(const CoilImageStack& stack, std::span<const cplx> x) {
    check_length(x.size(), stack.coils);
    EscVolume out(stack.slices, stack.rows, stack.cols);
    const std::size_t per = stack.pixels_per_slice();
    for (std::size_t s = 0; s < stack.slices; ++s) {
        cplx* dst = out.pixels.data() + s * per;
        for (std::size_t c = 0; c < stack.coils; ++c) {
            const cplx* src = stack.pixels.data() + (s * stack.coils + c) * per;
            for (std::size_t p = 0; p < per; ++p) {
                dst[p] += src[p] * x[c];
            }
        }
    }
    return out;
}

EscVolume apply_kspace_domain(const KSpaceVolume& v, std::span<const cplx> x, std::size_t m, std::size_t n) {
    check_length(x.size(), v.coils);
    if (m > v.rows || n > v.cols) {
        throw DimensionError("crop exceeds k-space size");
    }
    EscVolume out(v.slices, m, n);
    out.kspace_rows = v.rows;
    out.kspace_cols = v.cols;
    out.kspace.assign(v.slices * v.rows * v.cols, cplx{});
    const std::size_t plane = v.rows * v.cols;
    for (std::size_t s = 0; s < v.slices; ++s) {
        ComplexGrid combined(v.rows, v.cols);
        for (std::size_t c = 0; c < v.coils; ++c) {
            const cplxf* src = &v.at(s, c, 0, 0);
            for (std::size_t p = 0; p < plane; ++p) {
                combined.data[p] += cplx(src[p].real(), src[p].imag()) * x[c];
            }
        }
        std::copy(combined.data.begin(), combined.data.end(), out.kspace.begin() + static_cast<std::ptrdiff_t>(s * plane));
        const ComplexGrid image = crop_center(ifft2_centered(combined), m, n);
        std::copy(image.data.begin(), image.data.end(), out.pixels.begin() + static_cast<std::ptrdiff_t>(s * m * n));
    }
    return out;
}

} // namespace escoil
