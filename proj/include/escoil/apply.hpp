#pragma once

#include <cstddef>
#include <span>

#include "escoil/volume.hpp"

namespace escoil {

// Per pixel sum over coils of stack(p, c) * x[c].
EscVolume apply_image_domain(const CoilImageStack& stack, std::span<const cplx> x);

// Combines k-space at full H x W first, then crop_center(ifft2_centered(.), m, n).
// The result carries the combined k-space.
EscVolume apply_kspace_domain(const KSpaceVolume& v, std::span<const cplx> x, std::size_t m, std::size_t n);

} // namespace escoil
