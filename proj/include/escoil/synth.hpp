#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "escoil/volume.hpp"

namespace escoil {

enum class SensitivityProfile {
    gaussian_ring, // Gaussian magnitude bumps on a ring around the field of view
    uniform,       // unit magnitude everywhere (phase ramp still applied)
};

SensitivityProfile parse_profile(std::string_view name);

struct SynthConfig {
    std::size_t coils = 8;
    std::size_t rows = 64;     // crop m
    std::size_t cols = 64;     // crop n
    std::size_t slices = 1;
    std::size_t pad_rows = 64; // acquisition H >= rows
    std::size_t pad_cols = 64; // acquisition W >= cols
    SensitivityProfile profile = SensitivityProfile::gaussian_ring;
    double phase_ramp_strength = 1.0; // radians across half the field of view
    double noise_sigma = 0.0;         // complex std per k-space sample: E|n|^2 = sigma^2
    std::uint64_t seed = 42;

    void validate() const;
};

// Ellipse-composite (modified Shepp-Logan) phantom on an m x n grid. The
// ellipses shrink slightly away from the middle slice.
RealGrid phantom(std::size_t rows, std::size_t cols, std::size_t slice = 0, std::size_t slices = 1);

// Complex sensitivity of every coil on the crop grid, (coil, row, col) order.
std::vector<ComplexGrid> sensitivity_maps(const SynthConfig& cfg);

struct SynthResult {
    KSpaceVolume volume;
    RssVolume truth; // the phantom for every slice
};

// phantom * sensitivity per coil, embedded in the H x W field of view, forward
// transformed (centered, unitary), plus complex Gaussian noise.
SynthResult synth_volume(const SynthConfig& cfg);

// Noise-free k-space of one coil in double precision (synth_volume rounds to binary32).
ComplexGrid synth_kspace_plane(const SynthConfig& cfg, std::size_t slice, std::size_t coil);

} // namespace escoil
