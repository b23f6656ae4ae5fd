#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "escoil/volume.hpp"

namespace escoil {

// ||sqrt(u) - sqrt(v)||_2 for nonnegative fields of equal size.
double hellinger_distance(std::span<const double> u, std::span<const double> v);

struct SsimParams {
    std::size_t window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double data_range = 1.0;
};

// Gaussian-weighted SSIM evaluated at every position where the window fits
// entirely, so the map is (rows - window + 1) x (cols - window + 1).
RealGrid ssim_map(const RealGrid& x, const RealGrid& y, const SsimParams& params);

// Mean of ssim_map.
double ssim(const RealGrid& x, const RealGrid& y, const SsimParams& params);

// Entrywise |z|.
std::vector<double> magnitude(std::span<const cplx> z);

} // namespace escoil
