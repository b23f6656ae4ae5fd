#include "escoil/synth.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "escoil/error.hpp"
#include "escoil/recon.hpp"

namespace escoil {

SensitivityProfile parse_profile(std::string_view name) {
    if (name == "gaussian-ring") {
        return SensitivityProfile::gaussian_ring;
    }
    if (name == "uniform") {
        return SensitivityProfile::uniform;
    }
    throw FormatError("unknown sensitivity profile '" + std::string(name) + "'");
}

void SynthConfig::validate() const {
    if (coils == 0 || rows == 0 || cols == 0 || slices == 0) {
        throw DimensionError("synth dimensions must be positive");
    }
    if (pad_rows < rows || pad_cols < cols) {
        throw DimensionError("synth padding must be at least the crop size");
    }
    if (!(noise_sigma >= 0.0)) {
        throw DomainError("noise_sigma must be nonnegative");
    }
}

namespace {

struct Ellipse {
    double intensity, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan (Toft) parameters.
constexpr std::array<Ellipse, 10> kEllipses = {{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
}};

// Pixel centers mapped to [-1, 1]; y points up.
double coord_x(std::size_t c, std::size_t n) { return (2.0 * static_cast<double>(c) + 1.0) / static_cast<double>(n) - 1.0; }
double coord_y(std::size_t r, std::size_t m) { return 1.0 - (2.0 * static_cast<double>(r) + 1.0) / static_cast<double>(m); }

ComplexGrid coil_kspace(const SynthConfig& cfg, const RealGrid& object, const ComplexGrid& map) {
    ComplexGrid coil(cfg.rows, cfg.cols);
    for (std::size_t i = 0; i < coil.size(); ++i) {
        coil.data[i] = object.data[i] * map.data[i];
    }
    return fft2_centered(pad_center(coil, cfg.pad_rows, cfg.pad_cols));
}

} // namespace

RealGrid phantom(std::size_t rows, std::size_t cols, std::size_t slice, std::size_t slices) {
    double scale = 0.9;
    if (slices > 1) {
        const double t = (2.0 * static_cast<double>(slice) - static_cast<double>(slices - 1)) /
                         static_cast<double>(slices - 1);
        scale *= 1.0 - 0.25 * std::abs(t);
    }
    RealGrid out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const double y = coord_y(r, rows) / scale;
        for (std::size_t c = 0; c < cols; ++c) {
            const double x = coord_x(c, cols) / scale;
            double v = 0.0;
            for (const Ellipse& e : kEllipses) {
                const double phi = e.phi_deg * std::numbers::pi / 180.0;
                const double dx = x - e.x0;
                const double dy = y - e.y0;
                const double u = dx * std::cos(phi) + dy * std::sin(phi);
                const double w = -dx * std::sin(phi) + dy * std::cos(phi);
                if ((u * u) / (e.a * e.a) + (w * w) / (e.b * e.b) <= 1.0) {
                    v += e.intensity;
                }
            }
            // Overlapping negative ellipses can leave -0 or tiny negative sums.
            out(r, c) = v > 1e-12 ? v : 0.0;
        }
    }
    return out;
}

std::vector<ComplexGrid> sensitivity_maps(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> offset(-std::numbers::pi, std::numbers::pi);

    std::vector<ComplexGrid> maps;
    maps.reserve(cfg.coils);
    for (std::size_t c = 0; c < cfg.coils; ++c) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(cfg.coils);
        const double phase0 = cfg.profile == SensitivityProfile::uniform ? 0.0 : offset(rng);
        // Ramp direction rotates with the coil so neighbouring coils disagree in phase.
        const double ramp_dir = theta + std::numbers::pi / 3.0;
        const double cx = std::cos(theta);
        const double cy = std::sin(theta);
        constexpr double kWidth = 0.65;
        ComplexGrid map(cfg.rows, cfg.cols);
        for (std::size_t r = 0; r < cfg.rows; ++r) {
            const double y = coord_y(r, cfg.rows);
            for (std::size_t col = 0; col < cfg.cols; ++col) {
                const double x = coord_x(col, cfg.cols);
                double mag = 1.0;
                if (cfg.profile == SensitivityProfile::gaussian_ring) {
                    const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                    mag = std::exp(-d2 / (2.0 * kWidth * kWidth));
                }
                const double phase =
                    phase0 + cfg.phase_ramp_strength * (std::cos(ramp_dir) * x + std::sin(ramp_dir) * y);
                map(r, col) = std::polar(mag, phase);
            }
        }
        maps.push_back(std::move(map));
    }
    return maps;
}

ComplexGrid synth_kspace_plane(const SynthConfig& cfg, std::size_t slice, std::size_t coil) {
    const std::vector<ComplexGrid> maps = sensitivity_maps(cfg);
    if (slice >= cfg.slices || coil >= cfg.coils) {
        throw DimensionError("synth plane index out of range");
    }
    return coil_kspace(cfg, phantom(cfg.rows, cfg.cols, slice, cfg.slices), maps[coil]);
}

SynthResult synth_volume(const SynthConfig& cfg) {
    cfg.validate();
    const std::vector<ComplexGrid> maps = sensitivity_maps(cfg);
    // Separate stream for noise so sensitivity draws do not depend on noise_sigma.
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double component_sigma = cfg.noise_sigma / std::numbers::sqrt2;

    SynthResult out;
    out.volume = KSpaceVolume(cfg.slices, cfg.coils, cfg.pad_rows, cfg.pad_cols);
    out.volume.volume_id = "synth-" + std::to_string(cfg.seed);
    out.truth = RssVolume(cfg.slices, cfg.rows, cfg.cols);
    const std::size_t plane = cfg.pad_rows * cfg.pad_cols;

    for (std::size_t s = 0; s < cfg.slices; ++s) {
        const RealGrid object = phantom(cfg.rows, cfg.cols, s, cfg.slices);
        std::copy(object.data.begin(), object.data.end(), out.truth.values.begin() + static_cast<std::ptrdiff_t>(s * object.size()));
        for (std::size_t c = 0; c < cfg.coils; ++c) {
            const ComplexGrid kspace = coil_kspace(cfg, object, maps[c]);
            cplxf* dst = &out.volume.at(s, c, 0, 0);
            for (std::size_t p = 0; p < plane; ++p) {
                cplx v = kspace.data[p];
                if (cfg.noise_sigma > 0.0) {
                    const double re = normal(rng);
                    const double im = normal(rng);
                    v += component_sigma * cplx(re, im);
                }
                dst[p] = cplxf(static_cast<float>(v.real()), static_cast<float>(v.imag()));
            }
        }
    }
    return out;
}

} // namespace escoil
