#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "escoil/manifest.hpp"
#include "escoil/volume.hpp"

namespace escoil {

// Binary 16-bit portable graymap (P5, maxval 65535, big-endian samples).
std::string encode_pgm16(std::size_t rows, std::size_t cols, const std::vector<std::uint16_t>& samples);

struct LabeledVolume {
    std::string label;
    EscVolume volume;
};

// Writes, for every slice s:
//   rss_sNNN_mag.pgm                   RSS magnitude
//   <label>_sNNN_mag.pgm               |volume| on the RSS scale [0, max rss]
//   <label>_sNNN_diff.pgm              |volume| - rss, 32768 = 0, symmetric range shared by all labels
//   <label>_sNNN_phase.pgm             arg(volume) mapped from [-pi, pi] to [0, 65535]
// The first labeled volume is conventionally the ESC output. Returns written paths.
std::vector<std::filesystem::path> export_panels(const std::vector<LabeledVolume>& volumes, const RssVolume& rss,
                                                 const std::filesystem::path& dir);

// "coil,re,im,magnitude,phase" rows.
std::string weights_csv(const FitManifest& m);

// Scatter of (Re, Im) per coil on a size x size canvas with axes through the origin.
std::string weights_scatter_pgm(const FitManifest& m, std::size_t size = 256);

} // namespace escoil
