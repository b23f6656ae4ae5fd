#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "escoil/volume.hpp"

namespace escoil {

enum class VolumeFormat { escv, fastmri_h5 };

VolumeFormat parse_volume_format(std::string_view name);

// ESCV layout (all little-endian):
//   bytes 0..3   "ESCV"
//   bytes 4..5   u16 version = 1
//   bytes 6..37  u64 slices, coils, rows, cols
//   then slices*coils*rows*cols (re, im) binary32 pairs in (slice, coil, row, col) order.
inline constexpr std::uint16_t kEscvVersion = 1;
inline constexpr std::size_t kEscvHeaderBytes = 4 + 2 + 4 * 8;

std::vector<std::uint8_t> encode_escv(const KSpaceVolume& v);
KSpaceVolume decode_escv(const std::vector<std::uint8_t>& bytes, std::string volume_id = {});

// volume_id is taken from the file stem (ESCV carries no id field).
KSpaceVolume read_volume(const std::filesystem::path& path, VolumeFormat format = VolumeFormat::escv);

// Writes atomically through a temporary sibling file and rename.
void write_volume(const KSpaceVolume& v, const std::filesystem::path& path);

// True when the fastMRI HDF5 adapter was compiled in.
bool fastmri_supported();

// Reads dataset "kspace" of shape (slices, coils, rows, cols) with compound {r, i}
// float members. No conjugation or axis flip is applied.
KSpaceVolume read_fastmri(const std::filesystem::path& path);
void write_fastmri(const KSpaceVolume& v, const std::filesystem::path& path);

// Shared by every writer in the project: temp file + rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

} // namespace escoil
