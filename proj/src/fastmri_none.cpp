#include "escoil/error.hpp"
#include "escoil/volume_io.hpp"

namespace escoil {

bool fastmri_supported() { return false; }

KSpaceVolume read_fastmri(const std::filesystem::path& path) {
    throw FormatError("cannot read " + path.string() + ": built without HDF5 support");
}

void write_fastmri(const KSpaceVolume&, const std::filesystem::path& path) {
    throw FormatError("cannot write " + path.string() + ": built without HDF5 support");
}

} // namespace escoil
