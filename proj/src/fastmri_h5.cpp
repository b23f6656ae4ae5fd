// fastMRI container adapter. Compiled only when HDF5 is available; see
// fastmri_none.cpp for the fallback.

#include <hdf5.h>

#include <array>
#include <cmath>
#include <string>

#include "escoil/error.hpp"
#include "escoil/volume_io.hpp"

namespace escoil {

namespace {

// Owns one HDF5 identifier.
class Handle {
public:
    using Closer = herr_t (*)(hid_t);
    Handle(hid_t id, Closer closer) : id_(id), closer_(closer) {}
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& other) noexcept : id_(other.id_), closer_(other.closer_) { other.id_ = -1; }
    Handle& operator=(Handle&&) = delete;
    ~Handle() {
        if (id_ >= 0) {
            closer_(id_);
        }
    }
    hid_t get() const { return id_; }
    bool valid() const { return id_ >= 0; }

private:
    hid_t id_;
    Closer closer_;
};

struct ComplexPair {
    float r;
    float i;
};

Handle complex_type() {
    Handle t(H5Tcreate(H5T_COMPOUND, sizeof(ComplexPair)), H5Tclose);
    H5Tinsert(t.get(), "r", HOFFSET(ComplexPair, r), H5T_NATIVE_FLOAT);
    H5Tinsert(t.get(), "i", HOFFSET(ComplexPair, i), H5T_NATIVE_FLOAT);
    return t;
}

} // namespace

bool fastmri_supported() { return true; }

KSpaceVolume read_fastmri(const std::filesystem::path& path) {
    H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);
    if (!std::filesystem::exists(path)) {
        throw IoError("no such file: " + path.string());
    }
    Handle file(H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose);
    if (!file.valid()) {
        throw FormatError(path.string() + " is not an HDF5 file");
    }
    Handle dset(H5Dopen2(file.get(), "kspace", H5P_DEFAULT), H5Dclose);
    if (!dset.valid()) {
        throw FormatError(path.string() + " has no 'kspace' dataset");
    }
    Handle space(H5Dget_space(dset.get()), H5Sclose);
    if (H5Sget_simple_extent_ndims(space.get()) != 4) {
        throw FormatError("'kspace' must have shape (slices, coils, rows, cols)");
    }
    std::array<hsize_t, 4> dims{};
    H5Sget_simple_extent_dims(space.get(), dims.data(), nullptr);

    Handle stored(H5Dget_type(dset.get()), H5Tclose);
    if (H5Tget_class(stored.get()) != H5T_COMPOUND || H5Tget_nmembers(stored.get()) != 2) {
        throw FormatError("'kspace' must be a complex compound {r, i}");
    }

    KSpaceVolume v(dims[0], dims[1], dims[2], dims[3]);
    v.volume_id = path.stem().string();
    if (v.samples.empty()) {
        throw FormatError("'kspace' has a zero dimension");
    }
    Handle memtype = complex_type();
    static_assert(sizeof(ComplexPair) == sizeof(cplxf));
    if (H5Dread(dset.get(), memtype.get(), H5S_ALL, H5S_ALL, H5P_DEFAULT, v.samples.data()) < 0) {
        throw TruncationError("failed to read 'kspace' payload from " + path.string());
    }
    for (std::size_t i = 0; i < v.samples.size(); ++i) {
        if (!std::isfinite(v.samples[i].real()) || !std::isfinite(v.samples[i].imag())) {
            throw DataError("non-finite sample at flat index " + std::to_string(i));
        }
    }
    return v;
}

void write_fastmri(const KSpaceVolume& v, const std::filesystem::path& path) {
    v.validate();
    H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);
    Handle file(H5Fcreate(path.c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT), H5Fclose);
    if (!file.valid()) {
        throw IoError("cannot create " + path.string());
    }
    const std::array<hsize_t, 4> dims{v.slices, v.coils, v.rows, v.cols};
    Handle space(H5Screate_simple(4, dims.data(), nullptr), H5Sclose);
    Handle type = complex_type();
    Handle dset(H5Dcreate2(file.get(), "kspace", type.get(), space.get(), H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT),
                H5Dclose);
    if (!dset.valid() || H5Dwrite(dset.get(), type.get(), H5S_ALL, H5S_ALL, H5P_DEFAULT, v.samples.data()) < 0) {
        throw IoError("cannot write 'kspace' to " + path.string());
    }
}

} // namespace escoil
