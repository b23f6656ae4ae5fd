#include "escoil/volume.hpp"

#include <cmath>
#include <string>

#include "escoil/error.hpp"

namespace escoil {

ComplexGrid KSpaceVolume::plane(std::size_t s, std::size_t c) const {
    ComplexGrid g(rows, cols);
    const cplxf* src = samples.data() + index(s, c, 0, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.data[i] = cplx(src[i].real(), src[i].imag());
    }
    return g;
}

void KSpaceVolume::validate() const {
    if (slices == 0 || coils == 0 || rows == 0 || cols == 0) {
        throw DimensionError("volume dimensions must be positive");
    }
    if (samples.size() != slices * coils * rows * cols) {
        throw DimensionError("sample count " + std::to_string(samples.size()) + " does not match " +
                             std::to_string(slices) + "x" + std::to_string(coils) + "x" + std::to_string(rows) +
                             "x" + std::to_string(cols));
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].real()) || !std::isfinite(samples[i].imag())) {
            throw DataError("non-finite sample at flat index " + std::to_string(i));
        }
    }
}

const cplx& CoilImageStack::matrix(std::size_t i, std::size_t j) const {
    const std::size_t per = rows * cols;
    const std::size_t s = i / per;
    const std::size_t p = i % per;
    return pixels[(s * coils + j) * per + p];
}

namespace {

KSpaceVolume single_coil(std::size_t l, std::size_t h, std::size_t w, const std::string& id) {
    KSpaceVolume v(l, 1, h, w);
    v.volume_id = id;
    return v;
}

} // namespace

KSpaceVolume image_payload(const EscVolume& esc, const std::string& volume_id) {
    KSpaceVolume v = single_coil(esc.slices, esc.rows, esc.cols, volume_id);
    for (std::size_t i = 0; i < esc.pixels.size(); ++i) {
        v.samples[i] = cplxf(static_cast<float>(esc.pixels[i].real()), static_cast<float>(esc.pixels[i].imag()));
    }
    return v;
}

KSpaceVolume kspace_payload(const EscVolume& esc, const std::string& volume_id) {
    if (!esc.has_kspace()) {
        throw DimensionError("ESC volume carries no k-space");
    }
    KSpaceVolume v = single_coil(esc.slices, esc.kspace_rows, esc.kspace_cols, volume_id);
    for (std::size_t i = 0; i < esc.kspace.size(); ++i) {
        v.samples[i] = cplxf(static_cast<float>(esc.kspace[i].real()), static_cast<float>(esc.kspace[i].imag()));
    }
    return v;
}

KSpaceVolume rss_payload(const RssVolume& rss, const std::string& volume_id) {
    KSpaceVolume v = single_coil(rss.slices, rss.rows, rss.cols, volume_id);
    for (std::size_t i = 0; i < rss.values.size(); ++i) {
        v.samples[i] = cplxf(static_cast<float>(rss.values[i]), 0.0f);
    }
    return v;
}

EscVolume esc_from_payload(const KSpaceVolume& v) {
    if (v.coils != 1) {
        throw DimensionError("ESC payload must have exactly one coil, found " + std::to_string(v.coils));
    }
    EscVolume esc(v.slices, v.rows, v.cols);
    for (std::size_t i = 0; i < v.samples.size(); ++i) {
        esc.pixels[i] = cplx(v.samples[i].real(), v.samples[i].imag());
    }
    return esc;
}

RssVolume rss_from_payload(const KSpaceVolume& v) {
    if (v.coils != 1) {
        throw DimensionError("RSS payload must have exactly one coil, found " + std::to_string(v.coils));
    }
    RssVolume out(v.slices, v.rows, v.cols);
    for (std::size_t i = 0; i < v.samples.size(); ++i) {
        if (v.samples[i].real() < 0.0f || v.samples[i].imag() != 0.0f) {
            throw DataError("RSS payload must be real and nonnegative");
        }
        out.values[i] = v.samples[i].real();
    }
    return out;
}

} // namespace escoil
