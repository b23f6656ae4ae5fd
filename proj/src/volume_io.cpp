#include "escoil/volume_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <string>

#include "escoil/error.hpp"

namespace escoil {

VolumeFormat parse_volume_format(std::string_view name) {
    if (name == "escv") {
        return VolumeFormat::escv;
    }
    if (name == "fastmri-h5" || name == "h5") {
        return VolumeFormat::fastmri_h5;
    }
    throw FormatError("unknown volume format '" + std::string(name) + "'");
}

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
    }
}

template <typename T>
T get_le(const std::uint8_t* p) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= static_cast<T>(p[i]) << (8 * i);
    }
    return value;
}

std::uint64_t checked_count(std::uint64_t l, std::uint64_t k, std::uint64_t h, std::uint64_t w) {
    constexpr auto max = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t total = 1;
    for (std::uint64_t d : {l, k, h, w}) {
        if (d == 0) {
            throw FormatError("ESCV header has a zero dimension");
        }
        if (total > max / d) {
            throw FormatError("ESCV header dimensions overflow");
        }
        total *= d;
    }
    if (total > max / 8) {
        throw FormatError("ESCV header dimensions overflow");
    }
    return total;
}

} // namespace

std::vector<std::uint8_t> encode_escv(const KSpaceVolume& v) {
    v.validate();
    std::vector<std::uint8_t> out;
    out.reserve(kEscvHeaderBytes + v.samples.size() * 8);
    for (char c : {'E', 'S', 'C', 'V'}) {
        out.push_back(static_cast<std::uint8_t>(c));
    }
    put_le<std::uint16_t>(out, kEscvVersion);
    put_le<std::uint64_t>(out, v.slices);
    put_le<std::uint64_t>(out, v.coils);
    put_le<std::uint64_t>(out, v.rows);
    put_le<std::uint64_t>(out, v.cols);
    for (const cplxf& s : v.samples) {
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(s.real()));
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(s.imag()));
    }
    return out;
}

KSpaceVolume decode_escv(const std::vector<std::uint8_t>& bytes, std::string volume_id) {
    if (bytes.size() < kEscvHeaderBytes) {
        throw FormatError("ESCV header truncated: " + std::to_string(bytes.size()) + " bytes");
    }
    if (std::memcmp(bytes.data(), "ESCV", 4) != 0) {
        throw FormatError("bad ESCV magic");
    }
    const auto version = get_le<std::uint16_t>(bytes.data() + 4);
    if (version != kEscvVersion) {
        throw FormatError("unsupported ESCV version " + std::to_string(version));
    }
    const std::uint8_t* dims = bytes.data() + 6;
    const auto l = get_le<std::uint64_t>(dims);
    const auto k = get_le<std::uint64_t>(dims + 8);
    const auto h = get_le<std::uint64_t>(dims + 16);
    const auto w = get_le<std::uint64_t>(dims + 24);
    const std::uint64_t count = checked_count(l, k, h, w);
    const std::uint64_t payload = bytes.size() - kEscvHeaderBytes;
    if (payload != count * 8) {
        throw TruncationError("ESCV payload has " + std::to_string(payload) + " bytes, header implies " +
                              std::to_string(count * 8));
    }

    KSpaceVolume v(l, k, h, w);
    v.volume_id = std::move(volume_id);
    const std::uint8_t* p = bytes.data() + kEscvHeaderBytes;
    for (std::uint64_t i = 0; i < count; ++i, p += 8) {
        const float re = std::bit_cast<float>(get_le<std::uint32_t>(p));
        const float im = std::bit_cast<float>(get_le<std::uint32_t>(p + 4));
        if (!std::isfinite(re) || !std::isfinite(im)) {
            throw DataError("non-finite sample at flat index " + std::to_string(i));
        }
        v.samples[i] = cplxf(re, im);
    }
    return v;
}

namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string volume_id_from_path(const std::filesystem::path& path) {
    // "knee_001.esc.escv" -> "knee_001.esc"
    return path.stem().string();
}

} // namespace

KSpaceVolume read_volume(const std::filesystem::path& path, VolumeFormat format) {
    if (format == VolumeFormat::fastmri_h5) {
        return read_fastmri(path);
    }
    if (!std::filesystem::exists(path)) {
        throw IoError("no such file: " + path.string());
    }
    return decode_escv(slurp(path), volume_id_from_path(path));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    std::filesystem::path tmp = path;
    std::random_device rd;
    tmp += ".tmp" + std::to_string(rd());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw IoError("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot rename into " + path.string() + ": " + ec.message());
    }
}

void write_volume(const KSpaceVolume& v, const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = encode_escv(v);
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

} // namespace escoil
