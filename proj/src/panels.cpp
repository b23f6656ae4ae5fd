#include "escoil/panels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>

#include "escoil/error.hpp"
#include "escoil/volume_io.hpp"

namespace escoil {

std::string encode_pgm16(std::size_t rows, std::size_t cols, const std::vector<std::uint16_t>& samples) {
    if (samples.size() != rows * cols) {
        throw DimensionError("graymap sample count does not match its size");
    }
    std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n65535\n";
    out.reserve(out.size() + 2 * samples.size());
    for (std::uint16_t v : samples) {
        out.push_back(static_cast<char>(v >> 8));
        out.push_back(static_cast<char>(v & 0xff));
    }
    return out;
}

namespace {

constexpr double kMax = 65535.0;
constexpr std::uint16_t kMidGray = 32768;

std::uint16_t quantize(double unit) {
    return static_cast<std::uint16_t>(std::lround(std::clamp(unit, 0.0, 1.0) * kMax));
}

std::string slice_name(const std::string& label, std::size_t s, const char* kind) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_s%03zu_", s);
    return label + buf + kind + ".pgm";
}

} // namespace

std::vector<std::filesystem::path> export_panels(const std::vector<LabeledVolume>& volumes, const RssVolume& rss,
                                                 const std::filesystem::path& dir) {
    for (const LabeledVolume& v : volumes) {
        if (v.volume.slices != rss.slices || v.volume.rows != rss.rows || v.volume.cols != rss.cols) {
            throw DimensionError("volume '" + v.label + "' does not match the RSS shape");
        }
        if (v.label.empty() || v.label == "rss") {
            throw DomainError("panel labels must be nonempty and distinct from 'rss'");
        }
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }

    const double peak = rss.values.empty() ? 0.0 : *std::max_element(rss.values.begin(), rss.values.end());
    double spread = 0.0;
    for (const LabeledVolume& v : volumes) {
        for (std::size_t i = 0; i < rss.values.size(); ++i) {
            spread = std::max(spread, std::abs(std::abs(v.volume.pixels[i]) - rss.values[i]));
        }
    }

    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const std::vector<std::uint16_t>& samples) {
        const std::filesystem::path path = dir / name;
        write_file_atomic(path, encode_pgm16(rss.rows, rss.cols, samples));
        written.push_back(path);
    };

    const std::size_t per = rss.rows * rss.cols;
    std::vector<std::uint16_t> samples(per);
    for (std::size_t s = 0; s < rss.slices; ++s) {
        const std::span<const double> truth = rss.slice(s);
        for (std::size_t p = 0; p < per; ++p) {
            samples[p] = peak > 0.0 ? quantize(truth[p] / peak) : 0;
        }
        emit(slice_name("rss", s, "mag"), samples);

        for (const LabeledVolume& v : volumes) {
            const std::span<const cplx> pixels = v.volume.slice(s);
            for (std::size_t p = 0; p < per; ++p) {
                samples[p] = peak > 0.0 ? quantize(std::abs(pixels[p]) / peak) : 0;
            }
            emit(slice_name(v.label, s, "mag"), samples);

            for (std::size_t p = 0; p < per; ++p) {
                if (spread > 0.0) {
                    const double d = (std::abs(pixels[p]) - truth[p]) / spread;
                    const double level = std::clamp(kMidGray + std::round(d * 32767.0), 0.0, kMax);
                    samples[p] = static_cast<std::uint16_t>(level);
                } else {
                    samples[p] = kMidGray;
                }
            }
            emit(slice_name(v.label, s, "diff"), samples);

            for (std::size_t p = 0; p < per; ++p) {
                samples[p] = quantize((std::arg(pixels[p]) + std::numbers::pi) / (2.0 * std::numbers::pi));
            }
            emit(slice_name(v.label, s, "phase"), samples);
        }
    }
    return written;
}

std::string weights_csv(const FitManifest& m) {
    std::ostringstream out;
    out << "coil,re,im,magnitude,phase\n";
    char buf[160];
    for (std::size_t c = 0; c < m.weights.size(); ++c) {
        const cplx w = m.weights[c];
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", c, w.real(), w.imag(), std::abs(w),
                      std::arg(w));
        out << buf;
    }
    return out.str();
}

std::string weights_scatter_pgm(const FitManifest& m, std::size_t size) {
    if (size < 16) {
        throw DimensionError("scatter canvas must be at least 16 pixels");
    }
    double extent = 0.0;
    for (const cplx& w : m.weights) {
        extent = std::max({extent, std::abs(w.real()), std::abs(w.imag())});
    }
    extent = extent > 0.0 ? 1.1 * extent : 1.0;

    std::vector<std::uint16_t> canvas(size * size, 65535);
    const std::size_t mid = size / 2;
    for (std::size_t i = 0; i < size; ++i) {
        canvas[mid * size + i] = 40000; // real axis
        canvas[i * size + mid] = 40000; // imaginary axis
    }
    const double half = static_cast<double>(size - 1) / 2.0;
    for (const cplx& w : m.weights) {
        const auto col = static_cast<long>(std::lround(half + w.real() / extent * half));
        const auto row = static_cast<long>(std::lround(half - w.imag() / extent * half));
        for (long dr = -2; dr <= 2; ++dr) {
            for (long dc = -2; dc <= 2; ++dc) {
                const long r = row + dr;
                const long c = col + dc;
                if (r >= 0 && c >= 0 && r < static_cast<long>(size) && c < static_cast<long>(size)) {
                    canvas[static_cast<std::size_t>(r) * size + static_cast<std::size_t>(c)] = 0;
                }
            }
        }
    }
    return encode_pgm16(size, size, canvas);
}

} // namespace escoil
