#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "escoil/error.hpp"
#include "escoil/manifest.hpp"
#include "escoil/volume_io.hpp"
#include "support.hpp"

using namespace escoil;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "escoil_test_volume_io";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<std::uint8_t> file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool bit_identical(const KSpaceVolume& a, const KSpaceVolume& b) {
    return a.slices == b.slices && a.coils == b.coils && a.rows == b.rows && a.cols == b.cols &&
           std::memcmp(a.samples.data(), b.samples.data(), a.samples.size() * sizeof(cplxf)) == 0;
}

} // namespace

TEST_CASE("minimal ESCV file decodes to its four samples") {
    // Hand-assembled bytes: magic, version 1, dims (1,1,2,2), then 1+0i, 0, 0, 0.
    std::vector<std::uint8_t> bytes = {'E', 'S', 'C', 'V', 1, 0};
    for (std::uint64_t d : {1, 1, 2, 2}) {
        for (int i = 0; i < 8; ++i) {
            bytes.push_back(static_cast<std::uint8_t>(d >> (8 * i)));
        }
    }
    const std::uint8_t one[4] = {0x00, 0x00, 0x80, 0x3f}; // 1.0f little-endian
    bytes.insert(bytes.end(), one, one + 4);
    bytes.resize(bytes.size() + 4 + 3 * 8, 0);

    const fs::path p = scratch("minimal.escv");
    {
        std::ofstream out(p, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    const KSpaceVolume v = read_volume(p);
    CHECK(v.slices == 1);
    CHECK(v.coils == 1);
    CHECK(v.rows == 2);
    CHECK(v.cols == 2);
    CHECK(v.samples == std::vector<cplxf>{{1.0f, 0.0f}, {}, {}, {}});
    CHECK(v.volume_id == "minimal");
    CHECK(encode_escv(v) == bytes);
}

TEST_CASE("ESCV write/read round-trips bit-exactly for random volumes") {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::size_t> dim(1, 6);
    for (int trial = 0; trial < 20; ++trial) {
        KSpaceVolume v = testing::random_volume(rng, dim(rng), dim(rng), dim(rng), dim(rng));
        // Include signed zeros and subnormals.
        v.samples.front() = cplxf(-0.0f, std::numeric_limits<float>::denorm_min());
        const fs::path p = scratch("rt" + std::to_string(trial) + ".escv");
        write_volume(v, p);
        CHECK(bit_identical(read_volume(p), v));
    }
}

TEST_CASE("ESCV writes are deterministic") {
    std::mt19937_64 rng(7);
    const KSpaceVolume v = testing::random_volume(rng, 2, 3, 4, 5);
    write_volume(v, scratch("a.escv"));
    write_volume(v, scratch("b.escv"));
    CHECK(file_bytes(scratch("a.escv")) == file_bytes(scratch("b.escv")));
}

TEST_CASE("fastMRI-like shape round-trips") {
    std::mt19937_64 rng(11);
    const KSpaceVolume v = testing::random_volume(rng, 3, 15, 640, 368);
    const fs::path p = scratch("large.escv");
    write_volume(v, p);
    CHECK(fs::file_size(p) == kEscvHeaderBytes + 3ull * 15 * 640 * 368 * 8);
    CHECK(bit_identical(read_volume(p), v));
}

TEST_CASE("one-hot volume is read back at the same (slice, coil, row, col)") {
    for (std::size_t hot = 0; hot < 2 * 3 * 4 * 5; ++hot) {
        KSpaceVolume v(2, 3, 4, 5);
        v.samples[hot] = {1.0f, 2.0f};
        const KSpaceVolume back = decode_escv(encode_escv(v));
        const std::size_t s = hot / 60, c = (hot / 20) % 3, r = (hot / 5) % 4, w = hot % 5;
        CHECK(back.at(s, c, r, w) == cplxf(1.0f, 2.0f));
        CHECK(back.index(s, c, r, w) == hot);
    }
}

TEST_CASE("ESCV decode errors") {
    KSpaceVolume v(1, 1, 2, 2);
    const auto good = encode_escv(v);

    SUBCASE("bad magic") {
        auto b = good;
        b[0] = 'X';
        CHECK_THROWS_AS(decode_escv(b), FormatError);
    }
    SUBCASE("bad version") {
        auto b = good;
        b[4] = 2;
        CHECK_THROWS_AS(decode_escv(b), FormatError);
    }
    SUBCASE("short header") {
        CHECK_THROWS_AS(decode_escv({good.begin(), good.begin() + 10}), FormatError);
    }
    SUBCASE("truncated payload") {
        CHECK_THROWS_AS(decode_escv({good.begin(), good.end() - 1}), TruncationError);
    }
    SUBCASE("trailing bytes") {
        auto b = good;
        b.push_back(0);
        CHECK_THROWS_AS(decode_escv(b), TruncationError);
    }
    SUBCASE("NaN payload") {
        auto b = good;
        const std::uint8_t nan[4] = {0x00, 0x00, 0xc0, 0x7f};
        std::memcpy(b.data() + kEscvHeaderBytes, nan, 4);
        CHECK_THROWS_AS(decode_escv(b), DataError);
    }
    SUBCASE("zero dimension") {
        auto b = good;
        b[6] = 0;
        CHECK_THROWS_AS(decode_escv({b.begin(), b.begin() + kEscvHeaderBytes}), FormatError);
    }
}

TEST_CASE("write_volume rejects invalid volumes and unwritable paths") {
    KSpaceVolume v(1, 1, 1, 1);
    v.samples[0] = {std::numeric_limits<float>::infinity(), 0.0f};
    CHECK_THROWS_AS(write_volume(v, scratch("bad.escv")), DataError);
    KSpaceVolume ok(1, 1, 1, 1);
    CHECK_THROWS_AS(write_volume(ok, "/nonexistent-dir/x.escv"), IoError);
    CHECK_THROWS_AS(read_volume(scratch("missing.escv")), IoError);
}

TEST_CASE("fastMRI container matches the equivalent ESCV volume") {
    if (!fastmri_supported()) {
        MESSAGE("built without HDF5; skipping");
        return;
    }
    std::mt19937_64 rng(5);
    const KSpaceVolume v = testing::random_volume(rng, 2, 4, 12, 10);
    const fs::path h5 = scratch("vol.h5");
    write_fastmri(v, h5);
    const fs::path escv = scratch("vol.escv");
    write_volume(v, escv);
    CHECK(bit_identical(read_volume(h5, VolumeFormat::fastmri_h5), read_volume(escv)));
    CHECK_THROWS_AS(read_volume(escv, VolumeFormat::fastmri_h5), FormatError);
}

// Manifests

TEST_CASE("two-weight manifest round-trips") {
    FitManifest m;
    m.volume_id = "file1000001";
    m.weights = {{1.0, 0.0}, {0.0, 1.0}};
    m.method = Method::lbfgs;
    m.iterations = 12;
    m.initial_objective = 3.5;
    m.final_objective = 1.25;
    m.threshold = 0.0;
    m.crop_rows = 320;
    m.crop_cols = 320;
    const fs::path p = scratch("m.txt");
    write_manifest(m, p);
    CHECK(read_manifest(p) == m);
}

TEST_CASE("random manifests round-trip losslessly") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> k(1, 32);
    std::uniform_int_distribution<int> exponent(-300, 300);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    auto wild = [&] { return std::ldexp(mant(rng), exponent(rng) / 10); };
    for (int seed = 0; seed < 100; ++seed) {
        FitManifest m;
        m.volume_id = "vol" + std::to_string(seed);
        m.weights.resize(k(rng));
        for (cplx& w : m.weights) {
            w = {wild(), wild()};
        }
        m.method = static_cast<Method>(seed % 3);
        m.iterations = static_cast<std::size_t>(seed * 7);
        m.final_objective = std::abs(wild());
        m.initial_objective = m.final_objective * (1.0 + std::abs(mant(rng)));
        m.threshold = std::abs(wild());
        m.crop_rows = k(rng);
        m.crop_cols = k(rng);
        const FitManifest back = parse_manifest(format_manifest(m));
        CHECK(back == m);
    }
}

TEST_CASE("manifest weights use 17 significant digits") {
    FitManifest m;
    m.weights = {{0.1, -1.0 / 3.0}};
    m.initial_objective = 1;
    const std::string text = format_manifest(m);
    CHECK(text.find("0.10000000000000001,-0.33333333333333331") != std::string::npos);
}

TEST_CASE("manifest schema enforcement") {
    FitManifest m;
    m.volume_id = "v";
    m.weights = {{1.0, 0.0}};
    m.initial_objective = 1.0;
    m.final_objective = 0.5;
    const std::string good = format_manifest(m);

    CHECK(parse_manifest(good) == m);

    SUBCASE("final above initial is rejected") {
        FitManifest bad = m;
        bad.final_objective = 2.0;
        CHECK_THROWS_AS(parse_manifest(format_manifest(bad)), FormatError);
    }
    SUBCASE("unknown key") { CHECK_THROWS_AS(parse_manifest(good + "colour = red\n"), FormatError); }
    SUBCASE("duplicate key") { CHECK_THROWS_AS(parse_manifest(good + "method = gd\n"), FormatError); }
    SUBCASE("missing key") {
        std::string text = good;
        text.erase(text.find("threshold"), text.find('\n', text.find("threshold")) - text.find("threshold") + 1);
        CHECK_THROWS_AS(parse_manifest(text), FormatError);
    }
    SUBCASE("bad number") {
        std::string text = good;
        text.replace(text.find("iterations = 0"), 14, "iterations = x");
        CHECK_THROWS_AS(parse_manifest(text), FormatError);
    }
    SUBCASE("bad method") {
        std::string text = good;
        text.replace(text.find("method = lbfgs"), 14, "method = adam");
        CHECK_THROWS_AS(parse_manifest(text), FormatError);
    }
}
