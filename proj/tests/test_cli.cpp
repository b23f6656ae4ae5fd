#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "escoil/manifest.hpp"
#include "escoil/volume_io.hpp"

using namespace escoil;
namespace fs = std::filesystem;

namespace {

const fs::path& work() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "escoil_test_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string at(const std::string& name) { return (work() / name).string(); }

int run(const std::string& args) {
    const std::string cmd = std::string("'") + ESCOIL_CLI + "' " + args + " >'" + at("stdout.txt") + "' 2>'" +
                            at("stderr.txt") + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("synth, rss, fit, apply and export run end to end") {
    REQUIRE(run("synth --coils 4 --rows 24 --cols 24 --pad-rows 32 --pad-cols 28 --slices 2 --noise 0.001 --out " +
                at("vol.escv") + " --truth-out " + at("truth.escv")) == 0);
    const KSpaceVolume v = read_volume(at("vol.escv"));
    CHECK(v.coils == 4);
    CHECK(v.rows == 32);
    CHECK(v.cols == 28);

    REQUIRE(run("rss " + at("vol.escv") + " --crop 24 24 --out " + at("vol.rss.escv")) == 0);
    CHECK(read_volume(at("vol.rss.escv")).rows == 24);

    REQUIRE(run("fit " + at("vol.escv") + " --crop 24 24 --method lbfgs --trace " + at("trace.csv") + " --out " +
                at("m1.txt")) == 0);
    REQUIRE(run("fit " + at("vol.escv") + " --crop 24 24 --method lbfgs --out " + at("m2.txt")) == 0);
    CHECK(slurp(at("m1.txt")) == slurp(at("m2.txt")));
    const FitManifest m = read_manifest(at("m1.txt"));
    CHECK(m.volume_id == "vol");
    CHECK(m.weights.size() == 4);
    CHECK(m.final_objective <= m.initial_objective);
    CHECK(m.crop_rows == 24);
    CHECK(slurp(at("trace.csv")).rfind("iteration,objective,gradient_norm\n0,", 0) == 0);
    CHECK(slurp(at("stderr.txt")).find("iterations") != std::string::npos);

    REQUIRE(run("apply " + at("vol.escv") + " " + at("m1.txt") + " --out " + at("vol.esc.escv")) == 0);
    const KSpaceVolume esc = read_volume(at("vol.esc.escv"));
    CHECK(esc.coils == 1);
    CHECK(esc.rows == 24);
    const KSpaceVolume kesc = read_volume(at("vol.esc.kspace.escv"));
    CHECK(kesc.rows == 32);
    CHECK(kesc.cols == 28);
    REQUIRE(run("apply " + at("vol.escv") + " " + at("m1.txt") + " --domain image --out " + at("img.esc.escv")) == 0);
    const KSpaceVolume img = read_volume(at("img.esc.escv"));
    double d = 0.0, top = 0.0;
    for (std::size_t i = 0; i < esc.samples.size(); ++i) {
        d = std::max(d, static_cast<double>(std::abs(esc.samples[i] - img.samples[i])));
        top = std::max(top, static_cast<double>(std::abs(esc.samples[i])));
    }
    CHECK(d <= 1e-6 * top);

    REQUIRE(run("eigencoil " + at("vol.escv") + " --crop 24 24 --out " + at("vol.eig.escv")) == 0);
    CHECK(slurp(at("vol.eig.mode.csv")).rfind("coil,re,im,magnitude,phase\n", 0) == 0);

    REQUIRE(run("export-images " + at("vol.esc.escv") + " " + at("vol.rss.escv") + " --also eig=" +
                at("vol.eig.escv") + " --out " + at("panels")) == 0);
    CHECK(fs::exists(work() / "panels" / "rss_s001_mag.pgm"));
    CHECK(fs::exists(work() / "panels" / "esc_s000_diff.pgm"));
    CHECK(fs::exists(work() / "panels" / "eig_s001_phase.pgm"));

    REQUIRE(run("weights-plot " + at("m1.txt") + " --format csv --out " + at("w.csv")) == 0);
    CHECK(slurp(at("w.csv")).rfind("coil,re,im,magnitude,phase\n0,", 0) == 0);
    REQUIRE(run("weights-plot " + at("m1.txt") + " --format pgm --out " + at("w.pgm")) == 0);
    CHECK(slurp(at("w.pgm")).rfind("P5\n256 256\n65535\n", 0) == 0);

    fs::create_directories(work() / "screen");
    fs::copy_file(at("vol.esc.escv"), work() / "screen" / "vol.esc.escv", fs::copy_options::overwrite_existing);
    fs::copy_file(at("vol.rss.escv"), work() / "screen" / "vol.rss.escv", fs::copy_options::overwrite_existing);
    REQUIRE(run("screen " + at("screen") + " --jobs 2 --out " + at("report.csv") + " --summary " + at("sum.txt")) == 0);
    const std::string csv = slurp(at("report.csv"));
    CHECK(csv.rfind("volume_id,slice,hellinger,l2,ssim,flagged\nvol,0,", 0) == 0);
    CHECK(slurp(at("sum.txt")) == slurp(at("stdout.txt")));
}

TEST_CASE("every method is available from the command line") {
    REQUIRE(run("synth --coils 3 --rows 16 --cols 16 --out " + at("small.escv")) == 0);
    for (const char* method : {"gd", "lm", "lbfgs"}) {
        CAPTURE(method);
        CHECK(run(std::string("fit ") + at("small.escv") + " --crop 16 16 --method " + method + " --out " +
                  at(std::string("small.") + method + ".txt")) == 0);
        CHECK(to_string(read_manifest(at(std::string("small.") + method + ".txt")).method) == method);
    }
}

TEST_CASE("fastMRI input through the top-level format flag") {
    if (!fastmri_supported()) {
        return;
    }
    REQUIRE(run("synth --coils 2 --rows 16 --cols 16 --out " + at("h.escv")) == 0);
    write_fastmri(read_volume(at("h.escv")), at("h.h5"));
    REQUIRE(run("--format fastmri-h5 rss " + at("h.h5") + " --crop 16 16 --out " + at("h5.rss.escv")) == 0);
    REQUIRE(run("rss " + at("h.escv") + " --crop 16 16 --out " + at("escv.rss.escv")) == 0);
    CHECK(slurp(at("h5.rss.escv")) == slurp(at("escv.rss.escv")));
}

TEST_CASE("exit codes") {
    CHECK(run("--help") == 0);
    CHECK(run("no-such-command") == 1);
    CHECK(run("fit") == 1);
    CHECK(run("rss " + at("missing.escv") + " --out " + at("x.escv")) == 2);
    REQUIRE(run("synth --coils 2 --rows 8 --cols 8 --out " + at("tiny.escv")) == 0);
    CHECK(run("fit " + at("tiny.escv") + " --crop 8 8 --method adam --out " + at("x.txt")) == 2);
    CHECK(run("rss " + at("tiny.escv") + " --crop 9 8 --out " + at("x.escv")) == 2);
    CHECK(slurp(at("stderr.txt")).rfind("escoil: ", 0) == 0);
}
