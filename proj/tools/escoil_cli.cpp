// escoil: command-line driver for emulated single-coil conversion.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "escoil/apply.hpp"
#include "escoil/error.hpp"
#include "escoil/fit.hpp"
#include "escoil/manifest.hpp"
#include "escoil/panels.hpp"
#include "escoil/recon.hpp"
#include "escoil/screen.hpp"
#include "escoil/synth.hpp"
#include "escoil/volume_io.hpp"

namespace fs = std::filesystem;
using namespace escoil;

namespace {

struct Crop {
    std::vector<std::size_t> size{320, 320};
    std::size_t rows() const { return size.at(0); }
    std::size_t cols() const { return size.at(1); }
};

void add_crop(CLI::App* cmd, Crop& crop) {
    cmd->add_option("--crop", crop.size, "Center crop rows cols")->expected(2)->capture_default_str();
}

KSpaceVolume load(const std::string& path, const std::string& format) {
    return read_volume(path, parse_volume_format(format));
}

std::string strip_suffix(std::string name, const std::string& suffix) {
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        name.resize(name.size() - suffix.size());
    }
    return name;
}

struct ScreenJob {
    std::string volume_id;
    fs::path esc;
    fs::path rss;
};

std::vector<ScreenJob> discover(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw IoError(dir.string() + " is not a directory");
    }
    std::vector<ScreenJob> jobs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        const std::string id = strip_suffix(name, ".esc.escv");
        if (id == name) {
            continue;
        }
        const fs::path rss = dir / (id + ".rss.escv");
        if (!fs::exists(rss)) {
            throw IoError("no RSS volume " + rss.string() + " for " + entry.path().string());
        }
        jobs.push_back({id, entry.path(), rss});
    }
    std::sort(jobs.begin(), jobs.end(), [](const ScreenJob& a, const ScreenJob& b) { return a.volume_id < b.volume_id; });
    return jobs;
}

std::vector<SliceReport> run_screen_pool(const std::vector<ScreenJob>& jobs, const ScreenConfig& cfg,
                                         std::size_t workers) {
    std::vector<std::vector<SliceReport>> per_volume(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::string first_error;
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                const EscVolume esc = esc_from_payload(read_volume(jobs[i].esc));
                const RssVolume rss = rss_from_payload(read_volume(jobs[i].rss));
                per_volume[i] = slice_reports(esc, rss, jobs[i].volume_id, cfg);
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (first_error.empty()) {
                    first_error = jobs[i].volume_id + ": " + e.what();
                }
            }
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(jobs.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back(work);
    }
    work();
    for (std::thread& t : pool) {
        t.join();
    }
    if (!first_error.empty()) {
        throw Error(first_error);
    }
    std::vector<SliceReport> all;
    for (auto& v : per_volume) {
        all.insert(all.end(), v.begin(), v.end());
    }
    return all;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Emulated single-coil conversion of multi-coil MRI data"};
    app.require_subcommand(1);
    std::string format = "escv";
    app.add_option("--format", format, "Input volume format: escv or fastmri-h5")->capture_default_str();

    // synth
    SynthConfig synth_cfg;
    std::string synth_profile = "gaussian-ring";
    std::string synth_out;
    std::string synth_truth;
    bool pad_rows_set = false;
    bool pad_cols_set = false;
    auto* synth = app.add_subcommand("synth", "Write a synthetic multi-coil phantom volume");
    synth->add_option("--coils", synth_cfg.coils)->capture_default_str();
    synth->add_option("--rows", synth_cfg.rows)->capture_default_str();
    synth->add_option("--cols", synth_cfg.cols)->capture_default_str();
    synth->add_option("--slices", synth_cfg.slices)->capture_default_str();
    synth->add_option_function<std::size_t>("--pad-rows", [&](std::size_t v) { synth_cfg.pad_rows = v; pad_rows_set = true; },
                                            "Acquisition rows H (default: rows)");
    synth->add_option_function<std::size_t>("--pad-cols", [&](std::size_t v) { synth_cfg.pad_cols = v; pad_cols_set = true; },
                                            "Acquisition cols W (default: cols)");
    synth->add_option("--profile", synth_profile, "gaussian-ring or uniform")->capture_default_str();
    synth->add_option("--phase-ramp", synth_cfg.phase_ramp_strength)->capture_default_str();
    synth->add_option("--noise", synth_cfg.noise_sigma, "Complex noise std per k-space sample")->capture_default_str();
    synth->add_option("--seed", synth_cfg.seed)->capture_default_str();
    synth->add_option("--out", synth_out, "Output ESCV k-space volume")->required();
    synth->add_option("--truth-out", synth_truth, "Optional ESCV file for the phantom");

    // rss
    std::string rss_in;
    std::string rss_out;
    Crop rss_crop;
    auto* rss_cmd = app.add_subcommand("rss", "Root-sum-square ground truth of a volume");
    rss_cmd->add_option("input", rss_in)->required();
    add_crop(rss_cmd, rss_crop);
    rss_cmd->add_option("--out", rss_out)->required();

    // fit
    std::string fit_in;
    std::string fit_out;
    std::string fit_method = "lbfgs";
    std::string fit_trace;
    double fit_threshold = 0.0;
    Crop fit_crop;
    OptimizerConfig opt;
    auto* fit_cmd = app.add_subcommand("fit", "Fit complex coil weights to the RSS");
    fit_cmd->add_option("input", fit_in)->required();
    add_crop(fit_cmd, fit_crop);
    fit_cmd->add_option("--method", fit_method, "lbfgs, lm or gd")->capture_default_str();
    fit_cmd->add_option("--memory", opt.lbfgs_memory, "LBFGS memory")->capture_default_str();
    fit_cmd->add_option("--threshold", fit_threshold, "Fit only pixels with RSS above this")->capture_default_str();
    fit_cmd->add_option("--max-iter", opt.max_iterations)->capture_default_str();
    fit_cmd->add_option("--gtol", opt.gradient_tolerance)->capture_default_str();
    fit_cmd->add_option("--ftol", opt.objective_tolerance)->capture_default_str();
    fit_cmd->add_option("--gd-step", opt.gd_step, "Fixed GD step (0: automatic)")->capture_default_str();
    fit_cmd->add_option("--lm-damping", opt.lm_damping_init)->capture_default_str();
    fit_cmd->add_option("--restarts", opt.restarts, "Extra phase-rotated starts; the best fit is kept")
        ->capture_default_str();
    fit_cmd->add_option("--seed", opt.seed)->capture_default_str();
    fit_cmd->add_option("--trace", fit_trace, "Optional CSV of per-iteration objective");
    fit_cmd->add_option("--out", fit_out, "Output manifest")->required();

    // apply
    std::string apply_in;
    std::string apply_manifest;
    std::string apply_domain = "kspace";
    std::string apply_out;
    std::string apply_kspace_out;
    auto* apply_cmd = app.add_subcommand("apply", "Apply fitted weights to produce the ESC volume");
    apply_cmd->add_option("input", apply_in)->required();
    apply_cmd->add_option("manifest", apply_manifest)->required();
    apply_cmd->add_option("--domain", apply_domain, "kspace or image")
        ->check(CLI::IsMember({"kspace", "image"}))
        ->capture_default_str();
    apply_cmd->add_option("--out", apply_out, "ESC image volume (ESCV, one coil)")->required();
    apply_cmd->add_option("--kspace-out", apply_kspace_out, "ESC k-space volume (kspace domain only)");

    // eigencoil
    std::string eig_in;
    std::string eig_out;
    std::string eig_mode_out;
    Crop eig_crop;
    auto* eig_cmd = app.add_subcommand("eigencoil", "Leading-singular-vector coil compression baseline");
    eig_cmd->add_option("input", eig_in)->required();
    add_crop(eig_cmd, eig_crop);
    eig_cmd->add_option("--out", eig_out)->required();
    eig_cmd->add_option("--mode-out", eig_mode_out, "CSV of the mode vector (default: <out>.mode.csv)");

    // screen
    std::string screen_dir;
    std::string screen_out;
    std::string screen_summary_out;
    ScreenConfig screen_cfg;
    std::size_t screen_jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* screen_cmd = app.add_subcommand("screen", "Flag artifact-bearing slices and volumes");
    screen_cmd->add_option("dir", screen_dir, "Directory of <id>.esc.escv / <id>.rss.escv pairs")->required();
    screen_cmd->add_option("--flag-ssim", screen_cfg.flag_ssim)->capture_default_str();
    screen_cmd->add_option("--volume-fraction", screen_cfg.volume_fraction)->capture_default_str();
    screen_cmd->add_option("--window", screen_cfg.ssim.window)->capture_default_str();
    screen_cmd->add_option("--sigma", screen_cfg.ssim.sigma)->capture_default_str();
    screen_cmd->add_option("--k1", screen_cfg.ssim.k1)->capture_default_str();
    screen_cmd->add_option("--k2", screen_cfg.ssim.k2)->capture_default_str();
    screen_cmd->add_option("--jobs", screen_jobs)->capture_default_str();
    screen_cmd->add_option("--out", screen_out, "Per-slice CSV report")->required();
    screen_cmd->add_option("--summary", screen_summary_out, "Optional summary text file");

    // export-images
    std::string export_esc;
    std::string export_rss;
    std::vector<std::string> export_also;
    std::string export_dir;
    auto* export_cmd = app.add_subcommand("export-images", "Write magnitude, difference and phase panels");
    export_cmd->add_option("esc", export_esc)->required();
    export_cmd->add_option("rss", export_rss)->required();
    export_cmd->add_option("--also", export_also, "Additional label=volume.escv panels");
    export_cmd->add_option("--out", export_dir)->required();

    // weights-plot
    std::string plot_manifest;
    std::string plot_out;
    std::string plot_format = "csv";
    auto* plot_cmd = app.add_subcommand("weights-plot", "Per-coil weights as CSV or a scatter graymap");
    plot_cmd->add_option("manifest", plot_manifest)->required();
    plot_cmd->add_option("--format", plot_format)->check(CLI::IsMember({"csv", "pgm"}))->capture_default_str();
    plot_cmd->add_option("--out", plot_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*synth) {
            synth_cfg.profile = parse_profile(synth_profile);
            if (!pad_rows_set) {
                synth_cfg.pad_rows = synth_cfg.rows;
            }
            if (!pad_cols_set) {
                synth_cfg.pad_cols = synth_cfg.cols;
            }
            const SynthResult result = synth_volume(synth_cfg);
            write_volume(result.volume, synth_out);
            if (!synth_truth.empty()) {
                write_volume(rss_payload(result.truth), synth_truth);
            }
        } else if (*rss_cmd) {
            const KSpaceVolume v = load(rss_in, format);
            write_volume(rss_payload(rss(reconstruct(v, rss_crop.rows(), rss_crop.cols()))), rss_out);
        } else if (*fit_cmd) {
            opt.method = parse_method(fit_method);
            const KSpaceVolume v = load(fit_in, format);
            const CoilImageStack stack = reconstruct(v, fit_crop.rows(), fit_crop.cols());
            const FitReport report = fit(stack, rss(stack), opt, fit_threshold, v.volume_id);
            write_manifest(report.manifest, fit_out);
            if (!fit_trace.empty()) {
                std::string csv = "iteration,objective,gradient_norm\n";
                char buf[96];
                for (const TraceEntry& t : report.optimization.trace) {
                    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", t.iteration, t.objective, t.gradient_norm);
                    csv += buf;
                }
                write_file_atomic(fit_trace, csv);
            }
            std::fprintf(stderr, "%s: %zu iterations, objective %.6g -> %.6g (%s)\n", v.volume_id.c_str(),
                         report.manifest.iterations, report.manifest.initial_objective,
                         report.manifest.final_objective,
                         report.stalled ? "stalled" : std::string(to_string(report.optimization.reason)).c_str());
        } else if (*apply_cmd) {
            const KSpaceVolume v = load(apply_in, format);
            const FitManifest m = read_manifest(apply_manifest);
            EscVolume esc;
            if (apply_domain == "kspace") {
                esc = apply_kspace_domain(v, m.weights, m.crop_rows, m.crop_cols);
                const std::string kout =
                    apply_kspace_out.empty() ? strip_suffix(apply_out, ".escv") + ".kspace.escv" : apply_kspace_out;
                write_volume(kspace_payload(esc, v.volume_id), kout);
            } else {
                esc = apply_image_domain(reconstruct(v, m.crop_rows, m.crop_cols), m.weights);
            }
            write_volume(image_payload(esc, v.volume_id), apply_out);
        } else if (*eig_cmd) {
            const KSpaceVolume v = load(eig_in, format);
            const Eigencoil e = eigencoil(reconstruct(v, eig_crop.rows(), eig_crop.cols()));
            write_volume(image_payload(e.combined, v.volume_id), eig_out);
            FitManifest as_weights;
            as_weights.weights = e.mode;
            const std::string mode_out =
                eig_mode_out.empty() ? strip_suffix(eig_out, ".escv") + ".mode.csv" : eig_mode_out;
            write_file_atomic(mode_out, weights_csv(as_weights));
        } else if (*screen_cmd) {
            const auto jobs = discover(screen_dir);
            const auto reports = run_screen_pool(jobs, screen_cfg, screen_jobs);
            const ScreenSummary summary = screen(reports, screen_cfg.volume_fraction);
            write_file_atomic(screen_out, format_reports_csv(reports));
            const std::string text = format_summary(summary);
            if (!screen_summary_out.empty()) {
                write_file_atomic(screen_summary_out, text);
            }
            std::cout << text;
        } else if (*export_cmd) {
            std::vector<LabeledVolume> volumes;
            volumes.push_back({"esc", esc_from_payload(read_volume(export_esc))});
            for (const std::string& spec : export_also) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos || eq == 0) {
                    std::cerr << "escoil: --also expects label=volume, got '" << spec << "'\n";
                    return 1;
                }
                volumes.push_back({spec.substr(0, eq), esc_from_payload(read_volume(spec.substr(eq + 1)))});
            }
            const RssVolume truth = rss_from_payload(read_volume(export_rss));
            export_panels(volumes, truth, export_dir);
        } else if (*plot_cmd) {
            const FitManifest m = read_manifest(plot_manifest);
            write_file_atomic(plot_out, plot_format == "csv" ? weights_csv(m) : weights_scatter_pgm(m));
        }
    } catch (const std::exception& e) {
        std::cerr << "escoil: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
