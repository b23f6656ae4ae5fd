#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "escoil/apply.hpp"
#include "escoil/error.hpp"
#include "escoil/fit.hpp"
#include "escoil/metrics.hpp"
#include "escoil/objective.hpp"
#include "escoil/recon.hpp"
#include "escoil/screen.hpp"
#include "escoil/synth.hpp"
#include "escoil/volume_io.hpp"

namespace py = pybind11;
using namespace escoil;

namespace {

template <typename T>
using carray = py::array_t<T, py::array::c_style | py::array::forcecast>;

void need_ndim(const py::array& a, py::ssize_t ndim, const char* what) {
    if (a.ndim() != ndim) {
        throw DimensionError(std::string(what) + " must have " + std::to_string(ndim) + " dimensions, got " +
                             std::to_string(a.ndim()));
    }
}

std::size_t dim(const py::array& a, py::ssize_t i) { return static_cast<std::size_t>(a.shape(i)); }

template <typename T>
py::array_t<T> to_numpy(const std::vector<T>& v, std::vector<py::ssize_t> shape) {
    py::array_t<T> out(shape);
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

KSpaceVolume kspace_from(const carray<cplxf>& a, std::string id = {}) {
    need_ndim(a, 4, "k-space");
    KSpaceVolume v(dim(a, 0), dim(a, 1), dim(a, 2), dim(a, 3));
    v.volume_id = std::move(id);
    std::copy(a.data(), a.data() + a.size(), v.samples.begin());
    return v;
}

CoilImageStack stack_from(const carray<cplx>& a) {
    need_ndim(a, 4, "coil images");
    CoilImageStack s(dim(a, 0), dim(a, 1), dim(a, 2), dim(a, 3));
    std::copy(a.data(), a.data() + a.size(), s.pixels.begin());
    return s;
}

RssVolume rss_from(const carray<double>& a) {
    need_ndim(a, 3, "rss");
    RssVolume r(dim(a, 0), dim(a, 1), dim(a, 2));
    std::copy(a.data(), a.data() + a.size(), r.values.begin());
    return r;
}

EscVolume esc_from(const carray<cplx>& a) {
    need_ndim(a, 3, "esc");
    EscVolume e(dim(a, 0), dim(a, 1), dim(a, 2));
    std::copy(a.data(), a.data() + a.size(), e.pixels.begin());
    return e;
}

RealGrid grid_from(const carray<double>& a) {
    need_ndim(a, 2, "image");
    return RealGrid(dim(a, 0), dim(a, 1), std::vector<double>(a.data(), a.data() + a.size()));
}

std::vector<cplx> weights_from(const carray<cplx>& a) {
    need_ndim(a, 1, "weights");
    return {a.data(), a.data() + a.size()};
}

py::array_t<cplx> esc_pixels(const EscVolume& e) {
    return to_numpy(e.pixels, {py::ssize_t(e.slices), py::ssize_t(e.rows), py::ssize_t(e.cols)});
}

py::array_t<cplxf> kspace_array(const KSpaceVolume& v) {
    return to_numpy(v.samples, {py::ssize_t(v.slices), py::ssize_t(v.coils), py::ssize_t(v.rows), py::ssize_t(v.cols)});
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "escoil core bindings";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<FormatError>(m, "FormatError", base);
    py::register_exception<TruncationError>(m, "TruncationError", base);
    py::register_exception<DataError>(m, "DataError", base);
    py::register_exception<IoError>(m, "IoError", base);
    py::register_exception<DimensionError>(m, "DimensionError", base);
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<DegenerateError>(m, "DegenerateError", base);
    py::register_exception<IllConditionedError>(m, "IllConditionedError", base);
    py::register_exception<DivergenceError>(m, "DivergenceError", base);

    m.def("fastmri_supported", &fastmri_supported);

    m.def(
        "read_volume",
        [](const std::string& path, const std::string& format) {
            const KSpaceVolume v = read_volume(path, parse_volume_format(format));
            return py::make_tuple(kspace_array(v), v.volume_id);
        },
        py::arg("path"), py::arg("format") = "escv",
        "Read k-space as a complex64 array (slices, coils, H, W) and its volume id.");

    m.def(
        "write_volume",
        [](const carray<cplxf>& kspace, const std::string& path) { write_volume(kspace_from(kspace), path); },
        py::arg("kspace"), py::arg("path"));

    m.def(
        "reconstruct",
        [](const carray<cplxf>& kspace, std::size_t rows, std::size_t cols) {
            const CoilImageStack s = reconstruct(kspace_from(kspace), rows, cols);
            return to_numpy(s.pixels, {py::ssize_t(s.slices), py::ssize_t(s.coils), py::ssize_t(s.rows),
                                       py::ssize_t(s.cols)});
        },
        py::arg("kspace"), py::arg("rows"), py::arg("cols"),
        "Centered inverse FFT and center crop; returns complex128 (slices, coils, rows, cols).");

    m.def(
        "rss",
        [](const carray<cplx>& images) {
            const RssVolume r = rss(stack_from(images));
            return to_numpy(r.values, {py::ssize_t(r.slices), py::ssize_t(r.rows), py::ssize_t(r.cols)});
        },
        py::arg("images"));

    m.def(
        "lls_init",
        [](const carray<cplx>& images, const carray<double>& b) {
            const CoilImageStack s = stack_from(images);
            const RssVolume r = rss_from(b);
            const std::vector<cplx> x = lls_init(s, r.values);
            return to_numpy(x, {py::ssize_t(x.size())});
        },
        py::arg("images"), py::arg("b"));

    m.def(
        "objective",
        [](const carray<cplx>& images, const carray<double>& b, const carray<cplx>& weights, double threshold) {
            const CoilImageStack s = stack_from(images);
            const Objective f = Objective::hellinger(s, rss_from(b), threshold);
            const std::vector<cplx> x = weights_from(weights);
            if (x.size() != s.coils) {
                throw DimensionError("weights length does not match the coil count");
            }
            return f.value(x);
        },
        py::arg("images"), py::arg("b"), py::arg("weights"), py::arg("threshold") = 0.0);

    m.def(
        "fit",
        [](const carray<cplx>& images, const carray<double>& b, const std::string& method, double threshold,
           std::size_t max_iterations, double gradient_tolerance, double objective_tolerance,
           std::size_t lbfgs_memory, double gd_step, std::size_t restarts) {
            const CoilImageStack s = stack_from(images);
            const RssVolume r = rss_from(b);
            OptimizerConfig cfg;
            cfg.method = parse_method(method);
            cfg.max_iterations = max_iterations;
            cfg.gradient_tolerance = gradient_tolerance;
            cfg.objective_tolerance = objective_tolerance;
            cfg.lbfgs_memory = lbfgs_memory;
            cfg.gd_step = gd_step;
            cfg.restarts = restarts;
            FitReport rep;
            {
                py::gil_scoped_release release;
                rep = fit(s, r, cfg, threshold);
            }
            py::list trace;
            for (const TraceEntry& t : rep.optimization.trace) {
                trace.append(py::make_tuple(t.iteration, t.objective, t.gradient_norm));
            }
            py::dict out;
            out["weights"] = to_numpy(rep.manifest.weights, {py::ssize_t(rep.manifest.weights.size())});
            out["method"] = std::string(to_string(rep.manifest.method));
            out["iterations"] = rep.manifest.iterations;
            out["initial_objective"] = rep.manifest.initial_objective;
            out["final_objective"] = rep.manifest.final_objective;
            out["stop_reason"] = std::string(to_string(rep.optimization.reason));
            out["stalled"] = rep.stalled;
            out["best_start"] = rep.best_start;
            out["trace"] = trace;
            return out;
        },
        py::arg("images"), py::arg("b"), py::arg("method") = "lbfgs", py::arg("threshold") = 0.0,
        py::arg("max_iterations") = 500, py::arg("gradient_tolerance") = 1e-8, py::arg("objective_tolerance") = 1e-10,
        py::arg("lbfgs_memory") = 10, py::arg("gd_step") = 0.0, py::arg("restarts") = 0);

    m.def(
        "apply",
        [](const carray<cplx>& images, const carray<cplx>& weights) {
            return esc_pixels(apply_image_domain(stack_from(images), weights_from(weights)));
        },
        py::arg("images"), py::arg("weights"), "Combine coil images with the weights: A x as (slices, rows, cols).");

    m.def(
        "apply_kspace",
        [](const carray<cplxf>& kspace, const carray<cplx>& weights, std::size_t rows, std::size_t cols) {
            const EscVolume e = apply_kspace_domain(kspace_from(kspace), weights_from(weights), rows, cols);
            py::array_t<cplx> k = to_numpy(e.kspace, {py::ssize_t(e.slices), py::ssize_t(e.kspace_rows),
                                                      py::ssize_t(e.kspace_cols)});
            return py::make_tuple(esc_pixels(e), k);
        },
        py::arg("kspace"), py::arg("weights"), py::arg("rows"), py::arg("cols"),
        "Combine in k-space; returns (cropped ESC image, ESC k-space).");

    m.def(
        "eigencoil",
        [](const carray<cplx>& images) {
            const Eigencoil e = eigencoil(stack_from(images));
            return py::make_tuple(esc_pixels(e.combined), to_numpy(e.mode, {py::ssize_t(e.mode.size())}),
                                  e.singular_value);
        },
        py::arg("images"));

    m.def(
        "hellinger_distance",
        [](const carray<double>& u, const carray<double>& v) {
            return hellinger_distance({u.data(), std::size_t(u.size())}, {v.data(), std::size_t(v.size())});
        },
        py::arg("u"), py::arg("v"));

    m.def(
        "ssim",
        [](const carray<double>& x, const carray<double>& y, double data_range, std::size_t window, double sigma) {
            SsimParams p;
            p.data_range = data_range;
            p.window = window;
            p.sigma = sigma;
            return ssim(grid_from(x), grid_from(y), p);
        },
        py::arg("x"), py::arg("y"), py::arg("data_range"), py::arg("window") = 11, py::arg("sigma") = 1.5);

    m.def(
        "slice_reports",
        [](const carray<cplx>& esc, const carray<double>& b, const std::string& volume_id, double flag_ssim) {
            ScreenConfig cfg;
            cfg.flag_ssim = flag_ssim;
            py::list out;
            for (const SliceReport& r : slice_reports(esc_from(esc), rss_from(b), volume_id, cfg)) {
                py::dict d;
                d["volume_id"] = r.volume_id;
                d["slice"] = r.slice_index;
                d["hellinger"] = r.hellinger;
                d["l2"] = r.l2_magnitude_error;
                d["ssim"] = r.ssim;
                d["flagged"] = r.flagged;
                out.append(d);
            }
            return out;
        },
        py::arg("esc"), py::arg("b"), py::arg("volume_id") = "", py::arg("flag_ssim") = 0.80);

    m.def(
        "phantom",
        [](std::size_t rows, std::size_t cols, std::size_t slice, std::size_t slices) {
            const RealGrid g = phantom(rows, cols, slice, slices);
            return to_numpy(g.data, {py::ssize_t(g.rows), py::ssize_t(g.cols)});
        },
        py::arg("rows"), py::arg("cols"), py::arg("slice") = 0, py::arg("slices") = 1);

    m.def(
        "synth",
        [](std::size_t coils, std::size_t rows, std::size_t cols, std::size_t slices, std::size_t pad_rows,
           std::size_t pad_cols, const std::string& profile, double phase_ramp, double noise, std::uint64_t seed) {
            SynthConfig cfg;
            cfg.coils = coils;
            cfg.rows = rows;
            cfg.cols = cols;
            cfg.slices = slices;
            cfg.pad_rows = pad_rows ? pad_rows : rows;
            cfg.pad_cols = pad_cols ? pad_cols : cols;
            cfg.profile = parse_profile(profile);
            cfg.phase_ramp_strength = phase_ramp;
            cfg.noise_sigma = noise;
            cfg.seed = seed;
            const SynthResult r = synth_volume(cfg);
            return py::make_tuple(kspace_array(r.volume),
                                  to_numpy(r.truth.values, {py::ssize_t(r.truth.slices), py::ssize_t(r.truth.rows),
                                                            py::ssize_t(r.truth.cols)}));
        },
        py::arg("coils") = 8, py::arg("rows") = 64, py::arg("cols") = 64, py::arg("slices") = 1,
        py::arg("pad_rows") = 0, py::arg("pad_cols") = 0, py::arg("profile") = "gaussian-ring",
        py::arg("phase_ramp") = 1.0, py::arg("noise") = 0.0, py::arg("seed") = 42,
        "Synthetic multi-coil k-space and the phantom it was built from.");
}
