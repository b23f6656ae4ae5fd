#include "escoil/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "escoil/error.hpp"

namespace escoil {

double hellinger_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw DimensionError("hellinger_distance: fields differ in size");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] >= 0.0) || !(v[i] >= 0.0)) {
            throw DomainError("hellinger_distance: negative or NaN entry at " + std::to_string(i));
        }
        const double d = std::sqrt(u[i]) - std::sqrt(v[i]);
        sum += d * d;
    }
    return std::sqrt(sum);
}

std::vector<double> magnitude(std::span<const cplx> z) {
    std::vector<double> out(z.size());
    std::transform(z.begin(), z.end(), out.begin(), [](const cplx& v) { return std::abs(v); });
    return out;
}

namespace {

std::vector<double> gaussian_taps(std::size_t window, double sigma) {
    std::vector<double> taps(window);
    const double center = static_cast<double>(window - 1) / 2.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < window; ++i) {
        const double d = static_cast<double>(i) - center;
        taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += taps[i];
    }
    for (double& t : taps) {
        t /= sum;
    }
    return taps;
}

// Separable "valid" filtering of f(x, y) evaluated pointwise.
template <typename F>
RealGrid filter_valid(const RealGrid& x, const RealGrid& y, const std::vector<double>& taps, F f) {
    const std::size_t w = taps.size();
    const std::size_t out_rows = x.rows - w + 1;
    const std::size_t out_cols = x.cols - w + 1;
    RealGrid horizontal(x.rows, out_cols);
    for (std::size_t r = 0; r < x.rows; ++r) {
        for (std::size_t c = 0; c < out_cols; ++c) {
            double acc = 0.0;
            for (std::size_t t = 0; t < w; ++t) {
                acc += taps[t] * f(x(r, c + t), y(r, c + t));
            }
            horizontal(r, c) = acc;
        }
    }
    RealGrid out(out_rows, out_cols);
    for (std::size_t r = 0; r < out_rows; ++r) {
        for (std::size_t c = 0; c < out_cols; ++c) {
            double acc = 0.0;
            for (std::size_t t = 0; t < w; ++t) {
                acc += taps[t] * horizontal(r + t, c);
            }
            out(r, c) = acc;
        }
    }
    return out;
}

} // namespace

RealGrid ssim_map(const RealGrid& x, const RealGrid& y, const SsimParams& params) {
    if (x.rows != y.rows || x.cols != y.cols) {
        throw DimensionError("ssim: images differ in shape");
    }
    if (params.window == 0 || params.window % 2 == 0) {
        throw DomainError("ssim: window must be odd");
    }
    if (x.rows < params.window || x.cols < params.window) {
        throw DimensionError("ssim: image " + std::to_string(x.rows) + "x" + std::to_string(x.cols) +
                             " is smaller than the " + std::to_string(params.window) + "-pixel window");
    }
    if (!(params.data_range > 0.0) || !(params.sigma > 0.0)) {
        throw DomainError("ssim: data_range and sigma must be positive");
    }
    const auto taps = gaussian_taps(params.window, params.sigma);
    const RealGrid mx = filter_valid(x, y, taps, [](double a, double) { return a; });
    const RealGrid my = filter_valid(x, y, taps, [](double, double b) { return b; });
    const RealGrid mxx = filter_valid(x, y, taps, [](double a, double) { return a * a; });
    const RealGrid myy = filter_valid(x, y, taps, [](double, double b) { return b * b; });
    const RealGrid mxy = filter_valid(x, y, taps, [](double a, double b) { return a * b; });

    const double c1 = (params.k1 * params.data_range) * (params.k1 * params.data_range);
    const double c2 = (params.k2 * params.data_range) * (params.k2 * params.data_range);
    RealGrid out(mx.rows, mx.cols);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double ux = mx.data[i];
        const double uy = my.data[i];
        const double vx = std::max(mxx.data[i] - ux * ux, 0.0);
        const double vy = std::max(myy.data[i] - uy * uy, 0.0);
        const double cxy = mxy.data[i] - ux * uy;
        const double s = ((2.0 * ux * uy + c1) * (2.0 * cxy + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2));
        out.data[i] = std::clamp(s, -1.0, 1.0);
    }
    return out;
}

double ssim(const RealGrid& x, const RealGrid& y, const SsimParams& params) {
    const RealGrid map = ssim_map(x, y, params);
    double sum = 0.0;
    for (double v : map.data) {
        sum += v;
    }
    return sum / static_cast<double>(map.size());
}

} // namespace escoil
