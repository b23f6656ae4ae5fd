// Test-only helpers: seeded generators and independent oracles. Nothing here
// calls into the code paths it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "escoil/volume.hpp"

namespace escoil::testing {

inline cplx random_complex(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

inline ComplexGrid random_grid(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    ComplexGrid g(rows, cols);
    for (cplx& v : g.data) {
        v = random_complex(rng);
    }
    return g;
}

inline KSpaceVolume random_volume(std::mt19937_64& rng, std::size_t l, std::size_t k, std::size_t h,
                                  std::size_t w) {
    KSpaceVolume v(l, k, h, w);
    std::normal_distribution<float> n(0.0f, 1.0f);
    for (cplxf& s : v.samples) {
        const float re = n(rng);
        const float im = n(rng);
        s = {re, im};
    }
    return v;
}

inline CoilImageStack random_stack(std::mt19937_64& rng, std::size_t l, std::size_t k, std::size_t m,
                                   std::size_t n) {
    CoilImageStack s(l, k, m, n);
    for (cplx& v : s.pixels) {
        v = random_complex(rng);
    }
    return s;
}

// Dense (l*m*n) x k matrix, element by element through the documented index formula.
inline Eigen::MatrixXcd dense_matrix(const CoilImageStack& s) {
    const std::size_t per = s.rows * s.cols;
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(s.slices * per), static_cast<Eigen::Index>(s.coils));
    for (std::size_t sl = 0; sl < s.slices; ++sl) {
        for (std::size_t r = 0; r < s.rows; ++r) {
            for (std::size_t c = 0; c < s.cols; ++c) {
                for (std::size_t j = 0; j < s.coils; ++j) {
                    a(static_cast<Eigen::Index>((sl * s.rows + r) * s.cols + c), static_cast<Eigen::Index>(j)) =
                        s.at(sl, j, r, c);
                }
            }
        }
    }
    return a;
}

inline RssVolume rss_direct(const CoilImageStack& s) {
    RssVolume out(s.slices, s.rows, s.cols);
    for (std::size_t sl = 0; sl < s.slices; ++sl) {
        for (std::size_t r = 0; r < s.rows; ++r) {
            for (std::size_t c = 0; c < s.cols; ++c) {
                double sum = 0.0;
                for (std::size_t j = 0; j < s.coils; ++j) {
                    sum += std::norm(s.at(sl, j, r, c));
                }
                out.at(sl, r, c) = std::sqrt(sum);
            }
        }
    }
    return out;
}

// Centered unitary DFT by direct summation. Index i of an N-point axis holds
// frequency (or position) i - N/2 (integer division), for either parity.
inline ComplexGrid direct_dft_centered(const ComplexGrid& in, bool inverse) {
    const double sign = inverse ? 1.0 : -1.0;
    const auto h = static_cast<long>(in.rows);
    const auto w = static_cast<long>(in.cols);
    ComplexGrid out(in.rows, in.cols);
    for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
            cplx acc = 0.0;
            for (long ky = 0; ky < h; ++ky) {
                for (long kx = 0; kx < w; ++kx) {
                    const double phase = 2.0 * std::numbers::pi *
                                         (static_cast<double>((ky - h / 2) * (y - h / 2)) / static_cast<double>(h) +
                                          static_cast<double>((kx - w / 2) * (x - w / 2)) / static_cast<double>(w));
                    acc += in(static_cast<std::size_t>(ky), static_cast<std::size_t>(kx)) *
                           std::polar(1.0, sign * phase);
                }
            }
            out(static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = acc / std::sqrt(static_cast<double>(h * w));
        }
    }
    return out;
}

inline double grid_norm(const ComplexGrid& g) {
    double s = 0.0;
    for (const cplx& v : g.data) {
        s += std::norm(v);
    }
    return std::sqrt(s);
}

inline double max_abs_diff(const ComplexGrid& a, const ComplexGrid& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a.data[i] - b.data[i]));
    }
    return d;
}

// Scalar-loop evaluation of sum over masked rows of (sqrt(sqrt(|z|^2+eps)) - sqrt(b))^2.
inline double naive_objective(const CoilImageStack& s, const std::vector<double>& b,
                              const std::vector<std::uint8_t>& mask, double eps, const std::vector<cplx>& x) {
    const Eigen::MatrixXcd a = dense_matrix(s);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        if (!mask.empty() && mask[static_cast<std::size_t>(i)] == 0) {
            continue;
        }
        cplx z = 0.0;
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            z += a(i, j) * x[static_cast<std::size_t>(j)];
        }
        const double r = std::sqrt(std::norm(z) + eps);
        const double d = std::sqrt(r) - std::sqrt(b[static_cast<std::size_t>(i)]);
        sum += d * d;
    }
    return sum;
}

// Central differences on a real parameter vector.
inline Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                                  const Eigen::VectorXd& x, double rel_step = 1e-6) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = rel_step * std::max(1.0, std::abs(x(i)));
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp(i) += h;
        xm(i) -= h;
        g(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

// Least squares through Householder QR of the dense matrix.
inline Eigen::VectorXcd qr_least_squares(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b) {
    return a.householderQr().solve(b);
}

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value;
};

// Plain Nelder-Mead with restarts around the incumbent until the simplex collapses.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
                                    double initial_size, int max_evals = 20000, double ftol = 1e-15) {
    const Eigen::Index n = x0.size();
    NelderMeadResult best{x0, f(x0)};
    int evals = 1;
    double size = initial_size;
    for (int restart = 0; restart < 6 && evals < max_evals; ++restart) {
        std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), best.x);
        std::vector<double> vals(static_cast<std::size_t>(n + 1), best.value);
        for (Eigen::Index i = 0; i < n; ++i) {
            pts[static_cast<std::size_t>(i + 1)](i) += size;
            vals[static_cast<std::size_t>(i + 1)] = f(pts[static_cast<std::size_t>(i + 1)]);
            ++evals;
        }
        while (evals < max_evals) {
            std::vector<std::size_t> order(pts.size());
            for (std::size_t i = 0; i < order.size(); ++i) {
                order[i] = i;
            }
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
            std::vector<Eigen::VectorXd> p2;
            std::vector<double> v2;
            for (std::size_t i : order) {
                p2.push_back(pts[i]);
                v2.push_back(vals[i]);
            }
            pts = p2;
            vals = v2;
            const double spread = vals.back() - vals.front();
            double extent = 0.0;
            for (const auto& p : pts) {
                extent = std::max(extent, (p - pts.front()).cwiseAbs().maxCoeff());
            }
            if (spread <= ftol * std::max(std::abs(vals.front()), 1e-300) && extent < 1e-10) {
                break;
            }
            if (extent < 1e-14) {
                break;
            }
            Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
                centroid += pts[i];
            }
            centroid /= static_cast<double>(n);
            const Eigen::VectorXd& worst = pts.back();
            const Eigen::VectorXd xr = centroid + (centroid - worst);
            const double fr = f(xr);
            ++evals;
            if (fr < vals.front()) {
                const Eigen::VectorXd xe = centroid + 2.0 * (centroid - worst);
                const double fe = f(xe);
                ++evals;
                if (fe < fr) {
                    pts.back() = xe;
                    vals.back() = fe;
                } else {
                    pts.back() = xr;
                    vals.back() = fr;
                }
            } else if (fr < vals[vals.size() - 2]) {
                pts.back() = xr;
                vals.back() = fr;
            } else {
                const bool outside = fr < vals.back();
                const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                                   : Eigen::VectorXd(centroid + 0.5 * (worst - centroid));
                const double fc = f(xc);
                ++evals;
                if (fc < std::min(fr, vals.back())) {
                    pts.back() = xc;
                    vals.back() = fc;
                } else {
                    for (std::size_t i = 1; i < pts.size(); ++i) {
                        pts[i] = pts.front() + 0.5 * (pts[i] - pts.front());
                        vals[i] = f(pts[i]);
                        ++evals;
                    }
                }
            }
        }
        const auto it = std::min_element(vals.begin(), vals.end());
        const std::size_t bi = static_cast<std::size_t>(it - vals.begin());
        const bool improved = vals[bi] < best.value * (1.0 - 1e-14);
        if (vals[bi] < best.value) {
            best = {pts[bi], vals[bi]};
        }
        if (!improved && restart > 0) {
            break;
        }
        size = std::max(1e-3 * best.x.norm(), 1e-6);
    }
    return best;
}

// Best of `starts` Nelder-Mead runs from seeded random points around `center`.
inline NelderMeadResult multistart_minimum(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& center, double radius, int starts,
                                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    NelderMeadResult best{center, f(center)};
    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd x0(center.size());
        for (Eigen::Index i = 0; i < x0.size(); ++i) {
            x0(i) = center(i) + radius * n(rng);
        }
        const NelderMeadResult r = nelder_mead(f, x0, 0.25 * radius);
        if (r.value < best.value) {
            best = r;
        }
    }
    return best;
}

// Inputs of the export-images golden files (see golden/make_panels.py).
struct PanelFixture {
    RssVolume rss;
    EscVolume esc;
    EscVolume eig;
};

inline PanelFixture panel_fixture() {
    PanelFixture f{RssVolume(2, 2, 3), EscVolume(2, 2, 3), EscVolume(2, 2, 3)};
    f.rss.values = {0, 1, 2, 3, 4, 5, 5, 4, 3, 2, 1, 0};
    f.esc.pixels = {0.0, {0.0, 1.0}, -2.5, 3.0, {4.0, -1.0}, {0.0, 5.0},
                    {2.0, -2.0}, {-0.0, -1.5}, 0.0, {-1.0, 1.0}, 0.5, {0.0, 3.0}};
    for (std::size_t i = 0; i < 12; ++i) {
        f.eig.pixels[i] = 0.9 * f.rss.values[i] * std::polar(1.0, 0.3);
    }
    return f;
}

} // namespace escoil::testing
