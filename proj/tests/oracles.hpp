// Test-only oracles, independent of the library implementation paths they
// check: a two-sided Jacobi eigensolver (vs the one-sided SVD), a nested-loop
// convolution, and a central-difference gradient checker.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "rnla/linalg.hpp"
#include "rnla/matrix.hpp"
#include "rnla/nn/layers.hpp"

namespace oracles {

using rnla::Matrix;

// Classical cyclic two-sided Jacobi on a symmetric matrix; eigenvalues sorted
// descending.
inline std::vector<double> jacobi_eigenvalues(Matrix a, int max_sweeps = 50) {
    const std::size_t n = a.rows();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(off) < 1e-14 * (1.0 + rnla::linalg::frobenius_norm(a))) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

// Direct convolution, nothing shared with the im2col path.
inline rnla::nn::ImageBatch direct_conv2d(const rnla::nn::DenseConv2d& conv,
                                          const rnla::nn::ImageBatch& x) {
    const auto& s = conv.shape;
    const std::size_t oh = s.out_h(x.height), ow = s.out_w(x.width);
    rnla::nn::ImageBatch y;
    y.batch = x.batch;
    y.channels = s.c_out;
    y.height = oh;
    y.width = ow;
    y.data.assign(x.batch * s.c_out * oh * ow, 0.0);
    for (std::size_t b = 0; b < x.batch; ++b) {
        const double* img = x.image(b);
        double* out = y.image(b);
        for (std::size_t co = 0; co < s.c_out; ++co) {
            for (std::size_t oy = 0; oy < oh; ++oy) {
                for (std::size_t ox = 0; ox < ow; ++ox) {
                    double acc = conv.inner.b[co];
                    for (std::size_t ci = 0; ci < s.c_in; ++ci) {
                        for (std::size_t kr = 0; kr < s.kernel_h; ++kr) {
                            for (std::size_t kc = 0; kc < s.kernel_w; ++kc) {
                                const long long iy =
                                    static_cast<long long>(oy * s.stride + kr) -
                                    static_cast<long long>(s.padding);
                                const long long ix =
                                    static_cast<long long>(ox * s.stride + kc) -
                                    static_cast<long long>(s.padding);
                                if (iy < 0 || iy >= static_cast<long long>(x.height) || ix < 0 ||
                                    ix >= static_cast<long long>(x.width))
                                    continue;
                                const double w = conv.inner.w(
                                    co, (ci * s.kernel_h + kr) * s.kernel_w + kc);
                                acc += w * img[(ci * x.height + static_cast<std::size_t>(iy)) *
                                                   x.width +
                                               static_cast<std::size_t>(ix)];
                            }
                        }
                    }
                    out[(co * oh + oy) * ow + ox] = acc;
                }
            }
        }
    }
    return y;
}

// Central-difference gradient checking of scalar losses. Parameters are
// addressed through mutable-double accessors so one checker covers every
// layer type.
struct GradCheck {
    double h = 1e-5;
    double rel_tol = 1e-4;
    double scale = 0.0; // max |analytic| across checked entries, set by runs

    // loss() re-evaluates the scalar loss with the current parameter values.
    // Returns the worst relative error seen.
    double check_entries(std::vector<double*> entries, const std::vector<double>& analytic,
                         const std::function<double()>& loss) {
        for (double g : analytic) scale = std::max(scale, std::abs(g));
        double worst = 0.0;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const double saved = *entries[i];
            *entries[i] = saved + h;
            const double above = loss();
            *entries[i] = saved - h;
            const double below = loss();
            *entries[i] = saved;
            const double numeric = (above - below) / (2.0 * h);
            const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-12});
            const double abs_err = std::abs(analytic[i] - numeric);
            // Tiny gradients drown in truncation noise; judge those absolutely.
            const double rel = abs_err <= 1e-8 * std::max(scale, 1.0) ? 0.0 : abs_err / denom;
            worst = std::max(worst, rel);
        }
        return worst;
    }
};

inline double rel_fro_err(const Matrix& approx, const Matrix& exact) {
    const double ref = rnla::linalg::frobenius_norm(exact);
    return rnla::linalg::frobenius_norm(rnla::linalg::sub(approx, exact)) / (ref > 0 ? ref : 1.0);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    return worst;
}

} // namespace oracles
