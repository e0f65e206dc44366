#include "rnla/nn/attention.hpp"

#include <cmath>
#include <limits>

#include "rnla/linalg.hpp"
#include "rnla/rng.hpp"
#include "rnla/sketch.hpp"

namespace rnla::nn {

using linalg::matmul;
using linalg::transpose;

std::string kernel_name(AttentionKernel k) {
    return k == AttentionKernel::SoftmaxPositive ? "softmax" : "relu";
}

AttentionKernel kernel_from_name(const std::string& name) {
    if (name == "softmax") return AttentionKernel::SoftmaxPositive;
    if (name == "relu") return AttentionKernel::Relu;
    throw parameter_error("unknown attention kernel: " + name);
}

MhaParams mha_params_init(std::size_t d_model, std::size_t num_heads, std::uint64_t seed) {
    if (num_heads == 0 || d_model % num_heads != 0)
        throw parameter_error("mha_params_init: d_model must be divisible by num_heads");
    MhaParams p;
    p.d_model = d_model;
    p.num_heads = num_heads;
    const double std_dev = 1.0 / std::sqrt(static_cast<double>(d_model));
    auto init = [&](std::uint64_t idx) {
        Matrix w(d_model, d_model);
        GaussianStream g(derive_seed(seed, idx));
        for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = g.next() * std_dev;
        return w;
    };
    p.w_q = init(0);
    p.w_k = init(1);
    p.w_v = init(2);
    p.w_o = init(3);
    return p;
}

namespace {

Matrix col_slice(const Matrix& m, std::size_t begin, std::size_t width) {
    Matrix out(m.rows(), width);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < width; ++j) out(i, j) = m(i, begin + j);
    return out;
}

void col_slice_add(Matrix& dst, const Matrix& part, std::size_t begin) {
    for (std::size_t i = 0; i < part.rows(); ++i)
        for (std::size_t j = 0; j < part.cols(); ++j) dst(i, begin + j) += part(i, j);
}

std::vector<double> row_norms2(const Matrix& m) {
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) out[i] += row[j] * row[j];
    }
    return out;
}

Matrix softmax_features(const Matrix& proj, const std::vector<double>& norms2, double shift) {
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(proj.cols()));
    Matrix phi(proj.rows(), proj.cols());
    for (std::size_t n = 0; n < proj.rows(); ++n) {
        const double offset = 0.5 * norms2[n] + shift;
        for (std::size_t j = 0; j < proj.cols(); ++j)
            phi(n, j) = inv_sqrt_m * std::exp(proj(n, j) - offset);
    }
    return phi;
}

Matrix relu_features(const Matrix& proj) {
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(proj.cols()));
    Matrix phi(proj.rows(), proj.cols());
    for (std::size_t i = 0; i < proj.size(); ++i)
        phi.data()[i] = proj.data()[i] > 0.0 ? proj.data()[i] * inv_sqrt_m : 0.0;
    return phi;
}

} // namespace

Matrix feature_map(const Matrix& x, const Matrix& rf, AttentionKernel kernel, double shift) {
    if (x.cols() != rf.cols()) throw shape_error("feature_map: head dimension mismatch");
    const Matrix proj = matmul(x, transpose(rf)); // N x m
    if (kernel == AttentionKernel::SoftmaxPositive)
        return softmax_features(proj, row_norms2(x), shift);
    return relu_features(proj);
}

// --- exact attention ---

namespace {

struct ExactHeadWork {
    Matrix q, k, v; // N x d_h
    Matrix soft;    // N x N attention weights
};

void check_mha_input(const MhaParams& p, const Matrix& x) {
    if (x.cols() != p.d_model) throw shape_error("mha: input cols != d_model");
    if (x.rows() == 0) throw shape_error("mha: empty sequence");
}

Matrix exact_forward_impl(const MhaParams& p, const Matrix& x, std::vector<ExactHeadWork>* work) {
    check_mha_input(p, x);
    const std::size_t n = x.rows(), dh = p.head_dim();
    const Matrix q = matmul(x, p.w_q), k = matmul(x, p.w_k), v = matmul(x, p.w_v);
    const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

    Matrix concat(n, p.d_model);
    for (std::size_t h = 0; h < p.num_heads; ++h) {
        const std::size_t c0 = h * dh;
        Matrix qh = col_slice(q, c0, dh), kh = col_slice(k, c0, dh), vh = col_slice(v, c0, dh);
        Matrix logits = linalg::scale(matmul(qh, transpose(kh)), inv_sqrt_dh);
        for (std::size_t i = 0; i < n; ++i) {
            double mx = logits(i, 0);
            for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, logits(i, j));
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                logits(i, j) = std::exp(logits(i, j) - mx);
                sum += logits(i, j);
            }
            for (std::size_t j = 0; j < n; ++j) logits(i, j) /= sum;
        }
        Matrix oh = matmul(logits, vh);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < dh; ++j) concat(i, c0 + j) = oh(i, j);
        if (work)
            work->push_back({std::move(qh), std::move(kh), std::move(vh), std::move(logits)});
    }
    return work ? concat : matmul(concat, p.w_o);
}

} // namespace

Matrix exact_mha_forward(const MhaParams& p, const Matrix& x) {
    return exact_forward_impl(p, x, nullptr);
}

MhaGrads exact_mha_backward(const MhaParams& p, const Matrix& x, const Matrix& grad_out) {
    check_mha_input(p, x);
    if (grad_out.rows() != x.rows() || grad_out.cols() != p.d_model)
        throw shape_error("exact_mha_backward: grad shape mismatch");
    const std::size_t n = x.rows(), dh = p.head_dim();
    const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

    std::vector<ExactHeadWork> work;
    work.reserve(p.num_heads);
    const Matrix concat = exact_forward_impl(p, x, &work);

    MhaGrads g;
    g.grad_wo = matmul(transpose(concat), grad_out);
    const Matrix g_concat = matmul(grad_out, transpose(p.w_o));

    Matrix gq(n, p.d_model), gk(n, p.d_model), gv(n, p.d_model);
    for (std::size_t h = 0; h < p.num_heads; ++h) {
        const std::size_t c0 = h * dh;
        const ExactHeadWork& hw = work[h];
        const Matrix gh = col_slice(g_concat, c0, dh);
        Matrix g_soft = matmul(gh, transpose(hw.v)); // N x N
        // softmax rows: ds = s .* (g - <g, s>)
        Matrix g_logits(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            double gs = 0.0;
            for (std::size_t j = 0; j < n; ++j) gs += g_soft(i, j) * hw.soft(i, j);
            for (std::size_t j = 0; j < n; ++j)
                g_logits(i, j) = hw.soft(i, j) * (g_soft(i, j) - gs);
        }
        col_slice_add(gq, linalg::scale(matmul(g_logits, hw.k), inv_sqrt_dh), c0);
        col_slice_add(gk, linalg::scale(matmul(transpose(g_logits), hw.q), inv_sqrt_dh), c0);
        col_slice_add(gv, matmul(transpose(hw.soft), gh), c0);
    }

    const Matrix xt = transpose(x);
    g.grad_wq = matmul(xt, gq);
    g.grad_wk = matmul(xt, gk);
    g.grad_wv = matmul(xt, gv);
    g.grad_x = matmul(gq, transpose(p.w_q));
    const Matrix gxk = matmul(gk, transpose(p.w_k)), gxv = matmul(gv, transpose(p.w_v));
    for (std::size_t i = 0; i < g.grad_x.size(); ++i)
        g.grad_x.data()[i] += gxk.data()[i] + gxv.data()[i];
    return g;
}

// --- random-feature attention ---

RandMha::RandMha(MhaParams params, std::size_t num_features, AttentionKernel kernel,
                 std::uint64_t rf_seed, double epsilon)
    : params_(std::move(params)),
      num_features_(num_features),
      kernel_(kernel),
      rf_seed_(rf_seed),
      epsilon_(epsilon) {
    if (num_features_ == 0) throw parameter_error("RandMha: num_features must be >= 1");
    const std::size_t dh = params_.head_dim();
    rf_.reserve(params_.num_heads);
    for (std::size_t h = 0; h < params_.num_heads; ++h)
        rf_.push_back(sketch::gaussian_matrix(num_features_, dh, derive_seed(rf_seed_, h)));
}

namespace {

struct RandHeadWork {
    Matrix qs, ks;              // N x d_h, scaled
    Matrix pq, pk;              // N x m projections
    Matrix phiq, phik;          // N x m
    Matrix v;                   // N x d_h
    Matrix z;                   // m x d_h
    Matrix num;                 // N x d_h
    std::vector<double> svec;   // m, column sums of phik
    std::vector<double> den;    // N, effective divisor
    std::vector<double> den_raw; // N
    double den_floor = 0.0;     // epsilon * max row denominator
    std::vector<char> fallback; // N
};

// Shared forward path; when works != nullptr the per-head intermediates are
// captured for the backward pass.
Matrix rand_mha_forward_impl(const RandMha& layer, const Matrix& x,
                             std::vector<RandHeadWork>* works, Matrix* concat_out) {
    const MhaParams& p = layer.params();
    const std::size_t n = x.rows(), dh = p.head_dim(), m = layer.num_features();
    const Matrix q = matmul(x, p.w_q), k = matmul(x, p.w_k), v = matmul(x, p.w_v);
    const bool softmax = layer.kernel() == AttentionKernel::SoftmaxPositive;
    const double alpha = softmax ? std::pow(static_cast<double>(dh), -0.25) : 1.0;

    Matrix concat(n, p.d_model);
    for (std::size_t h = 0; h < p.num_heads; ++h) {
        const std::size_t c0 = h * dh;
        RandHeadWork w;
        w.qs = linalg::scale(col_slice(q, c0, dh), alpha);
        w.ks = linalg::scale(col_slice(k, c0, dh), alpha);
        w.v = col_slice(v, c0, dh);
        const Matrix rft = transpose(layer.head_features(h));
        w.pq = matmul(w.qs, rft);
        w.pk = matmul(w.ks, rft);
        if (softmax) {
            // One shared stabilizer per sequence, the max of the full
            // exponent; identical in both maps, so the ratio is unchanged.
            const std::vector<double> rq = row_norms2(w.qs), rk = row_norms2(w.ks);
            double shift = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    shift = std::max(shift, w.pq(i, j) - 0.5 * rq[i]);
                    shift = std::max(shift, w.pk(i, j) - 0.5 * rk[i]);
                }
            w.phiq = softmax_features(w.pq, rq, shift);
            w.phik = softmax_features(w.pk, rk, shift);
        } else {
            w.phiq = relu_features(w.pq);
            w.phik = relu_features(w.pk);
        }

        w.z = matmul(transpose(w.phik), w.v); // m x d_h
        w.num = matmul(w.phiq, w.z);          // N x d_h
        w.svec.assign(m, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) w.svec[j] += w.phik(i, j);
        w.den.assign(n, 0.0);
        w.den_raw.assign(n, 0.0);
        w.fallback.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            double d = 0.0;
            for (std::size_t j = 0; j < m; ++j) d += w.phiq(i, j) * w.svec[j];
            w.den_raw[i] = d;
            // A row with no surviving feature mass (Relu with all projections
            // negative, or complete underflow) falls back to the uniform
            // average of V.
            w.fallback[i] = d == 0.0 ? 1 : 0;
        }
        // The stabilizer makes the absolute denominator scale arbitrary, so
        // the epsilon guard floors each row relative to the largest one.
        double max_den = 0.0;
        for (std::size_t i = 0; i < n; ++i) max_den = std::max(max_den, w.den_raw[i]);
        w.den_floor = layer.epsilon() * max_den;
        for (std::size_t i = 0; i < n; ++i) w.den[i] = std::max(w.den_raw[i], w.den_floor);

        for (std::size_t i = 0; i < n; ++i) {
            if (w.fallback[i]) {
                for (std::size_t j = 0; j < dh; ++j) {
                    double mean = 0.0;
                    for (std::size_t r = 0; r < n; ++r) mean += w.v(r, j);
                    concat(i, c0 + j) = mean / static_cast<double>(n);
                }
            } else {
                for (std::size_t j = 0; j < dh; ++j) concat(i, c0 + j) = w.num(i, j) / w.den[i];
            }
        }
        if (works) works->push_back(std::move(w));
    }
    if (concat_out) *concat_out = concat;
    return matmul(concat, p.w_o);
}

} // namespace

Matrix RandMha::forward(const Matrix& x) const {
    check_mha_input(params_, x);
    return rand_mha_forward_impl(*this, x, nullptr, nullptr);
}

MhaGrads RandMha::backward(const Matrix& x, const Matrix& grad_out) const {
    check_mha_input(params_, x);
    if (grad_out.rows() != x.rows() || grad_out.cols() != params_.d_model)
        throw shape_error("RandMha::backward: grad shape mismatch");
    const std::size_t n = x.rows(), dh = params_.head_dim(), m = num_features_;
    const bool softmax = kernel_ == AttentionKernel::SoftmaxPositive;
    const double alpha = softmax ? std::pow(static_cast<double>(dh), -0.25) : 1.0;
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));

    std::vector<RandHeadWork> works;
    works.reserve(params_.num_heads);
    Matrix concat;
    rand_mha_forward_impl(*this, x, &works, &concat);

    MhaGrads g;
    g.grad_wo = matmul(transpose(concat), grad_out);
    const Matrix g_concat = matmul(grad_out, transpose(params_.w_o));

    Matrix gq(n, params_.d_model), gk(n, params_.d_model), gv(n, params_.d_model);
    for (std::size_t h = 0; h < params_.num_heads; ++h) {
        const std::size_t c0 = h * dh;
        const RandHeadWork& w = works[h];
        const Matrix gh = col_slice(g_concat, c0, dh); // N x d_h

        Matrix g_num(n, dh);
        std::vector<double> g_den(n, 0.0);
        Matrix g_vt(n, dh);
        for (std::size_t i = 0; i < n; ++i) {
            if (w.fallback[i]) {
                // Uniform-average fallback: gradient spreads evenly over V rows.
                for (std::size_t j = 0; j < dh; ++j) {
                    const double spread = gh(i, j) / static_cast<double>(n);
                    for (std::size_t r = 0; r < n; ++r) g_vt(r, j) += spread;
                }
                continue;
            }
            double dot_gn = 0.0;
            for (std::size_t j = 0; j < dh; ++j) {
                g_num(i, j) = gh(i, j) / w.den[i];
                dot_gn += gh(i, j) * w.num(i, j);
            }
            // No gradient flows into the denominator while the epsilon floor
            // is active (the floor itself is treated as a constant).
            g_den[i] = w.den_raw[i] > w.den_floor ? -dot_gn / (w.den[i] * w.den[i]) : 0.0;
        }

        // phi_q receives grads from the numerator product and the denominator.
        Matrix g_phiq = matmul(g_num, transpose(w.z)); // N x m
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) g_phiq(i, j) += g_den[i] * w.svec[j];

        const Matrix g_z = matmul(transpose(w.phiq), g_num); // m x d_h
        std::vector<double> g_svec(m, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) g_svec[j] += w.phiq(i, j) * g_den[i];

        Matrix g_phik = matmul(w.v, transpose(g_z)); // N x m
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) g_phik(i, j) += g_svec[j];

        {
            const Matrix acc = matmul(w.phik, g_z); // N x d_h
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < dh; ++j) g_vt(i, j) += acc(i, j);
        }

        // Feature-map backward to the scaled head inputs.
        Matrix g_qs(n, dh), g_ks(n, dh);
        const Matrix& rf = rf_[h];
        auto back_features = [&](const Matrix& g_phi, const Matrix& phi, const Matrix& proj,
                                 const Matrix& scaled, Matrix& out) {
            Matrix g_proj(n, m);
            std::vector<double> g_norm(n, 0.0);
            if (softmax) {
                for (std::size_t i = 0; i < n; ++i) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < m; ++j) {
                        const double gp = g_phi(i, j) * phi(i, j);
                        g_proj(i, j) = gp;
                        acc += gp;
                    }
                    g_norm[i] = -0.5 * acc;
                }
            } else {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < m; ++j)
                        g_proj(i, j) = proj(i, j) > 0.0 ? g_phi(i, j) * inv_sqrt_m : 0.0;
            }
            out = matmul(g_proj, rf); // N x d_h
            if (softmax)
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < dh; ++j) out(i, j) += 2.0 * g_norm[i] * scaled(i, j);
        };
        back_features(g_phiq, w.phiq, w.pq, w.qs, g_qs);
        back_features(g_phik, w.phik, w.pk, w.ks, g_ks);

        col_slice_add(gq, linalg::scale(g_qs, alpha), c0);
        col_slice_add(gk, linalg::scale(g_ks, alpha), c0);
        col_slice_add(gv, g_vt, c0);
    }

    const Matrix xt = transpose(x);
    g.grad_wq = matmul(xt, gq);
    g.grad_wk = matmul(xt, gk);
    g.grad_wv = matmul(xt, gv);
    g.grad_x = matmul(gq, transpose(params_.w_q));
    const Matrix gxk = matmul(gk, transpose(params_.w_k)), gxv = matmul(gv, transpose(params_.w_v));
    for (std::size_t i = 0; i < g.grad_x.size(); ++i)
        g.grad_x.data()[i] += gxk.data()[i] + gxv.data()[i];
    return g;
}

std::uint64_t exact_mha_memory_estimate(std::size_t d_model, std::size_t num_heads,
                                        std::size_t n) {
    const std::uint64_t d = d_model, h = num_heads, nn = n;
    const std::uint64_t params = 4 * d * d;
    const std::uint64_t workspace = 4 * nn * d + h * nn * nn; // Q,K,V,O plus per-head scores
    return (params + workspace) * 8;
}

std::uint64_t rand_mha_memory_estimate(std::size_t d_model, std::size_t num_heads,
                                       std::size_t num_features, std::size_t n) {
    const std::uint64_t d = d_model, h = num_heads, m = num_features, nn = n;
    const std::uint64_t dh = d / h;
    const std::uint64_t params = 4 * d * d + h * m * dh;
    const std::uint64_t workspace = 4 * nn * d + 2 * nn * m + m * dh + nn * dh + nn;
    return (params + workspace) * 8;
}

} // namespace rnla::nn
