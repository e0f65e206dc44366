#include "rnla/nn/layers.hpp"

#include <cmath>

#include "rnla/linalg.hpp"
#include "rnla/rng.hpp"

namespace rnla::nn {

using linalg::matmul;
using linalg::transpose;

namespace {

void add_bias_columns(Matrix& y, const std::vector<double>& b) {
    for (std::size_t i = 0; i < y.rows(); ++i) {
        double* row = y.row(i);
        const double bi = b[i];
        for (std::size_t j = 0; j < y.cols(); ++j) row[j] += bi;
    }
}

std::vector<double> row_sums(const Matrix& m) {
    std::vector<double> s(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) s[i] += row[j];
    }
    return s;
}

} // namespace

Matrix DenseLinear::forward(const Matrix& x) const {
    if (x.rows() != d_in()) throw shape_error("DenseLinear::forward: input rows != d_in");
    Matrix y = matmul(w, x);
    add_bias_columns(y, b);
    return y;
}

DenseLinear::Grads DenseLinear::backward(const Matrix& x, const Matrix& grad_out) const {
    if (x.rows() != d_in() || grad_out.rows() != d_out() || x.cols() != grad_out.cols())
        throw shape_error("DenseLinear::backward: shape mismatch");
    Grads g;
    g.grad_w = matmul(grad_out, transpose(x));
    g.grad_x = matmul(transpose(w), grad_out);
    g.grad_b = row_sums(grad_out);
    return g;
}

DenseLinear dense_linear_init(std::size_t d_in, std::size_t d_out, std::uint64_t seed) {
    DenseLinear layer;
    layer.w = Matrix(d_out, d_in);
    GaussianStream g(seed);
    const double std_dev = std::sqrt(2.0 / static_cast<double>(d_in + d_out));
    for (std::size_t i = 0; i < layer.w.size(); ++i) layer.w.data()[i] = g.next() * std_dev;
    layer.b.assign(d_out, 0.0);
    return layer;
}

Matrix SkLinear::forward(const Matrix& x) const {
    if (x.rows() != d_in) throw shape_error("SkLinear::forward: input rows != d_in");
    Matrix acc(d_out, x.cols());
    for (const SkTerm& t : terms) {
        const Matrix left = sketch::apply_right_t(t.s1, transpose(matmul(t.u1, x)));
        // left is batch x d_out = (U1 x)^T S1; accumulate its transpose.
        for (std::size_t i = 0; i < d_out; ++i)
            for (std::size_t j = 0; j < x.cols(); ++j) acc(i, j) += left(j, i);
        const Matrix right = matmul(t.u2, sketch::apply_left(t.s2, x));
        for (std::size_t i = 0; i < acc.size(); ++i) acc.data()[i] += right.data()[i];
    }
    const double inv = 1.0 / (2.0 * static_cast<double>(num_terms));
    Matrix y = linalg::scale(acc, inv);
    add_bias_columns(y, bias);
    return y;
}

SkLinear::Grads SkLinear::backward(const Matrix& x, const Matrix& grad_out) const {
    if (x.rows() != d_in || grad_out.rows() != d_out || x.cols() != grad_out.cols())
        throw shape_error("SkLinear::backward: shape mismatch");
    const double inv = 1.0 / (2.0 * static_cast<double>(num_terms));
    Grads g;
    g.grad_x = Matrix(d_in, x.cols());
    g.grad_u1.reserve(terms.size());
    g.grad_u2.reserve(terms.size());
    const Matrix xt = transpose(x);
    for (const SkTerm& t : terms) {
        const Matrix s1g = sketch::apply_left(t.s1, grad_out); // k x batch
        const Matrix s2x = sketch::apply_left(t.s2, x);        // k x batch
        g.grad_u1.push_back(linalg::scale(matmul(s1g, xt), inv));
        g.grad_u2.push_back(linalg::scale(matmul(grad_out, transpose(s2x)), inv));
        const Matrix gx1 = matmul(transpose(t.u1), s1g);
        const Matrix u2tg = matmul(transpose(t.u2), grad_out); // k x batch
        const Matrix gx2 = sketch::apply_right_t(t.s2, transpose(u2tg));
        for (std::size_t i = 0; i < d_in; ++i)
            for (std::size_t j = 0; j < x.cols(); ++j)
                g.grad_x(i, j) += inv * (gx1(i, j) + gx2(j, i));
    }
    g.grad_b = row_sums(grad_out);
    return g;
}

ParamCount SkLinear::params() const {
    ParamCount p;
    const std::uint64_t lk = static_cast<std::uint64_t>(num_terms) * low_rank;
    p.learnable = lk * (d_in + d_out) + d_out;
    p.total_stored = sk_stored_coeffs(num_terms, low_rank, d_in, d_out) + d_out;
    p.dense_equivalent = static_cast<std::uint64_t>(d_in) * d_out + d_out;
    return p;
}

namespace {

SkLinear sk_linear_shell(std::size_t d_in, std::size_t d_out, std::size_t l, std::size_t k,
                         std::uint64_t seed, sketch::SketchDist dist) {
    if (l < 1 || k < 1) throw parameter_error("SkLinear: num_terms and low_rank must be >= 1");
    SkLinear layer;
    layer.d_in = d_in;
    layer.d_out = d_out;
    layer.num_terms = l;
    layer.low_rank = k;
    layer.bias.assign(d_out, 0.0);
    layer.terms.resize(l);
    for (std::size_t i = 0; i < l; ++i) {
        layer.terms[i].s1 = sketch::make_sketch(dist, k, d_out, derive_seed(seed, 2 * i));
        layer.terms[i].s2 = sketch::make_sketch(dist, k, d_in, derive_seed(seed, 2 * i + 1));
    }
    return layer;
}

} // namespace

SkLinear sk_linear_fresh(std::size_t d_in, std::size_t d_out, std::size_t l, std::size_t k,
                         std::uint64_t seed, sketch::SketchDist dist) {
    SkLinear layer = sk_linear_shell(d_in, d_out, l, k, seed, dist);
    const double std_dev = std::sqrt(2.0 / static_cast<double>(d_in + d_out));
    for (std::size_t i = 0; i < l; ++i) {
        GaussianStream g(derive_seed(seed, 1000 + i));
        layer.terms[i].u1 = Matrix(k, d_in);
        for (std::size_t t = 0; t < layer.terms[i].u1.size(); ++t)
            layer.terms[i].u1.data()[t] = g.next() * std_dev;
        layer.terms[i].u2 = Matrix(d_out, k);
        for (std::size_t t = 0; t < layer.terms[i].u2.size(); ++t)
            layer.terms[i].u2.data()[t] = g.next() * std_dev;
    }
    return layer;
}

SkLinear sk_linear_from_dense(const Matrix& w, const std::vector<double>& b, std::size_t l,
                              std::size_t k, std::uint64_t seed, sketch::SketchDist dist) {
    const std::size_t d_out = w.rows(), d_in = w.cols();
    if (b.size() != d_out) throw shape_error("sk_linear_from_dense: bias length != d_out");
    SkLinear layer = sk_linear_shell(d_in, d_out, l, k, seed, dist);
    layer.bias = b;
    for (std::size_t i = 0; i < l; ++i) {
        layer.terms[i].u1 = matmul(layer.terms[i].s1.realized(), w);            // k x d_in
        layer.terms[i].u2 = matmul(w, transpose(layer.terms[i].s2.realized())); // d_out x k
    }
    return layer;
}

// --- convolution ---

std::size_t ConvShape::out_h(std::size_t h) const {
    const std::size_t padded = h + 2 * padding;
    if (padded < kernel_h) throw shape_error("conv: kernel taller than padded image");
    return (padded - kernel_h) / stride + 1;
}

std::size_t ConvShape::out_w(std::size_t w) const {
    const std::size_t padded = w + 2 * padding;
    if (padded < kernel_w) throw shape_error("conv: kernel wider than padded image");
    return (padded - kernel_w) / stride + 1;
}

Matrix im2col(const double* image, std::size_t c, std::size_t h, std::size_t w,
              const ConvShape& shape) {
    const std::size_t oh = shape.out_h(h), ow = shape.out_w(w);
    const std::size_t d = c * shape.kernel_h * shape.kernel_w;
    Matrix cols(d, oh * ow);
    const long long pad = static_cast<long long>(shape.padding);
    std::size_t row = 0;
    for (std::size_t ch = 0; ch < c; ++ch) {
        const double* plane = image + ch * h * w;
        for (std::size_t kr = 0; kr < shape.kernel_h; ++kr) {
            for (std::size_t kc = 0; kc < shape.kernel_w; ++kc, ++row) {
                double* out = cols.row(row);
                std::size_t p = 0;
                for (std::size_t oy = 0; oy < oh; ++oy) {
                    const long long iy = static_cast<long long>(oy * shape.stride + kr) - pad;
                    for (std::size_t ox = 0; ox < ow; ++ox, ++p) {
                        const long long ix = static_cast<long long>(ox * shape.stride + kc) - pad;
                        out[p] = (iy >= 0 && iy < static_cast<long long>(h) && ix >= 0 &&
                                  ix < static_cast<long long>(w))
                                     ? plane[iy * static_cast<long long>(w) + ix]
                                     : 0.0;
                    }
                }
            }
        }
    }
    return cols;
}

void col2im(const Matrix& cols, std::size_t c, std::size_t h, std::size_t w,
            const ConvShape& shape, double* image) {
    const std::size_t oh = shape.out_h(h), ow = shape.out_w(w);
    const long long pad = static_cast<long long>(shape.padding);
    std::size_t row = 0;
    for (std::size_t ch = 0; ch < c; ++ch) {
        double* plane = image + ch * h * w;
        for (std::size_t kr = 0; kr < shape.kernel_h; ++kr) {
            for (std::size_t kc = 0; kc < shape.kernel_w; ++kc, ++row) {
                const double* in = cols.row(row);
                std::size_t p = 0;
                for (std::size_t oy = 0; oy < oh; ++oy) {
                    const long long iy = static_cast<long long>(oy * shape.stride + kr) - pad;
                    for (std::size_t ox = 0; ox < ow; ++ox, ++p) {
                        const long long ix = static_cast<long long>(ox * shape.stride + kc) - pad;
                        if (iy >= 0 && iy < static_cast<long long>(h) && ix >= 0 &&
                            ix < static_cast<long long>(w))
                            plane[iy * static_cast<long long>(w) + ix] += in[p];
                    }
                }
            }
        }
    }
}

namespace {

template <typename Inner>
ImageBatch conv_forward(const ConvShape& shape, const Inner& inner, const ImageBatch& x) {
    if (x.channels != shape.c_in) throw shape_error("conv forward: channel count mismatch");
    const std::size_t oh = shape.out_h(x.height), ow = shape.out_w(x.width);
    ImageBatch y;
    y.batch = x.batch;
    y.channels = shape.c_out;
    y.height = oh;
    y.width = ow;
    y.data.assign(x.batch * shape.c_out * oh * ow, 0.0);
    for (std::size_t b = 0; b < x.batch; ++b) {
        const Matrix cols = im2col(x.image(b), x.channels, x.height, x.width, shape);
        const Matrix out = inner.forward(cols); // c_out x (oh*ow)
        double* dst = y.image(b);
        for (std::size_t i = 0; i < out.size(); ++i) dst[i] = out.data()[i];
    }
    return y;
}

Matrix grad_out_as_matrix(const ImageBatch& g, std::size_t b, std::size_t c_out,
                          std::size_t patches) {
    Matrix m(c_out, patches);
    const double* src = g.image(b);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = src[i];
    return m;
}

} // namespace

ImageBatch DenseConv2d::forward(const ImageBatch& x) const { return conv_forward(shape, inner, x); }

DenseConv2d::Grads DenseConv2d::backward(const ImageBatch& x, const ImageBatch& grad_out) const {
    const std::size_t oh = shape.out_h(x.height), ow = shape.out_w(x.width);
    Grads g;
    g.grad_x.batch = x.batch;
    g.grad_x.channels = x.channels;
    g.grad_x.height = x.height;
    g.grad_x.width = x.width;
    g.grad_x.data.assign(x.data.size(), 0.0);
    g.grad_w = Matrix(inner.w.rows(), inner.w.cols());
    g.grad_b.assign(inner.b.size(), 0.0);
    for (std::size_t b = 0; b < x.batch; ++b) {
        const Matrix cols = im2col(x.image(b), x.channels, x.height, x.width, shape);
        const Matrix go = grad_out_as_matrix(grad_out, b, shape.c_out, oh * ow);
        DenseLinear::Grads ig = inner.backward(cols, go);
        for (std::size_t i = 0; i < g.grad_w.size(); ++i) g.grad_w.data()[i] += ig.grad_w.data()[i];
        for (std::size_t i = 0; i < g.grad_b.size(); ++i) g.grad_b[i] += ig.grad_b[i];
        col2im(ig.grad_x, x.channels, x.height, x.width, shape, g.grad_x.image(b));
    }
    return g;
}

ImageBatch SkConv2d::forward(const ImageBatch& x) const { return conv_forward(shape, inner, x); }

SkConv2d::Grads SkConv2d::backward(const ImageBatch& x, const ImageBatch& grad_out) const {
    const std::size_t oh = shape.out_h(x.height), ow = shape.out_w(x.width);
    Grads g;
    g.grad_x.batch = x.batch;
    g.grad_x.channels = x.channels;
    g.grad_x.height = x.height;
    g.grad_x.width = x.width;
    g.grad_x.data.assign(x.data.size(), 0.0);
    g.grad_b.assign(inner.bias.size(), 0.0);
    for (std::size_t b = 0; b < x.batch; ++b) {
        const Matrix cols = im2col(x.image(b), x.channels, x.height, x.width, shape);
        const Matrix go = grad_out_as_matrix(grad_out, b, shape.c_out, oh * ow);
        SkLinear::Grads ig = inner.backward(cols, go);
        if (g.grad_u1.empty()) {
            g.grad_u1 = std::move(ig.grad_u1);
            g.grad_u2 = std::move(ig.grad_u2);
        } else {
            for (std::size_t t = 0; t < g.grad_u1.size(); ++t) {
                for (std::size_t i = 0; i < g.grad_u1[t].size(); ++i)
                    g.grad_u1[t].data()[i] += ig.grad_u1[t].data()[i];
                for (std::size_t i = 0; i < g.grad_u2[t].size(); ++i)
                    g.grad_u2[t].data()[i] += ig.grad_u2[t].data()[i];
            }
        }
        for (std::size_t i = 0; i < g.grad_b.size(); ++i) g.grad_b[i] += ig.grad_b[i];
        col2im(ig.grad_x, x.channels, x.height, x.width, shape, g.grad_x.image(b));
    }
    return g;
}

ParamCount SkConv2d::params() const { return inner.params(); }

DenseConv2d dense_conv2d_init(const ConvShape& shape, std::uint64_t seed) {
    DenseConv2d conv;
    conv.shape = shape;
    conv.inner = dense_linear_init(shape.lowered_d_in(), shape.c_out, seed);
    return conv;
}

SkConv2d sk_conv2d_fresh(const ConvShape& shape, std::size_t l, std::size_t k,
                         std::uint64_t seed) {
    SkConv2d conv;
    conv.shape = shape;
    conv.inner = sk_linear_fresh(shape.lowered_d_in(), shape.c_out, l, k, seed);
    return conv;
}

SkConv2d sk_conv2d_from_dense(const DenseConv2d& dense, std::size_t l, std::size_t k,
                              std::uint64_t seed) {
    SkConv2d conv;
    conv.shape = dense.shape;
    conv.inner = sk_linear_from_dense(dense.inner.w, dense.inner.b, l, k, seed);
    return conv;
}

Matrix Relu::forward(const Matrix& x) const {
    Matrix y(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) y.data()[i] = x.data()[i] > 0.0 ? x.data()[i] : 0.0;
    return y;
}

Matrix Relu::backward(const Matrix& x, const Matrix& grad_out) const {
    if (x.rows() != grad_out.rows() || x.cols() != grad_out.cols())
        throw shape_error("Relu::backward: shape mismatch");
    Matrix g(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i)
        g.data()[i] = x.data()[i] > 0.0 ? grad_out.data()[i] : 0.0;
    return g;
}

std::uint64_t memory_estimate(const DenseLinear& layer, std::size_t batch) {
    const std::uint64_t params = static_cast<std::uint64_t>(layer.w.size()) + layer.b.size();
    const std::uint64_t workspace = (layer.d_in() + layer.d_out()) * static_cast<std::uint64_t>(batch);
    return (params + workspace) * 8;
}

std::uint64_t memory_estimate(const SkLinear& layer, std::size_t batch) {
    const std::uint64_t params = layer.params().total_stored;
    // input, output, and the k-wide intermediate of each side of a term
    const std::uint64_t workspace =
        (layer.d_in + layer.d_out + 2 * layer.low_rank) * static_cast<std::uint64_t>(batch);
    return (params + workspace) * 8;
}

std::uint64_t memory_estimate(const DenseConv2d& layer, std::size_t h, std::size_t w,
                              std::size_t batch) {
    const std::uint64_t patches =
        static_cast<std::uint64_t>(layer.shape.out_h(h)) * layer.shape.out_w(w);
    const std::uint64_t params =
        static_cast<std::uint64_t>(layer.inner.w.size()) + layer.inner.b.size();
    const std::uint64_t workspace =
        batch * (static_cast<std::uint64_t>(layer.shape.c_in) * h * w +
                 (layer.shape.lowered_d_in() + layer.shape.c_out) * patches);
    return (params + workspace) * 8;
}

std::uint64_t memory_estimate(const SkConv2d& layer, std::size_t h, std::size_t w,
                              std::size_t batch) {
    const std::uint64_t patches =
        static_cast<std::uint64_t>(layer.shape.out_h(h)) * layer.shape.out_w(w);
    const std::uint64_t params = layer.params().total_stored;
    const std::uint64_t workspace =
        batch * (static_cast<std::uint64_t>(layer.shape.c_in) * h * w +
                 (layer.shape.lowered_d_in() + layer.shape.c_out + 2 * layer.inner.low_rank) *
                     patches);
    return (params + workspace) * 8;
}

} // namespace rnla::nn
