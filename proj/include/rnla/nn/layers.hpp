#pragma once

#include <cstdint>
#include <vector>

#include "rnla/matrix.hpp"
#include "rnla/sketch.hpp"

namespace rnla::nn {

// Linear layers use the column convention: x is d_in x batch, outputs are
// d_out x batch, bias broadcasts over batch columns.

struct ParamCount {
    std::uint64_t learnable = 0;
    std::uint64_t total_stored = 0;     // learnable plus frozen sketch coefficients
    std::uint64_t dense_equivalent = 0; // what the dense counterpart stores
};

// Stored-coefficient count of a sketched linear map, excluding bias.
inline std::uint64_t sk_stored_coeffs(std::uint64_t l, std::uint64_t k, std::uint64_t d_in,
                                      std::uint64_t d_out) {
    return 2 * l * k * (d_in + d_out);
}

// Skip rule: a sketched parameterization larger than the dense layer cannot
// win; equality is admitted.
inline bool exceeds_dense(std::uint64_t l, std::uint64_t k, std::uint64_t d_in,
                          std::uint64_t d_out) {
    return sk_stored_coeffs(l, k, d_in, d_out) > d_in * d_out;
}

struct DenseLinear {
    Matrix w;              // d_out x d_in
    std::vector<double> b; // d_out

    std::size_t d_in() const noexcept { return w.cols(); }
    std::size_t d_out() const noexcept { return w.rows(); }

    Matrix forward(const Matrix& x) const;

    struct Grads {
        Matrix grad_x;
        Matrix grad_w;
        std::vector<double> grad_b;
    };
    Grads backward(const Matrix& x, const Matrix& grad_out) const;
};

DenseLinear dense_linear_init(std::size_t d_in, std::size_t d_out, std::uint64_t seed);

struct SkTerm {
    sketch::SketchOp s1; // k x d_out, frozen
    Matrix u1;           // k x d_in, learnable
    sketch::SketchOp s2; // k x d_in, frozen
    Matrix u2;           // d_out x k, learnable
};

// Sketched linear layer: the average of num_terms two-sided sketch terms,
//   forward(x) = 1/(2l) * sum_i [ S1_i^T (U1_i x) + U2_i (S2_i x) ] + b.
// Sketches are frozen and receive no gradient.
struct SkLinear {
    std::size_t d_in = 0;
    std::size_t d_out = 0;
    std::size_t num_terms = 0; // l
    std::size_t low_rank = 0;  // k
    std::vector<SkTerm> terms;
    std::vector<double> bias;

    Matrix forward(const Matrix& x) const;

    struct Grads {
        Matrix grad_x;
        std::vector<Matrix> grad_u1;
        std::vector<Matrix> grad_u2;
        std::vector<double> grad_b;
    };
    Grads backward(const Matrix& x, const Matrix& grad_out) const;

    ParamCount params() const;
};

// Fresh layer: U entries i.i.d. Normal(0, 2/(d_in+d_out)), zero bias,
// per-term sketch seeds derived from seed.
SkLinear sk_linear_fresh(std::size_t d_in, std::size_t d_out, std::size_t l, std::size_t k,
                         std::uint64_t seed, sketch::SketchDist dist = sketch::SketchDist::Gaussian);

// Drop-in replacement preserving trained weights: U1_i = S1_i w, U2_i = w S2_i^T,
// bias copied. E_sketches[forward(x)] = w x + b.
SkLinear sk_linear_from_dense(const Matrix& w, const std::vector<double>& b, std::size_t l,
                              std::size_t k, std::uint64_t seed,
                              sketch::SketchDist dist = sketch::SketchDist::Gaussian);

// --- 2-D convolution via im2col lowering ---

struct ConvShape {
    std::size_t c_in = 0;
    std::size_t c_out = 0;
    std::size_t kernel_h = 0;
    std::size_t kernel_w = 0;
    std::size_t stride = 1;
    std::size_t padding = 0;

    std::size_t lowered_d_in() const noexcept { return c_in * kernel_h * kernel_w; }
    std::size_t out_h(std::size_t h) const;
    std::size_t out_w(std::size_t w) const;
};

// NCHW image batch.
struct ImageBatch {
    std::size_t batch = 0;
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> data; // batch*channels*height*width

    double* image(std::size_t b) { return data.data() + b * channels * height * width; }
    const double* image(std::size_t b) const { return data.data() + b * channels * height * width; }
};

// Lowers one image (c x h x w) to the patch matrix (c*kh*kw) x n_patches.
// Column p holds the receptive field of output position p, flattened in
// (channel, kernel_row, kernel_col) order; out-of-bounds reads are zero.
Matrix im2col(const double* image, std::size_t c, std::size_t h, std::size_t w,
              const ConvShape& shape);

// Adjoint of im2col: scatter-adds patch columns back into an image.
void col2im(const Matrix& cols, std::size_t c, std::size_t h, std::size_t w,
            const ConvShape& shape, double* image);

struct DenseConv2d {
    ConvShape shape;
    DenseLinear inner; // w: c_out x (c_in*kh*kw)

    ImageBatch forward(const ImageBatch& x) const;
    struct Grads {
        ImageBatch grad_x;
        Matrix grad_w;
        std::vector<double> grad_b;
    };
    Grads backward(const ImageBatch& x, const ImageBatch& grad_out) const;
};

struct SkConv2d {
    ConvShape shape;
    SkLinear inner; // d_in = c_in*kh*kw, d_out = c_out

    ImageBatch forward(const ImageBatch& x) const;
    struct Grads {
        ImageBatch grad_x;
        std::vector<Matrix> grad_u1;
        std::vector<Matrix> grad_u2;
        std::vector<double> grad_b;
    };
    Grads backward(const ImageBatch& x, const ImageBatch& grad_out) const;

    ParamCount params() const;
};

DenseConv2d dense_conv2d_init(const ConvShape& shape, std::uint64_t seed);
SkConv2d sk_conv2d_fresh(const ConvShape& shape, std::size_t l, std::size_t k, std::uint64_t seed);
SkConv2d sk_conv2d_from_dense(const DenseConv2d& dense, std::size_t l, std::size_t k,
                              std::uint64_t seed);

// Elementwise max(0, x). No parameters.
struct Relu {
    Matrix forward(const Matrix& x) const;
    Matrix backward(const Matrix& x, const Matrix& grad_out) const;
};

// Analytic forward-pass peak memory in bytes: stored coefficients plus
// input/output/intermediate activations at f64 width.
std::uint64_t memory_estimate(const DenseLinear& layer, std::size_t batch);
std::uint64_t memory_estimate(const SkLinear& layer, std::size_t batch);
std::uint64_t memory_estimate(const DenseConv2d& layer, std::size_t h, std::size_t w,
                              std::size_t batch);
std::uint64_t memory_estimate(const SkConv2d& layer, std::size_t h, std::size_t w,
                              std::size_t batch);

} // namespace rnla::nn
