#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rnla/matrix.hpp"

namespace rnla::nn {

// Attention uses the sequence-rows convention: x is N x d_model.

enum class AttentionKernel { SoftmaxPositive, Relu };

std::string kernel_name(AttentionKernel k);
AttentionKernel kernel_from_name(const std::string& name);

// Shared projection weights, all d_model x d_model.
struct MhaParams {
    std::size_t d_model = 0;
    std::size_t num_heads = 0;
    Matrix w_q, w_k, w_v, w_o;

    std::size_t head_dim() const noexcept { return d_model / num_heads; }
};

MhaParams mha_params_init(std::size_t d_model, std::size_t num_heads, std::uint64_t seed);

struct MhaGrads {
    Matrix grad_x;
    Matrix grad_wq, grad_wk, grad_wv, grad_wo;
};

// Random-feature map of one head's query/key block (rows of x, N x d_h).
// SoftmaxPositive: phi(x)_j = exp(rf_j . x - |x|^2/2 - shift) / sqrt(m);
// Relu:            phi(x)_j = max(0, rf_j . x) / sqrt(m).
// The shift is a caller-supplied stabilizer; it cancels in the attention
// ratio when the same shift is applied to queries and keys.
Matrix feature_map(const Matrix& x, const Matrix& rf, AttentionKernel kernel, double shift = 0.0);

// Exact softmax multi-head attention: softmax(Q K^T / sqrt(d_h)) V per head.
// Serves as the baseline and the fidelity oracle.
Matrix exact_mha_forward(const MhaParams& p, const Matrix& x);
MhaGrads exact_mha_backward(const MhaParams& p, const Matrix& x, const Matrix& grad_out);

// Linear-time attention via random features. Never materializes an N x N
// score matrix: numerator = Phi_q (Phi_k^T V), denominator = Phi_q (Phi_k^T 1).
// A Relu-kernel query row whose features are all zero falls back to the
// uniform average of V.
class RandMha {
public:
    RandMha() = default;
    RandMha(MhaParams params, std::size_t num_features, AttentionKernel kernel,
            std::uint64_t rf_seed, double epsilon = 1e-6);

    Matrix forward(const Matrix& x) const;
    MhaGrads backward(const Matrix& x, const Matrix& grad_out) const;

    const MhaParams& params() const noexcept { return params_; }
    MhaParams& params() noexcept { return params_; }
    std::size_t num_features() const noexcept { return num_features_; }
    AttentionKernel kernel() const noexcept { return kernel_; }
    std::uint64_t rf_seed() const noexcept { return rf_seed_; }
    double epsilon() const noexcept { return epsilon_; }
    const Matrix& head_features(std::size_t head) const { return rf_[head]; }

private:
    MhaParams params_;
    std::size_t num_features_ = 0;
    AttentionKernel kernel_ = AttentionKernel::SoftmaxPositive;
    std::uint64_t rf_seed_ = 0;
    double epsilon_ = 1e-6;
    std::vector<Matrix> rf_; // per head, m x d_h, unit-variance Gaussian, frozen
};

// Analytic peak-memory model in bytes (f64 widths): parameters plus forward
// workspace. Exact attention carries the h * N^2 score term; the
// random-feature path is linear in N. Companion estimates for the linear and
// conv layers live in layers.hpp.
std::uint64_t exact_mha_memory_estimate(std::size_t d_model, std::size_t num_heads, std::size_t n);
std::uint64_t rand_mha_memory_estimate(std::size_t d_model, std::size_t num_heads,
                                       std::size_t num_features, std::size_t n);

} // namespace rnla::nn
