#pragma once

#include <cstdint>
#include <vector>

#include "rnla/matrix.hpp"

namespace rnla::decomp {

struct RsvdResult {
    Matrix u;              // m x k
    std::vector<double> s; // k, non-increasing, >= 0
    Matrix v;              // n x k
};

// Randomized SVD: Gaussian sketch of the range, power iteration with
// re-orthonormalization, small exact SVD of the reduced matrix, lift back.
// Deterministic for fixed (a, k, oversample, power_iters, seed).
RsvdResult rsvd(const Matrix& a, std::size_t k, std::size_t oversample,
                std::size_t power_iters, std::uint64_t seed);

struct CqrrptResult {
    Matrix q;                        // m x r
    Matrix r_mat;                    // r x n, upper trapezoidal
    std::vector<std::size_t> pivots; // permutation of 0..n-1
    std::size_t rank = 0;
    double gamma = 0.0;              // oversampling ratio actually used
};

// CholeskyQR with randomized pivoting for tall matrices. Sketch with a
// sparse-sign embedding of d = ceil(gamma*n) rows, pivot and detect rank in
// sketch space, precondition, then one CholeskyQR on the tall matrix.
// On a Cholesky failure the call retries once with gamma doubled and a fresh
// seed; a second failure raises decomposition_error carrying the rank.
CqrrptResult cqrrpt(const Matrix& a, double gamma, double rank_tol, std::uint64_t seed);

inline constexpr std::size_t kDefaultOversample = 8;
inline constexpr std::size_t kDefaultPowerIters = 1;
inline constexpr double kDefaultGamma = 4.0;

} // namespace rnla::decomp
