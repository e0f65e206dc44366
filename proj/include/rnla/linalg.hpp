#pragma once

#include <cstddef>
#include <vector>

#include "rnla/matrix.hpp"

namespace rnla::linalg {

// Product a*b. OpenMP-parallel over rows of the output; every output element
// accumulates over k in ascending order, so the result is bit-identical to
// matmul_serial for any thread count.
Matrix matmul(const Matrix& a, const Matrix& b);

// Naive triple-loop reference. Kept for tests and the kernel benchmark.
Matrix matmul_serial(const Matrix& a, const Matrix& b);

// Explicit-copy transpose (row-major storage throughout).
Matrix transpose(const Matrix& a);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

double frobenius_norm(const Matrix& a);

double dot(const std::vector<double>& x, const std::vector<double>& y);

struct QrResult {
    Matrix q; // m x n, orthonormal columns
    Matrix r; // n x n, upper triangular, non-negative diagonal
};

// Householder QR of a tall matrix (m >= n). Rank-deficient inputs are fine:
// zero columns yield zero diagonal entries of r.
QrResult qr_householder(const Matrix& a);

struct QrcpResult {
    Matrix q;                   // m x r, orthonormal columns
    Matrix r_mat;               // r x n, upper trapezoidal
    std::vector<std::size_t> pivots; // permutation of 0..n-1; a(:,pivots[j]) is column j of a*P
    std::size_t rank = 0;
};

// Column-pivoted Householder QR. Greedy max residual-norm pivoting with
// squared-norm downdating; a column's residual norm is recomputed from
// scratch whenever the downdated value drops below 0.1x its reference value.
// rank = number of diagonal entries with |r_ii| > rank_tol * |r_00|.
QrcpResult qrcp(const Matrix& a, double rank_tol);

// Upper-triangular Cholesky factor R with R^T R = g. g must be symmetric
// within 1e-10 relative. Throws definiteness_error when a pivot falls at or
// below n*eps*max(diag).
Matrix cholesky(const Matrix& g);

struct SvdResult {
    Matrix u;              // m x p
    std::vector<double> s; // p, non-increasing, non-negative
    Matrix v;              // n x p
};

// One-sided Jacobi SVD, intended for p = min(m,n) <= ~512.
SvdResult svd_small(const Matrix& a);

// Solves x * r = b for x, with r upper triangular (r x r) and b (n x r).
Matrix solve_upper_right(const Matrix& b, const Matrix& r);

// Rows of a permuted-column copy: result(:, j) = a(:, pivots[j]).
Matrix permute_cols(const Matrix& a, const std::vector<std::size_t>& pivots);

} // namespace rnla::linalg
