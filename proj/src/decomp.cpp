#include "rnla/decomp.hpp"

#include <cmath>

#include "rnla/linalg.hpp"
#include "rnla/rng.hpp"
#include "rnla/sketch.hpp"

namespace rnla::decomp {

using linalg::matmul;
using linalg::transpose;

RsvdResult rsvd(const Matrix& a, std::size_t k, std::size_t oversample,
                std::size_t power_iters, std::uint64_t seed) {
    const std::size_t m = a.rows(), n = a.cols();
    const std::size_t p = std::min(m, n);
    if (k < 1 || k > p) throw parameter_error("rsvd: k out of range");
    if (k + oversample > p) throw parameter_error("rsvd: k + oversample exceeds min(m,n)");

    const std::size_t width = k + oversample;
    const sketch::SketchOp omega = sketch::make_sketch(sketch::SketchDist::Gaussian, n, width, seed);

    Matrix y = sketch::apply_right_t(omega, a); // m x width
    const Matrix at = transpose(a);
    for (std::size_t it = 0; it < power_iters; ++it) {
        Matrix q = linalg::qr_householder(y).q;
        y = matmul(a, matmul(at, q));
    }
    Matrix q = linalg::qr_householder(y).q; // m x width, orthonormal

    const Matrix b = matmul(transpose(q), a); // width x n
    linalg::SvdResult small = linalg::svd_small(b);

    Matrix u_hat_k(small.u.rows(), k);
    for (std::size_t i = 0; i < small.u.rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) u_hat_k(i, j) = small.u(i, j);

    RsvdResult out;
    out.u = matmul(q, u_hat_k);
    out.s.assign(small.s.begin(), small.s.begin() + k);
    out.v = Matrix(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) out.v(i, j) = small.v(i, j);
    return out;
}

namespace {

CqrrptResult cqrrpt_once(const Matrix& a, double gamma, double rank_tol, std::uint64_t seed) {
    const std::size_t m = a.rows(), n = a.cols();
    const std::size_t d = static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n)));

    const sketch::SketchOp s = sketch::make_sketch(sketch::SketchDist::SparseSign, d, m, seed);
    const Matrix sk = sketch::apply_left(s, a); // d x n

    linalg::QrcpResult piv = linalg::qrcp(sk, rank_tol);
    const std::size_t r = piv.rank;
    if (r == 0) {
        // Zero input: empty factors, identity pivoting.
        CqrrptResult out;
        out.q = Matrix(m, 0);
        out.r_mat = Matrix(0, n);
        out.pivots = piv.pivots;
        out.rank = 0;
        out.gamma = gamma;
        return out;
    }

    const Matrix ap = linalg::permute_cols(a, piv.pivots);
    Matrix ap_r(m, r);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < r; ++j) ap_r(i, j) = ap(i, j);

    Matrix r11(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i; j < r; ++j) r11(i, j) = piv.r_mat(i, j);

    // Preconditioned tall factor; cond(a_pre) is bounded by the embedding.
    const Matrix a_pre = linalg::solve_upper_right(ap_r, r11);

    const Matrix gram = matmul(transpose(a_pre), a_pre);
    const Matrix r_c = linalg::cholesky(gram); // throws definiteness_error on failure

    CqrrptResult out;
    out.q = linalg::solve_upper_right(a_pre, r_c);

    Matrix r_sk_r(r, n);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) r_sk_r(i, j) = piv.r_mat(i, j);
    out.r_mat = matmul(r_c, r_sk_r);
    out.pivots = std::move(piv.pivots);
    out.rank = r;
    out.gamma = gamma;
    return out;
}

} // namespace

CqrrptResult cqrrpt(const Matrix& a, double gamma, double rank_tol, std::uint64_t seed) {
    const std::size_t m = a.rows(), n = a.cols();
    if (m == 0 || n == 0) throw shape_error("cqrrpt: empty matrix");
    if (gamma <= 1.0) throw parameter_error("cqrrpt: gamma must be > 1");
    const std::size_t d = static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n)));
    if (m < d) throw shape_error("cqrrpt: requires rows >= ceil(gamma*cols); input not tall enough");

    try {
        return cqrrpt_once(a, gamma, rank_tol, seed);
    } catch (const definiteness_error&) {
        const double gamma2 = 2.0 * gamma;
        const std::size_t d2 = static_cast<std::size_t>(std::ceil(gamma2 * static_cast<double>(n)));
        const std::uint64_t seed2 = derive_seed(seed, 0xc9f2);
        if (m < d2)
            throw decomposition_error("cqrrpt: Cholesky failed and the matrix is too short to double gamma",
                                      linalg::qrcp(a, rank_tol).rank);
        try {
            return cqrrpt_once(a, gamma2, rank_tol, seed2);
        } catch (const definiteness_error&) {
            // Report the rank the sketch-space factorization detected.
            const sketch::SketchOp s =
                sketch::make_sketch(sketch::SketchDist::SparseSign, d2, m, seed2);
            const std::size_t detected = linalg::qrcp(sketch::apply_left(s, a), rank_tol).rank;
            throw decomposition_error("cqrrpt: Cholesky failed twice (gamma " + std::to_string(gamma) +
                                          " and " + std::to_string(gamma2) + ")",
                                      detected);
        }
    }
}

} // namespace rnla::decomp
