#include "rnla/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rnla::linalg {

namespace {

// Inner accumulation runs over kk ascending for each output element, so the
// floating-point result does not depend on the parallel schedule.
template <typename T>
void gemm_rows(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
    const bool parallel = m * n * k >= (std::size_t{1} << 16);
#pragma omp parallel for schedule(static) if (parallel)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        T* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] = T(0);
        const T* arow = a + i * k;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const T av = arow[kk];
            if (av == T(0)) continue;
            const T* brow = b + kk * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

} // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw shape_error("matmul: inner dimensions disagree");
    Matrix c(a.rows(), b.cols());
    gemm_rows(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

Matrix matmul_serial(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw shape_error("matmul_serial: inner dimensions disagree");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t kk = 0; kk < a.cols(); ++kk) acc += a(i, kk) * b(kk, j);
            c(i, j) = acc;
        }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw shape_error("add: shape mismatch");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] + b.data()[i];
    return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw shape_error("sub: shape mismatch");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] - b.data()[i];
    return c;
}

Matrix scale(const Matrix& a, double s) {
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] * s;
    return c;
}

double frobenius_norm(const Matrix& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i] * a.data()[i];
    return std::sqrt(acc);
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

namespace {

// Householder reflector for w[row0..m-1, col] of the working matrix.
// Returns beta; the reflector vector v (v[0] = 1 implicit scaling folded into
// beta) is written into vbuf[0..m-row0-1]. Returns beta = 0 for a zero column.
double make_reflector(const Matrix& w, std::size_t row0, std::size_t col, std::vector<double>& vbuf) {
    const std::size_t len = w.rows() - row0;
    vbuf.resize(len);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        vbuf[i] = w(row0 + i, col);
        norm2 += vbuf[i] * vbuf[i];
    }
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) return 0.0;
    const double alpha = vbuf[0] >= 0.0 ? -norm : norm;
    vbuf[0] -= alpha;
    double vtv = 0.0;
    for (std::size_t i = 0; i < len; ++i) vtv += vbuf[i] * vbuf[i];
    if (vtv == 0.0) return 0.0;
    return 2.0 / vtv;
}

// Applies H = I - beta*v*v^T to w[row0.., colBegin..colEnd).
void apply_reflector(Matrix& w, std::size_t row0, std::size_t col_begin, std::size_t col_end,
                     const std::vector<double>& v, double beta) {
    if (beta == 0.0) return;
    const std::size_t len = v.size();
    for (std::size_t j = col_begin; j < col_end; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += v[i] * w(row0 + i, j);
        s *= beta;
        for (std::size_t i = 0; i < len; ++i) w(row0 + i, j) -= s * v[i];
    }
}

// Accumulates the thin Q (m x p) from stored reflectors.
Matrix form_q(std::size_t m, std::size_t p, const std::vector<std::vector<double>>& vs,
              const std::vector<double>& betas) {
    Matrix q(m, p);
    for (std::size_t j = 0; j < p; ++j) q(j, j) = 1.0;
    for (std::size_t step = vs.size(); step-- > 0;) {
        const auto& v = vs[step];
        const double beta = betas[step];
        if (beta == 0.0) continue;
        apply_reflector(q, step, 0, p, v, beta);
    }
    return q;
}

} // namespace

QrResult qr_householder(const Matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    if (m < n) throw shape_error("qr_householder: requires rows >= cols");
    if (n == 0) return {Matrix(m, 0), Matrix(0, 0)};

    Matrix w = a;
    std::vector<std::vector<double>> vs(n);
    std::vector<double> betas(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        betas[j] = make_reflector(w, j, j, vs[j]);
        apply_reflector(w, j, j, n, vs[j], betas[j]);
    }

    Matrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) r(i, j) = w(i, j);
    Matrix q = form_q(m, n, vs, betas);

    // Sign convention: non-negative diagonal of r.
    for (std::size_t i = 0; i < n; ++i) {
        if (r(i, i) < 0.0) {
            for (std::size_t j = i; j < n; ++j) r(i, j) = -r(i, j);
            for (std::size_t row = 0; row < m; ++row) q(row, i) = -q(row, i);
        }
    }
    return {std::move(q), std::move(r)};
}

QrcpResult qrcp(const Matrix& a, double rank_tol) {
    const std::size_t m = a.rows(), n = a.cols();
    if (m == 0 || n == 0) throw shape_error("qrcp: empty matrix");
    if (rank_tol < 0.0) throw parameter_error("qrcp: rank_tol must be >= 0");

    Matrix w = a;
    std::vector<std::size_t> pivots(n);
    for (std::size_t j = 0; j < n; ++j) pivots[j] = j;

    std::vector<double> norms2(n, 0.0), ref2(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
        norms2[j] = ref2[j] = s;
    }

    const std::size_t steps = std::min(m, n);
    std::vector<std::vector<double>> vs;
    std::vector<double> betas;
    vs.reserve(steps);
    betas.reserve(steps);

    std::size_t kfact = 0;
    for (std::size_t step = 0; step < steps; ++step) {
        std::size_t jmax = step;
        for (std::size_t j = step + 1; j < n; ++j)
            if (norms2[j] > norms2[jmax]) jmax = j;
        if (norms2[jmax] <= 0.0) break;

        if (jmax != step) {
            for (std::size_t i = 0; i < m; ++i) std::swap(w(i, step), w(i, jmax));
            std::swap(pivots[step], pivots[jmax]);
            std::swap(norms2[step], norms2[jmax]);
            std::swap(ref2[step], ref2[jmax]);
        }

        vs.emplace_back();
        betas.push_back(make_reflector(w, step, step, vs.back()));
        apply_reflector(w, step, step, n, vs.back(), betas.back());
        ++kfact;

        for (std::size_t j = step + 1; j < n; ++j) {
            const double rij = w(step, j);
            norms2[j] -= rij * rij;
            if (norms2[j] < 0.0) norms2[j] = 0.0;
            if (norms2[j] < 0.1 * ref2[j]) {
                double s = 0.0;
                for (std::size_t i = step + 1; i < m; ++i) s += w(i, j) * w(i, j);
                norms2[j] = ref2[j] = s;
            }
        }
    }

    // Numerical rank from the diagonal, relative to the leading entry.
    const double d0 = kfact > 0 ? std::abs(w(0, 0)) : 0.0;
    std::size_t rank = 0;
    for (std::size_t i = 0; i < kfact; ++i) {
        if (std::abs(w(i, i)) > rank_tol * d0 && std::abs(w(i, i)) > 0.0)
            rank = i + 1;
        else
            break;
    }

    Matrix r_mat(rank, n);
    for (std::size_t i = 0; i < rank; ++i)
        for (std::size_t j = i; j < n; ++j) r_mat(i, j) = w(i, j);

    Matrix q_full = form_q(m, kfact, vs, betas);
    Matrix q(m, rank);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < rank; ++j) q(i, j) = q_full(i, j);

    return {std::move(q), std::move(r_mat), std::move(pivots), rank};
}

Matrix cholesky(const Matrix& g) {
    const std::size_t n = g.rows();
    if (g.cols() != n) throw shape_error("cholesky: matrix must be square");

    double max_abs = 0.0, max_asym = 0.0, max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        max_diag = std::max(max_diag, g(i, i));
        for (std::size_t j = 0; j < n; ++j) {
            max_abs = std::max(max_abs, std::abs(g(i, j)));
            max_asym = std::max(max_asym, std::abs(g(i, j) - g(j, i)));
        }
    }
    if (max_asym > 1e-10 * std::max(max_abs, 1e-300))
        throw shape_error("cholesky: matrix is not symmetric");

    const double eps = std::numeric_limits<double>::epsilon();
    const double pivot_floor = static_cast<double>(n) * eps * max_diag;

    Matrix r(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = g(j, j);
        for (std::size_t t = 0; t < j; ++t) pivot -= r(t, j) * r(t, j);
        if (pivot <= pivot_floor)
            throw definiteness_error("cholesky: non-positive-definite pivot at column " + std::to_string(j));
        const double rjj = std::sqrt(pivot);
        r(j, j) = rjj;
        for (std::size_t l = j + 1; l < n; ++l) {
            double s = g(j, l);
            for (std::size_t t = 0; t < j; ++t) s -= r(t, j) * r(t, l);
            r(j, l) = s / rjj;
        }
    }
    return r;
}

namespace {

void rotate_columns(Matrix& m, std::size_t i, std::size_t j, double cs, double sn) {
    for (std::size_t row = 0; row < m.rows(); ++row) {
        const double xi = m(row, i), xj = m(row, j);
        m(row, i) = cs * xi - sn * xj;
        m(row, j) = sn * xi + cs * xj;
    }
}

// Fills u columns [filled, p) with unit vectors orthogonal to the ones
// already present (needed when the input has zero singular values).
void complete_orthonormal(Matrix& u, std::size_t filled) {
    const std::size_t m = u.rows(), p = u.cols();
    for (std::size_t j = filled; j < p; ++j) {
        double best_norm = -1.0;
        std::vector<double> best;
        for (std::size_t t = 0; t < m; ++t) {
            std::vector<double> v(m, 0.0);
            v[t] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t c = 0; c < j; ++c) {
                    double proj = 0.0;
                    for (std::size_t i = 0; i < m; ++i) proj += u(i, c) * v[i];
                    for (std::size_t i = 0; i < m; ++i) v[i] -= proj * u(i, c);
                }
            }
            double norm2 = 0.0;
            for (double x : v) norm2 += x * x;
            if (norm2 > best_norm) {
                best_norm = norm2;
                best = std::move(v);
            }
            if (best_norm > 0.5) break;
        }
        const double norm = std::sqrt(best_norm);
        for (std::size_t i = 0; i < m; ++i) u(i, j) = best[i] / norm;
    }
}

SvdResult svd_tall(const Matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    Matrix w = a;
    Matrix v = Matrix::identity(n);

    constexpr double kTol = 1e-12;
    constexpr int kMaxSweeps = 30;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool converged = true;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double aii = 0.0, ajj = 0.0, aij = 0.0;
                for (std::size_t row = 0; row < m; ++row) {
                    const double wi = w(row, i), wj = w(row, j);
                    aii += wi * wi;
                    ajj += wj * wj;
                    aij += wi * wj;
                }
                if (aii == 0.0 || ajj == 0.0) continue;
                if (std::abs(aij) <= kTol * std::sqrt(aii * ajj)) continue;
                converged = false;
                const double zeta = (ajj - aii) / (2.0 * aij);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                rotate_columns(w, i, j, cs, sn);
                rotate_columns(v, i, j, cs, sn);
            }
        }
        if (converged) break;
    }

    std::vector<double> norms(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
        norms[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < n; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    SvdResult out;
    out.s.resize(n);
    out.u = Matrix(m, n);
    out.v = Matrix(n, n);
    std::size_t filled = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.s[j] = norms[src];
        for (std::size_t i = 0; i < n; ++i) out.v(i, j) = v(i, src);
        if (norms[src] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) out.u(i, j) = w(i, src) / norms[src];
            filled = j + 1;
        }
    }
    complete_orthonormal(out.u, filled);
    return out;
}

} // namespace

SvdResult svd_small(const Matrix& a) {
    if (a.rows() == 0 || a.cols() == 0) throw shape_error("svd_small: empty matrix");
    if (a.rows() >= a.cols()) return svd_tall(a);
    SvdResult t = svd_tall(transpose(a));
    return {std::move(t.v), std::move(t.s), std::move(t.u)};
}

Matrix solve_upper_right(const Matrix& b, const Matrix& r) {
    const std::size_t n = b.rows(), k = r.rows();
    if (r.cols() != k || b.cols() != k)
        throw shape_error("solve_upper_right: shape mismatch");
    Matrix x(n, k);
#pragma omp parallel for schedule(static) if (n * k * k >= (std::size_t{1} << 16))
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < k; ++j) {
            double s = b(i, j);
            for (std::size_t t = 0; t < j; ++t) s -= x(i, t) * r(t, j);
            x(i, j) = s / r(j, j);
        }
    }
    return x;
}

Matrix permute_cols(const Matrix& a, const std::vector<std::size_t>& pivots) {
    if (pivots.size() != a.cols()) throw shape_error("permute_cols: pivot length mismatch");
    Matrix p(a.rows(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) p(i, j) = a(i, pivots[j]);
    return p;
}

} // namespace rnla::linalg
