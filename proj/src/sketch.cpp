#include "rnla/sketch.hpp"

#include <cmath>
#include <mutex>

#include "rnla/linalg.hpp"
#include "rnla/rng.hpp"

namespace rnla::sketch {

struct SketchOp::Cache {
    std::once_flag flag;
    Matrix mat;
};

std::string dist_name(SketchDist d) {
    switch (d) {
        case SketchDist::Gaussian: return "gaussian";
        case SketchDist::Rademacher: return "rademacher";
        case SketchDist::SparseSign: return "sparse_sign";
    }
    return "gaussian";
}

SketchDist dist_from_name(const std::string& name) {
    if (name == "gaussian") return SketchDist::Gaussian;
    if (name == "rademacher") return SketchDist::Rademacher;
    if (name == "sparse_sign") return SketchDist::SparseSign;
    throw parameter_error("unknown sketch distribution: " + name);
}

namespace {

Matrix realize_sketch(SketchDist dist, std::size_t k, std::size_t d, std::uint64_t seed,
                      std::size_t nnz) {
    Matrix m(k, d);
    switch (dist) {
        case SketchDist::Gaussian: {
            GaussianStream g(seed);
            const double scale = 1.0 / std::sqrt(static_cast<double>(k));
            for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = g.next() * scale;
            break;
        }
        case SketchDist::Rademacher: {
            Splitmix64 rng(seed);
            const double v = 1.0 / std::sqrt(static_cast<double>(k));
            for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_bool() ? v : -v;
            break;
        }
        case SketchDist::SparseSign: {
            // Per column: nnz distinct row positions by partial Fisher-Yates,
            // signs from the same stream.
            Splitmix64 rng(seed);
            const double v = 1.0 / std::sqrt(static_cast<double>(nnz));
            std::vector<std::size_t> idx(k);
            for (std::size_t j = 0; j < d; ++j) {
                for (std::size_t i = 0; i < k; ++i) idx[i] = i;
                for (std::size_t t = 0; t < nnz; ++t) {
                    const std::size_t pick = t + static_cast<std::size_t>(rng.next_below(k - t));
                    std::swap(idx[t], idx[pick]);
                    m(idx[t], j) = rng.next_bool() ? v : -v;
                }
            }
            break;
        }
    }
    return m;
}

} // namespace

const Matrix& SketchOp::realized() const {
    std::call_once(cache_->flag, [this] {
        if (!explicit_)
            cache_->mat = realize_sketch(dist_, rows_, cols_, seed_, nnz_per_col_);
    });
    return cache_->mat;
}

SketchOp SketchOp::with_realized(Matrix m) {
    SketchOp op;
    op.rows_ = m.rows();
    op.cols_ = m.cols();
    op.explicit_ = true;
    op.cache_ = std::make_shared<Cache>();
    op.cache_->mat = std::move(m);
    return op;
}

SketchOp make_sketch(SketchDist dist, std::size_t k, std::size_t d, std::uint64_t seed,
                     std::size_t nnz_per_col) {
    if (k < 1 || d < 1) throw shape_error("make_sketch: dimensions must be >= 1");
    if (dist == SketchDist::SparseSign) {
        if (nnz_per_col == 0) nnz_per_col = std::min<std::size_t>(8, k);
        if (nnz_per_col > k)
            throw parameter_error("make_sketch: nnz_per_col exceeds sketch rows");
    } else {
        nnz_per_col = 0;
    }
    SketchOp op;
    op.dist_ = dist;
    op.rows_ = k;
    op.cols_ = d;
    op.seed_ = seed;
    op.nnz_per_col_ = nnz_per_col;
    op.cache_ = std::make_shared<SketchOp::Cache>();
    return op;
}

Matrix apply_left(const SketchOp& s, const Matrix& a) {
    if (s.cols() != a.rows()) throw shape_error("apply_left: shape mismatch");
    return linalg::matmul(s.realized(), a);
}

Matrix apply_right_t(const SketchOp& s, const Matrix& a) {
    if (a.cols() != s.rows()) throw shape_error("apply_right_t: shape mismatch");
    return linalg::matmul(a, s.realized());
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    GaussianStream g(seed);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = g.next();
    return m;
}

} // namespace rnla::sketch
