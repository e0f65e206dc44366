#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "rnla/matrix.hpp"

namespace rnla::sketch {

enum class SketchDist { Gaussian, Rademacher, SparseSign };

std::string dist_name(SketchDist d);
SketchDist dist_from_name(const std::string& name);

// Seeded random sketch operator. Entries are scaled so E[S^T S] = I_cols:
// Gaussian ~ N(0, 1/rows), Rademacher +-1/sqrt(rows), SparseSign has exactly
// nnz_per_col entries +-1/sqrt(nnz_per_col) in every column.
//
// Realization is lazy, cached, and idempotent; copies share the cache.
// Identical (dist, rows, cols, seed, nnz_per_col) realize bit-identical
// matrices on every platform (SplitMix64 stream, fixed fill order).
class SketchOp {
public:
    SketchOp() = default;

    SketchDist dist() const noexcept { return dist_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t nnz_per_col() const noexcept { return nnz_per_col_; }
    bool is_explicit() const noexcept { return explicit_; }

    const Matrix& realized() const;

    // Test hook: wraps a caller-provided matrix as the realized sketch.
    // Explicit sketches cannot be serialized.
    static SketchOp with_realized(Matrix m);

private:
    friend SketchOp make_sketch(SketchDist, std::size_t, std::size_t, std::uint64_t, std::size_t);

    struct Cache;
    SketchDist dist_ = SketchDist::Gaussian;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::uint64_t seed_ = 0;
    std::size_t nnz_per_col_ = 0;
    bool explicit_ = false;
    std::shared_ptr<Cache> cache_;
};

// nnz_per_col applies to SparseSign only; 0 selects the default min(8, k).
SketchOp make_sketch(SketchDist dist, std::size_t k, std::size_t d, std::uint64_t seed,
                     std::size_t nnz_per_col = 0);

// s.realized() * a, exactly.
Matrix apply_left(const SketchOp& s, const Matrix& a);

// a * s.realized(), exactly (the S^T applications in layer backwards).
Matrix apply_right_t(const SketchOp& s, const Matrix& a);

// Unit-variance i.i.d. Gaussian matrix (no 1/sqrt(k) scaling); used for
// attention feature projections and test fixtures.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

} // namespace rnla::sketch
