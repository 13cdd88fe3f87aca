#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "copmm/field.hpp"
#include "copmm/rng.hpp"

namespace copmm {

/// Dense row-major matrix over one prime field. Entries are stored as
/// canonical residues; every mutation keeps them canonical.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, const FieldConfig& field)
        : field_(field), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

    static Matrix zero(std::size_t rows, std::size_t cols, const FieldConfig& field) {
        return Matrix(rows, cols, field);
    }
    static Matrix identity(std::size_t n, const FieldConfig& field);
    static Matrix random(std::size_t rows, std::size_t cols, const FieldConfig& field, SplitMix64& rng);
    static Matrix from_values(std::size_t rows, std::size_t cols, const FieldConfig& field,
                              std::span<const std::uint64_t> values);
    /// Signed entries are embedded mod q.
    static Matrix from_signed(std::size_t rows, std::size_t cols, const FieldConfig& field,
                              std::span<const std::int64_t> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const FieldConfig& field() const { return field_; }
    std::uint64_t modulus() const { return field_.modulus(); }

    std::uint64_t raw(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    void set_raw(std::size_t r, std::size_t c, std::uint64_t v) { data_[r * cols_ + c] = v % field_.modulus(); }
    FieldElement at(std::size_t r, std::size_t c) const { return FieldElement(raw(r, c), field_); }
    void set(std::size_t r, std::size_t c, const FieldElement& v);

    std::span<const std::uint64_t> data() const { return data_; }
    std::span<std::uint64_t> data() { return data_; }

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    friend Matrix operator+(Matrix a, const Matrix& b) { a += b; return a; }
    friend Matrix operator-(Matrix a, const Matrix& b) { a -= b; return a; }

    /// In-place this += scalar * other; the workhorse of every encoder.
    void add_scaled(const Matrix& other, std::uint64_t scalar);
    Matrix scaled(std::uint64_t scalar) const;

    bool operator==(const Matrix& o) const {
        return field_ == o.field_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }
    bool operator!=(const Matrix& o) const { return !(*this == o); }

    bool is_zero() const;

private:
    void check_same_shape(const Matrix& o) const;

    FieldConfig field_;
    std::size_t rows_, cols_;
    std::vector<std::uint64_t> data_;
};

/// Exact schoolbook product over F_q; the ground-truth oracle for every
/// strategy test.
Matrix mat_mul(const Matrix& a, const Matrix& b);

/// Block-partitioning parameters (m row blocks of A, p inner blocks, n column
/// blocks of B). They must divide the dimensions they are applied to.
struct PartitionSpec {
    std::size_t m = 1, p = 1, n = 1;

    PartitionSpec() = default;
    PartitionSpec(std::size_t m_, std::size_t p_, std::size_t n_);
};

enum class Side { A, B };

/// Read-only view of one sub-block of a partitioned matrix.
class BlockView {
public:
    BlockView(const Matrix& parent, std::size_t row0, std::size_t col0,
              std::size_t rows, std::size_t cols)
        : parent_(&parent), row0_(row0), col0_(col0), rows_(rows), cols_(cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint64_t raw(std::size_t r, std::size_t c) const {
        return parent_->raw(row0_ + r, col0_ + c);
    }
    FieldElement at(std::size_t r, std::size_t c) const {
        return parent_->at(row0_ + r, col0_ + c);
    }
    const FieldConfig& field() const { return parent_->field(); }

    Matrix to_matrix() const;

private:
    const Matrix* parent_;
    std::size_t row0_, col0_, rows_, cols_;
};

/// Grid of disjoint block views covering the parent matrix.
struct BlockGrid {
    std::size_t grid_rows = 0, grid_cols = 0;
    std::vector<BlockView> blocks; // row-major

    const BlockView& at(std::size_t r, std::size_t c) const {
        return blocks[r * grid_cols + c];
    }
    std::size_t block_rows() const { return blocks.empty() ? 0 : blocks.front().rows(); }
    std::size_t block_cols() const { return blocks.empty() ? 0 : blocks.front().cols(); }
};

/// Splits into m x p (A-side) or p x n (B-side) equal blocks. Non-divisible
/// dimensions are rejected; padding is a CLI-level choice, never implicit.
BlockGrid partition(const Matrix& mat, const PartitionSpec& spec, Side side);

Matrix block_linear_combination(std::span<const BlockView> blocks,
                                std::span<const FieldElement> coeffs);

/// Reassembles a row-major grid of equally sized blocks into one matrix.
Matrix assemble_blocks(std::span<const Matrix> blocks, std::size_t grid_rows, std::size_t grid_cols);

/// Copy extended with zero rows/columns. Padding changes the product's
/// dimensions, so the library never does this implicitly; the CLI exposes it
/// behind an explicit flag.
Matrix zero_pad(const Matrix& mat, std::size_t rows, std::size_t cols);

// FQMX binary format: magic "FQMX", version byte 1, little-endian u64
// modulus/rows/cols, then rows*cols little-endian u64 entries.
void write_fqmx(std::ostream& out, const Matrix& mat);
Matrix read_fqmx(std::istream& in);
void write_fqmx_file(const std::string& path, const Matrix& mat);
Matrix read_fqmx_file(const std::string& path);

} // namespace copmm
