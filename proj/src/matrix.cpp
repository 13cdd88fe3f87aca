#include "copmm/matrix.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <ostream>

namespace copmm {

Matrix Matrix::identity(std::size_t n, const FieldConfig& field) {
    Matrix out(n, n, field);
    for (std::size_t i = 0; i < n; ++i) out.set_raw(i, i, 1);
    return out;
}

Matrix Matrix::random(std::size_t rows, std::size_t cols, const FieldConfig& field, SplitMix64& rng) {
    Matrix out(rows, cols, field);
    for (auto& v : out.data_) v = rng.next_below(field.modulus());
    return out;
}

Matrix Matrix::from_values(std::size_t rows, std::size_t cols, const FieldConfig& field,
                           std::span<const std::uint64_t> values) {
    if (values.size() != rows * cols)
        throw ValidationError("entry count does not match matrix shape");
    Matrix out(rows, cols, field);
    for (std::size_t i = 0; i < values.size(); ++i) out.data_[i] = values[i] % field.modulus();
    return out;
}

Matrix Matrix::from_signed(std::size_t rows, std::size_t cols, const FieldConfig& field,
                           std::span<const std::int64_t> values) {
    if (values.size() != rows * cols)
        throw ValidationError("entry count does not match matrix shape");
    Matrix out(rows, cols, field);
    for (std::size_t i = 0; i < values.size(); ++i)
        out.data_[i] = fq::embed_signed(values[i], field.modulus());
    return out;
}

void Matrix::set(std::size_t r, std::size_t c, const FieldElement& v) {
    if (v.modulus() != field_.modulus())
        throw ValidationError("entry belongs to a different field");
    data_[r * cols_ + c] = v.value();
}

void Matrix::check_same_shape(const Matrix& o) const {
    if (field_ != o.field_)
        throw ValidationError("matrices belong to different fields");
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw ValidationError("matrix shapes do not match");
}

Matrix& Matrix::operator+=(const Matrix& o) {
    check_same_shape(o);
    const std::uint64_t q = field_.modulus();
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] = fq::add(data_[i], o.data_[i], q);
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    check_same_shape(o);
    const std::uint64_t q = field_.modulus();
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] = fq::sub(data_[i], o.data_[i], q);
    return *this;
}

void Matrix::add_scaled(const Matrix& other, std::uint64_t scalar) {
    check_same_shape(other);
    if (scalar == 0) return;
    const std::uint64_t q = field_.modulus();
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] = fq::add(data_[i], fq::mul(scalar, other.data_[i], q), q);
}

Matrix Matrix::scaled(std::uint64_t scalar) const {
    Matrix out(rows_, cols_, field_);
    const std::uint64_t q = field_.modulus();
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = fq::mul(scalar % q, data_[i], q);
    return out;
}

bool Matrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](std::uint64_t v) { return v == 0; });
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    if (a.field() != b.field())
        throw ValidationError("matrices belong to different fields");
    if (a.cols() != b.rows())
        throw ValidationError("inner dimensions do not match");
    const std::uint64_t q = a.modulus();
    Matrix out(a.rows(), b.cols(), a.field());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const std::uint64_t aik = a.raw(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out.set_raw(i, j, fq::add(out.raw(i, j), fq::mul(aik, b.raw(k, j), q), q));
            }
        }
    }
    return out;
}

PartitionSpec::PartitionSpec(std::size_t m_, std::size_t p_, std::size_t n_) : m(m_), p(p_), n(n_) {
    if (m == 0 || p == 0 || n == 0)
        throw ValidationError("partition parameters must be at least 1");
}

BlockGrid partition(const Matrix& mat, const PartitionSpec& spec, Side side) {
    const std::size_t gr = side == Side::A ? spec.m : spec.p;
    const std::size_t gc = side == Side::A ? spec.p : spec.n;
    if (mat.rows() % gr != 0 || mat.cols() % gc != 0)
        throw ValidationError("partition parameters do not divide the matrix dimensions");
    const std::size_t br = mat.rows() / gr;
    const std::size_t bc = mat.cols() / gc;
    BlockGrid grid;
    grid.grid_rows = gr;
    grid.grid_cols = gc;
    grid.blocks.reserve(gr * gc);
    for (std::size_t r = 0; r < gr; ++r)
        for (std::size_t c = 0; c < gc; ++c)
            grid.blocks.emplace_back(mat, r * br, c * bc, br, bc);
    return grid;
}

Matrix BlockView::to_matrix() const {
    Matrix out(rows_, cols_, parent_->field());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            out.set_raw(r, c, raw(r, c));
    return out;
}

Matrix block_linear_combination(std::span<const BlockView> blocks,
                                std::span<const FieldElement> coeffs) {
    if (blocks.empty())
        throw ValidationError("empty block list");
    if (blocks.size() != coeffs.size())
        throw ValidationError("block and coefficient counts differ");
    const FieldConfig field = blocks.front().field();
    const std::size_t rows = blocks.front().rows();
    const std::size_t cols = blocks.front().cols();
    const std::uint64_t q = field.modulus();
    Matrix out(rows, cols, field);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const BlockView& blk = blocks[i];
        if (blk.rows() != rows || blk.cols() != cols || blk.field() != field)
            throw ValidationError("blocks in linear combination have mismatched shapes");
        if (coeffs[i].modulus() != q)
            throw ValidationError("coefficient belongs to a different field");
        const std::uint64_t s = coeffs[i].value();
        if (s == 0) continue;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                out.set_raw(r, c, fq::add(out.raw(r, c), fq::mul(s, blk.raw(r, c), q), q));
    }
    return out;
}

Matrix assemble_blocks(std::span<const Matrix> blocks, std::size_t grid_rows, std::size_t grid_cols) {
    if (blocks.size() != grid_rows * grid_cols || blocks.empty())
        throw ValidationError("block count does not match grid shape");
    const std::size_t br = blocks.front().rows();
    const std::size_t bc = blocks.front().cols();
    Matrix out(grid_rows * br, grid_cols * bc, blocks.front().field());
    for (std::size_t gr = 0; gr < grid_rows; ++gr) {
        for (std::size_t gc = 0; gc < grid_cols; ++gc) {
            const Matrix& blk = blocks[gr * grid_cols + gc];
            if (blk.rows() != br || blk.cols() != bc)
                throw ValidationError("blocks have mismatched shapes");
            for (std::size_t r = 0; r < br; ++r)
                for (std::size_t c = 0; c < bc; ++c)
                    out.set_raw(gr * br + r, gc * bc + c, blk.raw(r, c));
        }
    }
    return out;
}

Matrix zero_pad(const Matrix& mat, std::size_t rows, std::size_t cols) {
    if (rows < mat.rows() || cols < mat.cols())
        throw ValidationError("zero_pad cannot shrink a matrix");
    Matrix out(rows, cols, mat.field());
    for (std::size_t r = 0; r < mat.rows(); ++r)
        for (std::size_t c = 0; c < mat.cols(); ++c) out.set_raw(r, c, mat.raw(r, c));
    return out;
}

namespace {

constexpr std::array<char, 4> kMagic = {'F', 'Q', 'M', 'X'};
constexpr std::uint8_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> buf;
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
    std::array<char, 8> buf;
    in.read(buf.data(), 8);
    if (!in) throw ValidationError("truncated FQMX stream");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
}

} // namespace

void write_fqmx(std::ostream& out, const Matrix& mat) {
    out.write(kMagic.data(), kMagic.size());
    out.put(static_cast<char>(kVersion));
    put_u64(out, mat.modulus());
    put_u64(out, mat.rows());
    put_u64(out, mat.cols());
    for (std::uint64_t v : mat.data()) put_u64(out, v);
}

Matrix read_fqmx(std::istream& in) {
    std::array<char, 4> magic;
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic)
        throw ValidationError("not an FQMX stream (bad magic)");
    const int version = in.get();
    if (version != kVersion)
        throw ValidationError("unsupported FQMX version");
    const std::uint64_t q = get_u64(in);
    const std::uint64_t rows = get_u64(in);
    const std::uint64_t cols = get_u64(in);
    FieldConfig field(q);
    if (rows == 0 || cols == 0)
        throw ValidationError("FQMX matrix has empty shape");
    Matrix out(rows, cols, field);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const std::uint64_t v = get_u64(in);
            if (v >= q) throw ValidationError("FQMX entry out of field range");
            out.set_raw(r, c, v);
        }
    return out;
}

void write_fqmx_file(const std::string& path, const Matrix& mat) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    write_fqmx(out, mat);
}

Matrix read_fqmx_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    return read_fqmx(in);
}

} // namespace copmm
