#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "copmm/matrix.hpp"

#include <nlohmann/json_fwd.hpp>

namespace copmm {

/// Rank-R tensor triple (a, b, c) realizing (m,p,n) block matrix
/// multiplication as R elementary block products:
///   sum_r c[r][k][j] * (sum a[r][k'][l'] A_{k',l'}) (sum b[r][l'][j'] B_{l',j'}) = C_{k,j}.
/// Entries are small signed integers and embed into any prime field mod q.
struct BilinearTensor {
    std::size_t m = 0, p = 0, n = 0, R = 0;
    std::vector<std::int64_t> a; // [R][m][p]
    std::vector<std::int64_t> b; // [R][p][n]
    std::vector<std::int64_t> c; // [R][m][n]

    std::int64_t a_at(std::size_t r, std::size_t k, std::size_t l) const { return a[(r * m + k) * p + l]; }
    std::int64_t b_at(std::size_t r, std::size_t l, std::size_t j) const { return b[(r * p + l) * n + j]; }
    std::int64_t c_at(std::size_t r, std::size_t k, std::size_t j) const { return c[(r * m + k) * n + j]; }
    std::int64_t& a_ref(std::size_t r, std::size_t k, std::size_t l) { return a[(r * m + k) * p + l]; }
    std::int64_t& b_ref(std::size_t r, std::size_t l, std::size_t j) { return b[(r * p + l) * n + j]; }
    std::int64_t& c_ref(std::size_t r, std::size_t k, std::size_t j) { return c[(r * m + k) * n + j]; }
};

/// Canonical rank m*p*n realization: term r picks exactly one (k,l,j) triple.
BilinearTensor naive_tensor(std::size_t m, std::size_t p, std::size_t n);

/// Strassen's (2,2,2) construction with R = 7.
BilinearTensor strassen_tensor();

/// Tensor product: shape (m1*m2, p1*p2, n1*n2), rank R1*R2. Composing Strassen
/// with itself yields the (4,4,4) rank-49 construction.
BilinearTensor kronecker_compose(const BilinearTensor& t1, const BilinearTensor& t2);

struct TensorCheckReport {
    bool ok = false;
    bool symbolic_checked = false; // exact multilinear expansion ran (mpn <= 64)
    std::size_t trials_run = 0;
    std::string failure; // first counterexample description when !ok

    explicit operator bool() const { return ok; }
};

/// Randomized scalar-block screening plus, for mpn <= 64, a decisive symbolic
/// expansion of both sides over formal block symbols.
TensorCheckReport verify_tensor(const BilinearTensor& t, std::size_t trials,
                                const FieldConfig& field, std::uint64_t seed = 0xb17e);

/// A_r = sum_{k,l} a[r][k][l] A_{k,l} for r in [R] (and the B-side analogue).
std::vector<Matrix> batch_encode_A(const BlockGrid& blocks, const BilinearTensor& t);
std::vector<Matrix> batch_encode_B(const BlockGrid& blocks, const BilinearTensor& t);

/// C_{k,j} = sum_r c[r][k][j] * products[r]; returns the m x n grid row-major.
std::vector<Matrix> recombine(std::span<const Matrix> products, const BilinearTensor& t);

// JSON object {"m","p","n","R","a","b","c"} with a/b/c indexed [r][row][col].
BilinearTensor tensor_from_json(const nlohmann::json& j);
nlohmann::json tensor_to_json(const BilinearTensor& t);
BilinearTensor load_tensor_file(const std::string& path);

} // namespace copmm
