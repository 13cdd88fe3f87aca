#include "copmm/bilinear.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace copmm {

namespace {

constexpr std::size_t kMaxComposedRank = 1 << 14;

void validate_shape(const BilinearTensor& t) {
    if (t.m == 0 || t.p == 0 || t.n == 0 || t.R == 0)
        throw ValidationError("tensor shape and rank must be at least 1");
    if (t.a.size() != t.R * t.m * t.p || t.b.size() != t.R * t.p * t.n || t.c.size() != t.R * t.m * t.n)
        throw ValidationError("tensor entry arrays do not match shape and rank");
}

} // namespace

BilinearTensor naive_tensor(std::size_t m, std::size_t p, std::size_t n) {
    if (m == 0 || p == 0 || n == 0)
        throw ValidationError("tensor shape parameters must be at least 1");
    BilinearTensor t;
    t.m = m; t.p = p; t.n = n; t.R = m * p * n;
    t.a.assign(t.R * m * p, 0);
    t.b.assign(t.R * p * n, 0);
    t.c.assign(t.R * m * n, 0);
    std::size_t r = 0;
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < p; ++l)
            for (std::size_t j = 0; j < n; ++j, ++r) {
                t.a_ref(r, k, l) = 1;
                t.b_ref(r, l, j) = 1;
                t.c_ref(r, k, j) = 1;
            }
    return t;
}

BilinearTensor strassen_tensor() {
    BilinearTensor t;
    t.m = t.p = t.n = 2;
    t.R = 7;
    t.a.assign(7 * 4, 0);
    t.b.assign(7 * 4, 0);
    t.c.assign(7 * 4, 0);

    // A_1 = A11+A22, A_2 = A21+A22, A_3 = A11, A_4 = A22,
    // A_5 = A11+A12, A_6 = A21-A11, A_7 = A12-A22.
    const std::int64_t A[7][2][2] = {
        {{1, 0}, {0, 1}}, {{0, 0}, {1, 1}}, {{1, 0}, {0, 0}}, {{0, 0}, {0, 1}},
        {{1, 1}, {0, 0}}, {{-1, 0}, {1, 0}}, {{0, 1}, {0, -1}},
    };
    // B_1 = B11+B22, B_2 = B11, B_3 = B12-B22, B_4 = B21-B11,
    // B_5 = B22, B_6 = B11+B12, B_7 = B21+B22.
    const std::int64_t B[7][2][2] = {
        {{1, 0}, {0, 1}}, {{1, 0}, {0, 0}}, {{0, 1}, {0, -1}}, {{-1, 0}, {1, 0}},
        {{0, 0}, {0, 1}}, {{1, 1}, {0, 0}}, {{0, 0}, {1, 1}},
    };
    // C11 = M1+M4-M5+M7, C12 = M3+M5, C21 = M2+M4, C22 = M1-M2+M3+M6.
    const std::int64_t C[7][2][2] = {
        {{1, 0}, {0, 1}}, {{0, 0}, {1, -1}}, {{0, 1}, {0, 1}}, {{1, 0}, {1, 0}},
        {{-1, 1}, {0, 0}}, {{0, 0}, {0, 1}}, {{1, 0}, {0, 0}},
    };
    for (std::size_t r = 0; r < 7; ++r)
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                t.a_ref(r, i, j) = A[r][i][j];
                t.b_ref(r, i, j) = B[r][i][j];
                t.c_ref(r, i, j) = C[r][i][j];
            }
    return t;
}

BilinearTensor kronecker_compose(const BilinearTensor& t1, const BilinearTensor& t2) {
    validate_shape(t1);
    validate_shape(t2);
    if (t1.R * t2.R > kMaxComposedRank)
        throw ValidationError("composed tensor rank exceeds the configured limit");
    BilinearTensor t;
    t.m = t1.m * t2.m; t.p = t1.p * t2.p; t.n = t1.n * t2.n;
    t.R = t1.R * t2.R;
    t.a.assign(t.R * t.m * t.p, 0);
    t.b.assign(t.R * t.p * t.n, 0);
    t.c.assign(t.R * t.m * t.n, 0);
    for (std::size_t r1 = 0; r1 < t1.R; ++r1)
        for (std::size_t r2 = 0; r2 < t2.R; ++r2) {
            const std::size_t r = r1 * t2.R + r2;
            for (std::size_t k1 = 0; k1 < t1.m; ++k1)
                for (std::size_t k2 = 0; k2 < t2.m; ++k2) {
                    const std::size_t k = k1 * t2.m + k2;
                    for (std::size_t l1 = 0; l1 < t1.p; ++l1)
                        for (std::size_t l2 = 0; l2 < t2.p; ++l2)
                            t.a_ref(r, k, l1 * t2.p + l2) = t1.a_at(r1, k1, l1) * t2.a_at(r2, k2, l2);
                    for (std::size_t j1 = 0; j1 < t1.n; ++j1)
                        for (std::size_t j2 = 0; j2 < t2.n; ++j2)
                            t.c_ref(r, k, j1 * t2.n + j2) = t1.c_at(r1, k1, j1) * t2.c_at(r2, k2, j2);
                }
            for (std::size_t l1 = 0; l1 < t1.p; ++l1)
                for (std::size_t l2 = 0; l2 < t2.p; ++l2) {
                    const std::size_t l = l1 * t2.p + l2;
                    for (std::size_t j1 = 0; j1 < t1.n; ++j1)
                        for (std::size_t j2 = 0; j2 < t2.n; ++j2)
                            t.b_ref(r, l, j1 * t2.n + j2) = t1.b_at(r1, l1, j1) * t2.b_at(r2, l2, j2);
                }
        }
    return t;
}

namespace {

// Exact expansion of the recombination identity over formal block symbols:
// for every (k,j), the coefficient of A_{k',l'} B_{l'',j'} must be the
// indicator of k'=k, j'=j, l'=l''. Integer arithmetic, so a pass here is
// valid over every field.
bool symbolic_verify(const BilinearTensor& t, std::string& failure) {
    for (std::size_t k = 0; k < t.m; ++k)
        for (std::size_t j = 0; j < t.n; ++j)
            for (std::size_t ka = 0; ka < t.m; ++ka)
                for (std::size_t la = 0; la < t.p; ++la)
                    for (std::size_t lb = 0; lb < t.p; ++lb)
                        for (std::size_t jb = 0; jb < t.n; ++jb) {
                            __int128 coeff = 0;
                            for (std::size_t r = 0; r < t.R; ++r)
                                coeff += static_cast<__int128>(t.c_at(r, k, j))
                                         * t.a_at(r, ka, la) * t.b_at(r, lb, jb);
                            const __int128 want = (ka == k && jb == j && la == lb) ? 1 : 0;
                            if (coeff != want) {
                                std::ostringstream os;
                                os << "symbolic coefficient of A[" << ka + 1 << "," << la + 1
                                   << "]*B[" << lb + 1 << "," << jb + 1 << "] in C[" << k + 1
                                   << "," << j + 1 << "] is " << static_cast<long long>(coeff)
                                   << ", expected " << static_cast<long long>(want);
                                failure = os.str();
                                return false;
                            }
                        }
    return true;
}

} // namespace

TensorCheckReport verify_tensor(const BilinearTensor& t, std::size_t trials,
                                const FieldConfig& field, std::uint64_t seed) {
    validate_shape(t);
    if (trials == 0)
        throw ValidationError("verify_tensor needs at least one trial");
    TensorCheckReport report;

    SplitMix64 rng(seed);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Matrix A = Matrix::random(t.m, t.p, field, rng);
        Matrix B = Matrix::random(t.p, t.n, field, rng);
        const BlockGrid ga = partition(A, PartitionSpec(t.m, t.p, t.n), Side::A);
        const BlockGrid gb = partition(B, PartitionSpec(t.m, t.p, t.n), Side::B);
        const std::vector<Matrix> batch_a = batch_encode_A(ga, t);
        const std::vector<Matrix> batch_b = batch_encode_B(gb, t);
        std::vector<Matrix> products;
        products.reserve(t.R);
        for (std::size_t r = 0; r < t.R; ++r)
            products.push_back(mat_mul(batch_a[r], batch_b[r]));
        const Matrix got = assemble_blocks(recombine(products, t), t.m, t.n);
        const Matrix want = mat_mul(A, B);
        report.trials_run = trial + 1;
        if (got != want) {
            std::ostringstream os;
            os << "random trial " << trial + 1 << " over q=" << field.modulus()
               << ": recombination differs from the direct product";
            report.failure = os.str();
            return report;
        }
    }

    if (t.m * t.p * t.n <= 64) {
        report.symbolic_checked = true;
        if (!symbolic_verify(t, report.failure)) return report;
    }
    report.ok = true;
    return report;
}

std::vector<Matrix> batch_encode_A(const BlockGrid& blocks, const BilinearTensor& t) {
    if (blocks.grid_rows != t.m || blocks.grid_cols != t.p)
        throw ValidationError("A-side grid shape does not match tensor shape");
    const FieldConfig field = blocks.blocks.front().field();
    const std::uint64_t q = field.modulus();
    std::vector<Matrix> out;
    out.reserve(t.R);
    for (std::size_t r = 0; r < t.R; ++r) {
        Matrix acc(blocks.block_rows(), blocks.block_cols(), field);
        for (std::size_t k = 0; k < t.m; ++k)
            for (std::size_t l = 0; l < t.p; ++l) {
                const std::uint64_t s = fq::embed_signed(t.a_at(r, k, l), q);
                if (s == 0) continue;
                acc.add_scaled(blocks.at(k, l).to_matrix(), s);
            }
        out.push_back(std::move(acc));
    }
    return out;
}

std::vector<Matrix> batch_encode_B(const BlockGrid& blocks, const BilinearTensor& t) {
    if (blocks.grid_rows != t.p || blocks.grid_cols != t.n)
        throw ValidationError("B-side grid shape does not match tensor shape");
    const FieldConfig field = blocks.blocks.front().field();
    const std::uint64_t q = field.modulus();
    std::vector<Matrix> out;
    out.reserve(t.R);
    for (std::size_t r = 0; r < t.R; ++r) {
        Matrix acc(blocks.block_rows(), blocks.block_cols(), field);
        for (std::size_t l = 0; l < t.p; ++l)
            for (std::size_t j = 0; j < t.n; ++j) {
                const std::uint64_t s = fq::embed_signed(t.b_at(r, l, j), q);
                if (s == 0) continue;
                acc.add_scaled(blocks.at(l, j).to_matrix(), s);
            }
        out.push_back(std::move(acc));
    }
    return out;
}

std::vector<Matrix> recombine(std::span<const Matrix> products, const BilinearTensor& t) {
    if (products.size() != t.R)
        throw ValidationError("product count does not match tensor rank");
    const FieldConfig field = products.front().field();
    const std::uint64_t q = field.modulus();
    std::vector<Matrix> grid;
    grid.reserve(t.m * t.n);
    for (std::size_t k = 0; k < t.m; ++k)
        for (std::size_t j = 0; j < t.n; ++j) {
            Matrix acc(products.front().rows(), products.front().cols(), field);
            for (std::size_t r = 0; r < t.R; ++r) {
                const std::uint64_t s = fq::embed_signed(t.c_at(r, k, j), q);
                if (s == 0) continue;
                acc.add_scaled(products[r], s);
            }
            grid.push_back(std::move(acc));
        }
    return grid;
}

BilinearTensor tensor_from_json(const nlohmann::json& j) {
    BilinearTensor t;
    try {
        t.m = j.at("m").get<std::size_t>();
        t.p = j.at("p").get<std::size_t>();
        t.n = j.at("n").get<std::size_t>();
        t.R = j.at("R").get<std::size_t>();
        const auto read_array = [&](const char* name, std::size_t rows, std::size_t cols,
                                    std::vector<std::int64_t>& out) {
            const auto& arr = j.at(name);
            if (!arr.is_array() || arr.size() != t.R)
                throw ValidationError(std::string("tensor field ") + name + " must have R slices");
            out.reserve(t.R * rows * cols);
            for (const auto& slice : arr) {
                if (!slice.is_array() || slice.size() != rows)
                    throw ValidationError(std::string("tensor field ") + name + " slice has wrong row count");
                for (const auto& row : slice) {
                    if (!row.is_array() || row.size() != cols)
                        throw ValidationError(std::string("tensor field ") + name + " row has wrong length");
                    for (const auto& v : row) out.push_back(v.get<std::int64_t>());
                }
            }
        };
        read_array("a", t.m, t.p, t.a);
        read_array("b", t.p, t.n, t.b);
        read_array("c", t.m, t.n, t.c);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed tensor JSON: ") + e.what());
    }
    validate_shape(t);
    return t;
}

nlohmann::json tensor_to_json(const BilinearTensor& t) {
    nlohmann::json j;
    j["m"] = t.m; j["p"] = t.p; j["n"] = t.n; j["R"] = t.R;
    const auto write_array = [&](const char* name, std::size_t rows, std::size_t cols,
                                 const std::vector<std::int64_t>& data) {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t r = 0; r < t.R; ++r) {
            nlohmann::json slice = nlohmann::json::array();
            for (std::size_t i = 0; i < rows; ++i) {
                nlohmann::json row = nlohmann::json::array();
                for (std::size_t k = 0; k < cols; ++k) row.push_back(data[(r * rows + i) * cols + k]);
                slice.push_back(std::move(row));
            }
            arr.push_back(std::move(slice));
        }
        j[name] = std::move(arr);
    };
    write_array("a", t.m, t.p, t.a);
    write_array("b", t.p, t.n, t.b);
    write_array("c", t.m, t.n, t.c);
    return j;
}

BilinearTensor load_tensor_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open tensor file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed tensor JSON: ") + e.what());
    }
    return tensor_from_json(j);
}

} // namespace copmm
