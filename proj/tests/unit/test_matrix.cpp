#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "copmm/matrix.hpp"

using namespace copmm;

namespace {
const FieldConfig f7(7);
const FieldConfig f101(101);
}

TEST_CASE("partition shapes") {
    Matrix m44(4, 4, f7);
    BlockGrid g = partition(m44, PartitionSpec(2, 2, 2), Side::A);
    CHECK(g.blocks.size() == 4);
    CHECK(g.block_rows() == 2);
    CHECK(g.block_cols() == 2);

    Matrix m64(6, 4, f7);
    BlockGrid g2 = partition(m64, PartitionSpec(3, 2, 1), Side::A);
    CHECK(g2.blocks.size() == 6);
    CHECK(g2.block_rows() == 2);
    CHECK(g2.block_cols() == 2);

    Matrix m54(5, 4, f7);
    CHECK_THROWS_AS(partition(m54, PartitionSpec(2, 2, 2), Side::A), ValidationError);
}

TEST_CASE("partition covers the matrix disjointly") {
    SplitMix64 rng(3);
    Matrix m = Matrix::random(6, 6, f101, rng);
    for (std::size_t gm : {1, 2, 3}) {
        for (std::size_t gp : {1, 2, 3}) {
            BlockGrid g = partition(m, PartitionSpec(gm, gp, 1), Side::A);
            std::vector<Matrix> blocks;
            for (const BlockView& b : g.blocks) blocks.push_back(b.to_matrix());
            CHECK(assemble_blocks(blocks, gm, gp) == m);
        }
    }
}

TEST_CASE("mat_mul basics") {
    Matrix I = Matrix::identity(3, f7);
    SplitMix64 rng(5);
    Matrix B = Matrix::random(3, 4, f7, rng);
    CHECK(mat_mul(I, B) == B);
    Matrix Z(4, 2, f7);
    CHECK(mat_mul(B, Z).is_zero());

    // hand-computed mod 7: [[1,2],[3,4]] * [[5,6],[0,1]] = [[5,1],[1,1]]
    const std::uint64_t av[] = {1, 2, 3, 4}, bv[] = {5, 6, 0, 1}, cv[] = {5, 1, 1, 1};
    Matrix A2 = Matrix::from_values(2, 2, f7, av);
    Matrix B2 = Matrix::from_values(2, 2, f7, bv);
    CHECK(mat_mul(A2, B2) == Matrix::from_values(2, 2, f7, cv));

    CHECK_THROWS_AS(mat_mul(A2, Z), ValidationError);
}

TEST_CASE("block multiplication agrees with mat_mul") {
    SplitMix64 rng(11);
    for (const auto [m, p, n] : {std::array<std::size_t, 3>{2, 2, 2},
                                 std::array<std::size_t, 3>{3, 2, 1},
                                 std::array<std::size_t, 3>{1, 3, 2}}) {
        Matrix A = Matrix::random(m * 2, p * 3, f101, rng);
        Matrix B = Matrix::random(p * 3, n * 2, f101, rng);
        PartitionSpec spec(m, p, n);
        BlockGrid ga = partition(A, spec, Side::A);
        BlockGrid gb = partition(B, spec, Side::B);
        std::vector<Matrix> cells;
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t j = 0; j < n; ++j) {
                Matrix acc(ga.block_rows(), gb.block_cols(), f101);
                for (std::size_t l = 0; l < p; ++l)
                    acc += mat_mul(ga.at(k, l).to_matrix(), gb.at(l, j).to_matrix());
                cells.push_back(std::move(acc));
            }
        CHECK(assemble_blocks(cells, m, n) == mat_mul(A, B));
    }
}

TEST_CASE("block linear combination") {
    SplitMix64 rng(13);
    Matrix m = Matrix::random(4, 4, f7, rng);
    BlockGrid g = partition(m, PartitionSpec(2, 2, 1), Side::A);

    std::vector<FieldElement> zeros(4, FieldElement(0, f7));
    CHECK(block_linear_combination(g.blocks, zeros).is_zero());

    std::vector<BlockView> one{g.at(0, 0)};
    std::vector<FieldElement> unit{FieldElement(1, f7)};
    CHECK(block_linear_combination(one, unit) == g.at(0, 0).to_matrix());

    // two 1x1 blocks [3],[4], coeffs 2,5 over q=7 -> 6+20 mod 7 = 5
    const std::uint64_t a3[] = {3}, a4[] = {4};
    Matrix b3 = Matrix::from_values(1, 1, f7, a3);
    Matrix b4 = Matrix::from_values(1, 1, f7, a4);
    std::vector<BlockView> two{BlockView(b3, 0, 0, 1, 1), BlockView(b4, 0, 0, 1, 1)};
    std::vector<FieldElement> coeffs{FieldElement(2, f7), FieldElement(5, f7)};
    CHECK(block_linear_combination(two, coeffs).raw(0, 0) == 5);

    CHECK_THROWS_AS(block_linear_combination(std::span<const BlockView>{},
                                             std::span<const FieldElement>{}),
                    ValidationError);
}

TEST_CASE("fqmx round trip and rejects") {
    SplitMix64 rng(17);
    Matrix m = Matrix::random(3, 5, FieldConfig(2147483647ULL), rng);
    std::stringstream buf;
    write_fqmx(buf, m);
    CHECK(read_fqmx(buf) == m);

    std::stringstream bad("not a matrix at all");
    CHECK_THROWS_AS(read_fqmx(bad), ValidationError);

    std::stringstream truncated;
    write_fqmx(truncated, m);
    std::string s = truncated.str();
    s.resize(s.size() / 2);
    std::stringstream half(s);
    CHECK_THROWS_AS(read_fqmx(half), ValidationError);
}

TEST_CASE("fqmx file io") {
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "copmm_test_matrix.fqmx";
    SplitMix64 rng(19);
    Matrix m = Matrix::random(2, 2, f101, rng);
    write_fqmx_file(path.string(), m);
    CHECK(read_fqmx_file(path.string()) == m);
    std::filesystem::remove(path);
}
