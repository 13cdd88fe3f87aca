#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "copmm/bilinear.hpp"

#include <nlohmann/json.hpp>

using namespace copmm;

namespace {
const FieldConfig f101(101);
const FieldConfig mers(2147483647ULL);
}

TEST_CASE("naive tensor shapes") {
    BilinearTensor t1 = naive_tensor(1, 1, 1);
    CHECK(t1.R == 1);
    CHECK(t1.a == std::vector<std::int64_t>{1});
    CHECK(t1.b == std::vector<std::int64_t>{1});
    CHECK(t1.c == std::vector<std::int64_t>{1});

    CHECK(naive_tensor(2, 2, 2).R == 8);
    CHECK(verify_tensor(naive_tensor(3, 3, 3), 20, f101));
    CHECK(verify_tensor(naive_tensor(2, 1, 2), 20, f101));
}

TEST_CASE("strassen identity blocks") {
    BilinearTensor t = strassen_tensor();
    CHECK(t.R == 7);
    // scalar blocks: A = I2, arbitrary B -> recombination yields B
    const std::uint64_t iv[] = {1, 0, 0, 1}, bv[] = {12, 34, 56, 78};
    Matrix A = Matrix::from_values(2, 2, f101, iv);
    Matrix B = Matrix::from_values(2, 2, f101, bv);
    BlockGrid ga = partition(A, PartitionSpec(2, 2, 2), Side::A);
    BlockGrid gb = partition(B, PartitionSpec(2, 2, 2), Side::B);
    auto batch_a = batch_encode_A(ga, t);
    auto batch_b = batch_encode_B(gb, t);
    std::vector<Matrix> products;
    for (std::size_t r = 0; r < 7; ++r) products.push_back(mat_mul(batch_a[r], batch_b[r]));
    CHECK(assemble_blocks(recombine(products, t), 2, 2) == B);
}

TEST_CASE("strassen batch and recombination rows") {
    BilinearTensor t = strassen_tensor();
    // A_1 = A11 + A22
    CHECK(t.a_at(0, 0, 0) == 1);
    CHECK(t.a_at(0, 1, 1) == 1);
    CHECK(t.a_at(0, 0, 1) == 0);
    CHECK(t.a_at(0, 1, 0) == 0);
    // C21 picks up exactly M2 + M4
    for (std::size_t r = 0; r < 7; ++r)
        CHECK(t.c_at(r, 1, 0) == ((r == 1 || r == 3) ? 1 : 0));
    // C12 = M3 + M5
    for (std::size_t r = 0; r < 7; ++r)
        CHECK(t.c_at(r, 0, 1) == ((r == 2 || r == 4) ? 1 : 0));

    SplitMix64 rng(7);
    Matrix A = Matrix::random(2, 2, f101, rng);
    BlockGrid ga = partition(A, PartitionSpec(2, 2, 2), Side::A);
    auto batch = batch_encode_A(ga, t);
    CHECK(batch[0].raw(0, 0) == (A.at(0, 0) + A.at(1, 1)).value());

    // all-zero blocks stay zero
    Matrix Z(2, 2, f101);
    auto zero_batch = batch_encode_A(partition(Z, PartitionSpec(2, 2, 2), Side::A), t);
    for (const Matrix& m : zero_batch) CHECK(m.is_zero());
}

TEST_CASE("strassen equals mat_mul on random scalar blocks") {
    CHECK(verify_tensor(strassen_tensor(), 100, f101, 424242));
}

TEST_CASE("verify_tensor catches corruption") {
    BilinearTensor bad = strassen_tensor();
    bad.c_ref(3, 0, 0) = 0; // C11 loses M4
    TensorCheckReport report = verify_tensor(bad, 50, f101);
    CHECK_FALSE(report.ok);
    CHECK_FALSE(report.failure.empty());

    // a corruption invisible to a few random trials is still caught symbolically
    BilinearTensor bad2 = strassen_tensor();
    bad2.a_ref(6, 0, 0) = 2;
    TensorCheckReport r2 = verify_tensor(bad2, 1, f101);
    CHECK_FALSE(r2.ok);
}

TEST_CASE("kronecker composition") {
    BilinearTensor unit = naive_tensor(1, 1, 1);
    BilinearTensor s = strassen_tensor();
    BilinearTensor left = kronecker_compose(unit, s);
    CHECK(left.m == 2);
    CHECK(left.R == 7);
    CHECK(left.a == s.a);
    CHECK(left.b == s.b);
    CHECK(left.c == s.c);

    BilinearTensor s2 = kronecker_compose(s, s);
    CHECK(s2.m == 4);
    CHECK(s2.p == 4);
    CHECK(s2.n == 4);
    CHECK(s2.R == 49);
    CHECK(verify_tensor(s2, 25, mers));

    BilinearTensor mixed = kronecker_compose(s, naive_tensor(1, 2, 1));
    CHECK(mixed.m == 2);
    CHECK(mixed.p == 4);
    CHECK(mixed.n == 2);
    CHECK(mixed.R == 14);
    CHECK(verify_tensor(mixed, 25, f101));
}

TEST_CASE("tensor json round trip and validation") {
    BilinearTensor t = strassen_tensor();
    nlohmann::json j = tensor_to_json(t);
    BilinearTensor back = tensor_from_json(j);
    CHECK(back.R == 7);
    CHECK(back.a == t.a);
    CHECK(back.b == t.b);
    CHECK(back.c == t.c);

    nlohmann::json broken = j;
    broken["R"] = 6;
    CHECK_THROWS_AS(tensor_from_json(broken), ValidationError);
    nlohmann::json missing = j;
    missing.erase("c");
    CHECK_THROWS_AS(tensor_from_json(missing), ValidationError);

    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "copmm_test_tensor.json";
    {
        std::ofstream out(path);
        out << j;
    }
    BilinearTensor loaded = load_tensor_file(path.string());
    CHECK(verify_tensor(loaded, 10, f101));
    std::filesystem::remove(path);
}

TEST_CASE("verify_tensor on larger random instances matches the oracle") {
    // rank-product composition of valid tensors stays valid
    BilinearTensor t = kronecker_compose(naive_tensor(2, 1, 2), strassen_tensor());
    CHECK(t.m == 4);
    CHECK(t.p == 2);
    CHECK(t.n == 4);
    CHECK(t.R == 28);
    CHECK(verify_tensor(t, 30, f101));
}
