#include "doctest.h"

#include "copmm/private_mm.hpp"

#include <nlohmann/json.hpp>

using namespace copmm;

namespace {

const FieldConfig mers(2147483647ULL);
const FieldConfig f101(101);

MatrixLibrary random_library(std::size_t count, std::size_t rows, std::size_t cols,
                             const FieldConfig& field, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Matrix> mats;
    for (std::size_t i = 0; i < count; ++i) mats.push_back(Matrix::random(rows, cols, field, rng));
    return MatrixLibrary(std::move(mats));
}

} // namespace

TEST_CASE("library validation") {
    SplitMix64 rng(1);
    std::vector<Matrix> mats;
    mats.push_back(Matrix::random(2, 2, f101, rng));
    mats.push_back(Matrix::random(2, 3, f101, rng));
    CHECK_THROWS_AS(MatrixLibrary(std::move(mats)), ValidationError);
    CHECK_THROWS_AS(MatrixLibrary(std::vector<Matrix>{}), ValidationError);
}

TEST_CASE("psmm poly query structure") {
    DegreeAssignment assign = preset_assignment(PresetVariant::V1, 2, 2, 2, 2);
    EvaluationPoints pts = default_poly_points(f101, 3);
    const std::size_t V = 2;

    SUBCASE("zero noise: undesired entries vanish, desired carry alpha^b") {
        std::vector<std::uint64_t> z(V * 2 * 2 * 2, 0);
        auto queries = psmm_poly_queries(1, assign, V, pts, z, f101);
        REQUIRE(queries.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            REQUIRE(queries[i].size() == V * 4);
            const std::uint64_t alpha = pts.alphas[i].value();
            std::size_t idx = 0;
            for (std::size_t v = 1; v <= V; ++v)
                for (std::size_t l = 0; l < 2; ++l)
                    for (std::size_t j = 0; j < 2; ++j, ++idx) {
                        const std::uint64_t want =
                            v == 1 ? fq::pow(alpha, assign.b_at(l, j), 101) : 0;
                        CHECK(queries[i][idx] == want);
                    }
        }
    }

    SUBCASE("worked-example form: q^(1) = alpha^b + z1*alpha^4 + z2*alpha^5") {
        std::vector<std::uint64_t> z(V * 2 * 2 * 2);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = (i * 13 + 7) % 101;
        auto queries = psmm_poly_queries(1, assign, V, pts, z, f101);
        for (std::size_t i = 0; i < 3; ++i) {
            const std::uint64_t alpha = pts.alphas[i].value();
            std::size_t idx = 0, zi = 0;
            for (std::size_t l = 0; l < 2; ++l)
                for (std::size_t j = 0; j < 2; ++j, ++idx, zi += 2) {
                    std::uint64_t want = fq::pow(alpha, assign.b_at(l, j), 101);
                    want = fq::add(want, fq::mul(z[zi], fq::pow(alpha, 4, 101), 101), 101);
                    want = fq::add(want, fq::mul(z[zi + 1], fq::pow(alpha, 5, 101), 101), 101);
                    CHECK(queries[i][idx] == want);
                }
        }
    }

    CHECK_THROWS_AS(psmm_poly_queries(0, assign, V, pts, std::vector<std::uint64_t>(16, 0), f101),
                    ValidationError);
    CHECK_THROWS_AS(psmm_poly_queries(3, assign, V, pts, std::vector<std::uint64_t>(16, 0), f101),
                    ValidationError);
}

TEST_CASE("psmm lagrange query structure: basis values at betas") {
    const std::size_t R = 4, T = 1, V = 2;
    // Put betas among the evaluation points so the basis property is visible.
    EvaluationPoints pts;
    for (std::uint64_t r = 1; r <= R + T; ++r) pts.betas.emplace_back(r, f101);
    for (std::uint64_t b = 1; b <= R; ++b) pts.alphas.emplace_back(b, f101);
    std::vector<std::uint64_t> z(V * R * T, 0);
    auto queries = psmm_lagrange_queries(2, R, T, V, pts, z, f101);
    for (std::size_t i = 0; i < R; ++i) {
        std::size_t idx = 0;
        for (std::size_t v = 1; v <= V; ++v)
            for (std::size_t r = 0; r < R; ++r, ++idx) {
                const std::uint64_t want = (v == 2 && r == i) ? 1 : 0;
                CHECK(queries[i][idx] == want);
            }
    }
}

TEST_CASE("worker encoding reduces to the plain encoder with V=1 and zero noise") {
    DegreeAssignment assign = preset_assignment(PresetVariant::V1, 2, 2, 2, 1);
    EvaluationPoints pts = default_poly_points(f101, 4);
    MatrixLibrary lib = random_library(1, 4, 4, f101, 5);
    std::vector<std::uint64_t> z(1 * 2 * 2 * 1, 0);
    auto queries = psmm_poly_queries(1, assign, 1, pts, z, f101);
    const PartitionSpec spec(2, 2, 2);
    BlockGrid gb = partition(lib.at(0), spec, Side::B);
    for (std::size_t i = 0; i < 4; ++i) {
        Matrix got = psmm_worker_encode_B(lib, spec, queries[i]);
        // h with zero B-noise
        Matrix want(gb.block_rows(), gb.block_cols(), f101);
        for (std::size_t l = 0; l < 2; ++l)
            for (std::size_t j = 0; j < 2; ++j)
                want.add_scaled(gb.at(l, j).to_matrix(),
                                fq::pow(pts.alphas[i].value(), assign.b_at(l, j), 101));
        CHECK(got == want);
    }

    // all-zero library encodes to zero
    std::vector<Matrix> zero_mats{Matrix(4, 4, f101)};
    MatrixLibrary zero_lib{std::move(zero_mats)};
    CHECK(psmm_worker_encode_B(zero_lib, spec, queries[0]).is_zero());
}

TEST_CASE("alignment identity: query path equals aligned encoding with explicit Z_t^B") {
    // the central structural claim: the worker's query-built share equals
    // h_B(alpha_i) whose noise blocks are the library-weighted noise sums
    DegreeAssignment assign = preset_assignment(PresetVariant::V1, 2, 2, 2, 2);
    const std::size_t V = 3, N = 6;
    EvaluationPoints pts = default_poly_points(f101, N);
    MatrixLibrary lib = random_library(V, 4, 4, f101, 42);
    SplitMix64 rng(17);
    std::vector<std::uint64_t> z(V * 2 * 2 * 2);
    for (auto& v : z) v = rng.next_below(101);
    const std::size_t theta = 2;
    auto queries = psmm_poly_queries(theta, assign, V, pts, z, f101);
    const PartitionSpec spec(2, 2, 2);

    std::vector<Matrix> zb = aligned_noise_blocks_poly(lib, spec, Side::B, 2, z);
    BlockGrid g_theta = partition(lib.at(theta - 1), spec, Side::B);
    std::vector<Matrix> aligned = encode_poly_shares(g_theta, assign.b, zb, assign.d, pts.alphas);
    for (std::size_t i = 0; i < N; ++i)
        CHECK(psmm_worker_encode_B(lib, spec, queries[i]) == aligned[i]);
}

TEST_CASE("alignment identity in the lagrange family") {
    BilinearTensor tensor = strassen_tensor();
    const std::size_t V = 2, T = 2, N = 5;
    EvaluationPoints pts = default_lagrange_points(f101, N, tensor.R, T);
    MatrixLibrary lib = random_library(V, 4, 4, f101, 43);
    SplitMix64 rng(19);
    std::vector<std::uint64_t> z(V * tensor.R * T);
    for (auto& v : z) v = rng.next_below(101);
    const std::size_t theta = 1;
    auto queries = psmm_lagrange_queries(theta, tensor.R, T, V, pts, z, f101);

    std::vector<Matrix> zb = aligned_noise_blocks_lagrange(lib, tensor, Side::B, T, z);
    BlockGrid g_theta = partition(lib.at(theta - 1), PartitionSpec(2, 2, 2), Side::B);
    std::vector<Matrix> batch = batch_encode_B(g_theta, tensor);
    std::vector<Matrix> aligned = encode_lagrange_shares(batch, zb, pts.betas, pts.alphas);
    for (std::size_t i = 0; i < N; ++i)
        CHECK(lagrange_worker_encode_B(lib, tensor, queries[i]) == aligned[i]);
}

TEST_CASE("fpmm query two-path consistency for the A side") {
    DegreeAssignment assign = preset_assignment(PresetVariant::V2, 2, 2, 2, 1);
    const std::size_t U = 2, N = 4;
    EvaluationPoints pts = default_poly_points(f101, N);
    MatrixLibrary libA = random_library(U, 4, 4, f101, 44);
    SplitMix64 rng(23);
    std::vector<std::uint64_t> zt(U * 2 * 2 * 1);
    for (auto& v : zt) v = rng.next_below(101);
    const std::size_t theta1 = 2;
    auto queries = fpmm_poly_queries_a(theta1, assign, U, pts, zt, f101);
    const PartitionSpec spec(2, 2, 2);

    SUBCASE("zero noise structure") {
        std::vector<std::uint64_t> zeros(zt.size(), 0);
        auto zq = fpmm_poly_queries_a(1, assign, U, pts, zeros, f101);
        for (std::size_t i = 0; i < N; ++i) {
            std::size_t idx = 0;
            for (std::size_t u = 1; u <= U; ++u)
                for (std::size_t k = 0; k < 2; ++k)
                    for (std::size_t l = 0; l < 2; ++l, ++idx) {
                        const std::uint64_t want =
                            u == 1 ? fq::pow(pts.alphas[i].value(), assign.a_at(k, l), 101) : 0;
                        CHECK(zq[i][idx] == want);
                    }
        }
    }

    SUBCASE("query path equals f_A with explicit Z_t^A") {
        std::vector<Matrix> za = aligned_noise_blocks_poly(libA, spec, Side::A, 1, zt);
        BlockGrid g_theta = partition(libA.at(theta1 - 1), spec, Side::A);
        std::vector<Matrix> aligned = encode_poly_shares(g_theta, assign.a, za, assign.c, pts.alphas);
        for (std::size_t i = 0; i < N; ++i)
            CHECK(fpmm_worker_encode_A(libA, spec, queries[i]) == aligned[i]);
    }
}

TEST_CASE("psmm run decodes the selected product (worked-example config)") {
    RunParams params;
    params.family = Family::PolyCode;
    params.m = params.p = params.n = params.T = 2;
    params.N = 17;
    params.seed = 101;
    params.assign = preset_assignment(PresetVariant::V1, 2, 2, 2, 2);
    SplitMix64 rng(55);
    Matrix A = Matrix::random(4, 4, mers, rng);
    std::vector<Matrix> libm;
    libm.push_back(Matrix::random(4, 4, mers, rng));
    libm.push_back(Matrix::random(4, 4, mers, rng));
    MatrixLibrary lib(std::move(libm));

    StrategyRun run = psmm_run(A, lib, 1, params);
    CHECK(run.plan.K == 17);
    REQUIRE(run.decoded.has_value());
    CHECK(*run.decoded == mat_mul(A, lib.at(0)));
    CHECK(run.cost.upload_cost == Rational(17, 4));
    CHECK(run.cost.download_cost == Rational(17, 4));
    CHECK(run.cost.query_scalars_per_worker == 2 * 2 * 2); // V*p*n

    SUBCASE("theta boundary") {
        StrategyRun run2 = psmm_run(A, lib, 2, params);
        CHECK(*run2.decoded == mat_mul(A, lib.at(1)));
    }
    SUBCASE("theta out of range") {
        CHECK_THROWS_AS(psmm_run(A, lib, 3, params), ValidationError);
    }
}

TEST_CASE("psmm lagrange run with strassen, T=2") {
    RunParams params;
    params.family = Family::LagrangeCode;
    params.m = params.p = params.n = 2;
    params.T = 2;
    params.N = 17; // K = 2*7+2*2-1 = 17
    params.seed = 7;
    params.tensor = strassen_tensor();
    SplitMix64 rng(66);
    Matrix A = Matrix::random(4, 6, mers, rng);
    std::vector<Matrix> libm;
    for (int v = 0; v < 3; ++v) libm.push_back(Matrix::random(6, 4, mers, rng));
    MatrixLibrary lib(std::move(libm));

    StrategyRun run = psmm_run(A, lib, 3, params);
    CHECK(run.plan.K == 17);
    CHECK(*run.decoded == mat_mul(A, lib.at(2)));
    CHECK(run.cost.query_scalars_per_worker == 3 * 7); // V*R
}

TEST_CASE("fpmm runs decode the selected pair in both families") {
    SUBCASE("poly V3 at m=p=n=T=1: K = 3") {
        RunParams params;
        params.family = Family::PolyCode;
        params.m = params.p = params.n = params.T = 1;
        params.N = 3;
        params.seed = 3;
        params.assign = preset_assignment(PresetVariant::V3, 1, 1, 1, 1);
        MatrixLibrary libA = random_library(2, 3, 3, f101, 70);
        MatrixLibrary libB = random_library(2, 3, 3, f101, 71);
        StrategyRun run = fpmm_run(libA, libB, 2, 1, params);
        CHECK(run.plan.K == 3);
        CHECK(*run.decoded == mat_mul(libA.at(1), libB.at(0)));
        CHECK(run.cost.upload_is_query_only);
        CHECK(run.cost.query_scalars_per_worker == 2 * 1 * 1 + 2 * 1 * 1); // U*m*p + V*p*n
    }
    SUBCASE("lagrange strassen T=1: K = 15, boundary thetas") {
        RunParams params;
        params.family = Family::LagrangeCode;
        params.m = params.p = params.n = 2;
        params.T = 1;
        params.N = 15;
        params.seed = 4;
        params.tensor = strassen_tensor();
        MatrixLibrary libA = random_library(2, 4, 4, mers, 72);
        MatrixLibrary libB = random_library(3, 4, 4, mers, 73);
        StrategyRun run = fpmm_run(libA, libB, 2, 3, params);
        CHECK(run.plan.K == 15);
        CHECK(*run.decoded == mat_mul(libA.at(1), libB.at(2)));
        CHECK(run.cost.query_scalars_per_worker == (2 + 3) * 7); // (U+V)*R
    }
}

TEST_CASE("response structure: two disjoint K-subsets decode identically") {
    RunParams params;
    params.family = Family::PolyCode;
    params.m = params.p = params.n = params.T = 1;
    params.N = 6; // K = 3
    params.seed = 9;
    SplitMix64 rng(80);
    Matrix A = Matrix::random(2, 2, f101, rng);
    MatrixLibrary lib = random_library(2, 2, 2, f101, 81);
    SeededNoise noise(12);
    StrategyRun run = prepare_psmm(A, lib, 1, params, noise);
    CHECK(run.plan.K == 3);

    StrategyRun first = run;
    const std::size_t s1[] = {1, 2, 3};
    decode_run(first, s1);
    StrategyRun second = run;
    const std::size_t s2[] = {4, 5, 6};
    decode_run(second, s2);
    CHECK(*first.decoded == *second.decoded);
    CHECK(*first.decoded == mat_mul(A, lib.at(0)));
}

TEST_CASE("query sizes are independent of the matrix dimensions") {
    for (std::size_t lambda : {2, 6}) {
        RunParams params;
        params.family = Family::PolyCode;
        params.m = 2; params.p = 1; params.n = 1; params.T = 1;
        params.N = recovery_threshold(ThresholdFamily::PolyMin, 2, 1, 1, 1).K;
        params.seed = 5;
        SplitMix64 rng(90 + lambda);
        Matrix A = Matrix::random(lambda, 3, f101, rng);
        MatrixLibrary lib = random_library(3, 3, 4, f101, 91);
        StrategyRun run = psmm_run(A, lib, 2, params);
        CHECK(run.queries_b.front().size() == 3 * 1 * 1);
        CHECK(*run.decoded == mat_mul(A, lib.at(1)));
    }
}

TEST_CASE("zero privacy noise with V=1 degenerates to the SMM strategy share-for-share") {
    DegreeAssignment assign = preset_assignment(PresetVariant::V1, 2, 2, 2, 1);
    SplitMix64 rng(95);
    Matrix A = Matrix::random(4, 4, f101, rng);
    Matrix B = Matrix::random(4, 4, f101, rng);
    const std::size_t N = 14; // K = (m+1)(np+T)-1 = 14 for V1 at (2,2,2,1)

    RunParams params;
    params.family = Family::PolyCode;
    params.m = params.p = params.n = 2;
    params.T = 1;
    params.N = N;
    params.assign = assign;

    // shared A-side noise block, zero everywhere else
    std::vector<std::uint64_t> za_entries{3, 1, 4, 1}; // (lambda/m)*(omega/p) = 4 entries
    std::vector<std::uint64_t> psmm_noise = za_entries;
    psmm_noise.resize(za_entries.size() + 1 * 2 * 2 * 1, 0); // z^(1)_{l,j,1} = 0
    ExplicitNoise psmm_src(psmm_noise);
    std::vector<Matrix> libm;
    libm.push_back(B);
    MatrixLibrary lib(std::move(libm));
    StrategyRun prun = psmm_run(A, lib, 1, params, psmm_src);

    std::vector<std::uint64_t> smm_noise = za_entries;
    smm_noise.resize(za_entries.size() + 4, 0); // Z^B = 0
    ExplicitNoise smm_src(smm_noise);
    StrategyRun srun = smm_run(A, B, params, smm_src);

    for (std::size_t i = 0; i < N; ++i) {
        CHECK(prun.a_shares[i] == srun.a_shares[i]);
        CHECK(prun.b_shares[i] == srun.b_shares[i]);
        CHECK(prun.responses[i] == srun.responses[i]);
    }
}

TEST_CASE("oracle grid across families and small parameters") {
    // (m,p,n,T) in [1..2]^4, V/U in {1,2,3} gets exercised in the acceptance
    // suite; keep a representative slice in the unit tests.
    SplitMix64 rng(99);
    for (Family family : {Family::PolyCode, Family::LagrangeCode}) {
        for (std::size_t m : {1, 2})
            for (std::size_t V : {1, 3}) {
                RunParams params;
                params.family = family;
                params.m = m; params.p = 2; params.n = 1; params.T = 2;
                const std::size_t R = m * 2 * 1;
                params.N = family == Family::PolyCode
                               ? recovery_threshold(ThresholdFamily::PolyMin, m, 2, 1, 2).K
                               : 2 * R + 2 * 2 - 1;
                params.seed = 1000 + m * 10 + V;
                Matrix A = Matrix::random(m * 2, 4, mers, rng);
                MatrixLibrary lib = random_library(V, 4, 3, mers, 500 + V);
                StrategyRun run = psmm_run(A, lib, V, params);
                CHECK(*run.decoded == mat_mul(A, lib.at(V - 1)));
            }
    }
}

TEST_CASE("transcript json is deterministic for a fixed seed") {
    RunParams params;
    params.family = Family::PolyCode;
    params.m = params.p = params.n = params.T = 1;
    params.N = 3;
    params.seed = 31337;
    SplitMix64 rng(7);
    Matrix A = Matrix::random(2, 2, f101, rng);
    MatrixLibrary lib = random_library(2, 2, 2, f101, 8);
    StrategyRun r1 = psmm_run(A, lib, 1, params);
    StrategyRun r2 = psmm_run(A, lib, 1, params);
    CHECK(run_to_json(r1).dump(2) == run_to_json(r2).dump(2));
    CHECK(run_to_json(r1)["cost"]["upload_cost"] == "3"); // N/(mp) = 3/1
}
