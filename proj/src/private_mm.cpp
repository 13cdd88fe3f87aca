#include "copmm/private_mm.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace copmm {

std::string problem_name(Problem p) {
    switch (p) {
        case Problem::SMM: return "smm";
        case Problem::PSMM: return "psmm";
        case Problem::FPMM: return "fpmm";
    }
    return "?";
}

MatrixLibrary::MatrixLibrary(std::vector<Matrix> mats) : mats_(std::move(mats)) {
    if (mats_.empty())
        throw ValidationError("library must hold at least one matrix");
    for (const Matrix& m : mats_) {
        if (m.rows() != mats_.front().rows() || m.cols() != mats_.front().cols())
            throw ValidationError("library matrices must be identically dimensioned");
        if (m.field() != mats_.front().field())
            throw ValidationError("library matrices must share one field");
    }
}

NoiseLayout noise_layout(Problem problem, const RunParams& params,
                         std::size_t U, std::size_t V,
                         std::size_t lambda, std::size_t omega) {
    NoiseLayout layout;
    const std::size_t block = (lambda / params.m) * (omega / params.p);
    const std::size_t R = params.tensor ? params.tensor->R : params.m * params.p * params.n;
    switch (problem) {
        case Problem::SMM:
            throw ValidationError("the flat noise layout is defined for PSMM and FPMM");
        case Problem::PSMM:
            layout.a_block_scalars = params.T * block;
            layout.b_query_scalars = params.family == Family::PolyCode
                                         ? V * params.p * params.n * params.T
                                         : V * R * params.T;
            break;
        case Problem::FPMM:
            layout.a_query_scalars = params.family == Family::PolyCode
                                         ? U * params.m * params.p * params.T
                                         : U * R * params.T;
            layout.b_query_scalars = params.family == Family::PolyCode
                                         ? V * params.p * params.n * params.T
                                         : V * R * params.T;
            break;
    }
    return layout;
}

namespace {

std::vector<std::uint64_t> draw_scalars(std::size_t count, const FieldConfig& field,
                                        NoiseSource& noise) {
    std::vector<std::uint64_t> out(count);
    for (auto& v : out) v = noise.next_scalar(field);
    return out;
}

std::vector<Matrix> scalars_to_blocks(std::span<const std::uint64_t> scalars, std::size_t count,
                                      std::size_t rows, std::size_t cols, const FieldConfig& field) {
    std::vector<Matrix> out;
    out.reserve(count);
    std::size_t pos = 0;
    for (std::size_t t = 0; t < count; ++t) {
        Matrix z(rows, cols, field);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                z.set_raw(r, c, scalars[pos++]);
        out.push_back(std::move(z));
    }
    return out;
}

void check_theta(std::size_t theta, std::size_t bound, const char* what) {
    if (theta == 0 || theta > bound)
        throw ValidationError(std::string(what) + " index out of range [1.."
                              + std::to_string(bound) + "]");
}

} // namespace

std::vector<std::vector<std::uint64_t>> psmm_poly_queries(
    std::size_t theta, const DegreeAssignment& assign, std::size_t V,
    const EvaluationPoints& points, std::span<const std::uint64_t> z, const FieldConfig& field) {
    check_theta(theta, V, "library");
    const std::size_t T = assign.T;
    if (z.size() != V * assign.p * assign.n * T)
        throw ValidationError("query noise has the wrong length");
    const std::uint64_t q = field.modulus();
    std::vector<std::vector<std::uint64_t>> out(points.alphas.size());
    for (std::size_t i = 0; i < points.alphas.size(); ++i) {
        const std::uint64_t alpha = points.alphas[i].value();
        auto& worker = out[i];
        worker.reserve(V * assign.p * assign.n);
        std::size_t zi = 0;
        for (std::size_t v = 1; v <= V; ++v)
            for (std::size_t l = 0; l < assign.p; ++l)
                for (std::size_t j = 0; j < assign.n; ++j) {
                    std::uint64_t val = 0;
                    for (std::size_t t = 0; t < T; ++t)
                        val = fq::add(val, fq::mul(z[zi + t], fq::pow(alpha, assign.d[t], q), q), q);
                    zi += T;
                    if (v == theta)
                        val = fq::add(val, fq::pow(alpha, assign.b_at(l, j), q), q);
                    worker.push_back(val);
                }
    }
    return out;
}

std::vector<std::vector<std::uint64_t>> psmm_lagrange_queries(
    std::size_t theta, std::size_t R, std::size_t T, std::size_t V,
    const EvaluationPoints& points, std::span<const std::uint64_t> z, const FieldConfig& field) {
    check_theta(theta, V, "library");
    if (z.size() != V * R * T)
        throw ValidationError("query noise has the wrong length");
    const std::uint64_t q = field.modulus();
    std::vector<std::vector<std::uint64_t>> out(points.alphas.size());
    for (std::size_t i = 0; i < points.alphas.size(); ++i) {
        const FieldElement& alpha = points.alphas[i];
        // Basis values are shared by every (v,r) pair at this worker.
        std::vector<std::uint64_t> basis(R + T);
        for (std::size_t k = 0; k < R + T; ++k)
            basis[k] = lagrange_basis_eval(points.betas, k + 1, alpha).value();
        auto& worker = out[i];
        worker.reserve(V * R);
        std::size_t zi = 0;
        for (std::size_t v = 1; v <= V; ++v)
            for (std::size_t r = 0; r < R; ++r) {
                std::uint64_t val = 0;
                for (std::size_t k = 0; k < T; ++k)
                    val = fq::add(val, fq::mul(z[zi + k], basis[R + k], q), q);
                zi += T;
                if (v == theta) val = fq::add(val, basis[r], q);
                worker.push_back(val);
            }
    }
    return out;
}

std::vector<std::vector<std::uint64_t>> fpmm_poly_queries_a(
    std::size_t theta1, const DegreeAssignment& assign, std::size_t U,
    const EvaluationPoints& points, std::span<const std::uint64_t> zt, const FieldConfig& field) {
    check_theta(theta1, U, "library");
    const std::size_t T = assign.T;
    if (zt.size() != U * assign.m * assign.p * T)
        throw ValidationError("query noise has the wrong length");
    const std::uint64_t q = field.modulus();
    std::vector<std::vector<std::uint64_t>> out(points.alphas.size());
    for (std::size_t i = 0; i < points.alphas.size(); ++i) {
        const std::uint64_t alpha = points.alphas[i].value();
        auto& worker = out[i];
        worker.reserve(U * assign.m * assign.p);
        std::size_t zi = 0;
        for (std::size_t u = 1; u <= U; ++u)
            for (std::size_t k = 0; k < assign.m; ++k)
                for (std::size_t l = 0; l < assign.p; ++l) {
                    std::uint64_t val = 0;
                    for (std::size_t t = 0; t < T; ++t)
                        val = fq::add(val, fq::mul(zt[zi + t], fq::pow(alpha, assign.c[t], q), q), q);
                    zi += T;
                    if (u == theta1)
                        val = fq::add(val, fq::pow(alpha, assign.a_at(k, l), q), q);
                    worker.push_back(val);
                }
    }
    return out;
}

std::vector<std::vector<std::uint64_t>> fpmm_lagrange_queries_a(
    std::size_t theta1, std::size_t R, std::size_t T, std::size_t U,
    const EvaluationPoints& points, std::span<const std::uint64_t> zt, const FieldConfig& field) {
    // Same shape as the B-side query; only the selected index differs.
    return psmm_lagrange_queries(theta1, R, T, U, points, zt, field);
}

namespace {

Matrix accumulate_library_blocks(const MatrixLibrary& lib, const PartitionSpec& spec, Side side,
                                 std::span<const std::uint64_t> coeffs) {
    const FieldConfig field = lib.field();
    const std::uint64_t q = field.modulus();
    std::optional<Matrix> acc;
    std::size_t ci = 0;
    for (std::size_t v = 0; v < lib.size(); ++v) {
        const BlockGrid grid = partition(lib.at(v), spec, side);
        if (!acc) acc.emplace(grid.block_rows(), grid.block_cols(), field);
        for (const BlockView& blk : grid.blocks) {
            const std::uint64_t s = coeffs[ci++];
            if (s == 0) continue;
            Matrix& out = *acc;
            for (std::size_t r = 0; r < blk.rows(); ++r)
                for (std::size_t c = 0; c < blk.cols(); ++c)
                    out.set_raw(r, c, fq::add(out.raw(r, c), fq::mul(s, blk.raw(r, c), q), q));
        }
    }
    if (ci != coeffs.size())
        throw ValidationError("query scalar count does not match the library partition");
    return *acc;
}

Matrix accumulate_library_batches(const MatrixLibrary& lib, const BilinearTensor& tensor, Side side,
                                  std::span<const std::uint64_t> coeffs) {
    const FieldConfig field = lib.field();
    const PartitionSpec spec(tensor.m, tensor.p, tensor.n);
    std::optional<Matrix> acc;
    std::size_t ci = 0;
    for (std::size_t v = 0; v < lib.size(); ++v) {
        const BlockGrid grid = partition(lib.at(v), spec, side);
        const std::vector<Matrix> batch =
            side == Side::A ? batch_encode_A(grid, tensor) : batch_encode_B(grid, tensor);
        if (!acc) acc.emplace(batch.front().rows(), batch.front().cols(), field);
        for (std::size_t r = 0; r < tensor.R; ++r) acc->add_scaled(batch[r], coeffs[ci++]);
    }
    if (ci != coeffs.size())
        throw ValidationError("query scalar count does not match the library batches");
    return *acc;
}

} // namespace

Matrix psmm_worker_encode_B(const LibraryB& lib, const PartitionSpec& spec,
                            std::span<const std::uint64_t> worker_queries) {
    if (worker_queries.size() != lib.size() * spec.p * spec.n)
        throw ValidationError("expected V*p*n query scalars");
    return accumulate_library_blocks(lib, spec, Side::B, worker_queries);
}

Matrix lagrange_worker_encode_B(const LibraryB& lib, const BilinearTensor& tensor,
                                std::span<const std::uint64_t> worker_queries) {
    if (worker_queries.size() != lib.size() * tensor.R)
        throw ValidationError("expected V*R query scalars");
    return accumulate_library_batches(lib, tensor, Side::B, worker_queries);
}

Matrix fpmm_worker_encode_A(const LibraryA& lib, const PartitionSpec& spec,
                            std::span<const std::uint64_t> worker_queries) {
    if (worker_queries.size() != lib.size() * spec.m * spec.p)
        throw ValidationError("expected U*m*p query scalars");
    return accumulate_library_blocks(lib, spec, Side::A, worker_queries);
}

Matrix fpmm_lagrange_worker_encode_A(const LibraryA& lib, const BilinearTensor& tensor,
                                     std::span<const std::uint64_t> worker_queries) {
    if (worker_queries.size() != lib.size() * tensor.R)
        throw ValidationError("expected U*R query scalars");
    return accumulate_library_batches(lib, tensor, Side::A, worker_queries);
}

std::vector<Matrix> aligned_noise_blocks_poly(const MatrixLibrary& lib, const PartitionSpec& spec,
                                              Side side, std::size_t T,
                                              std::span<const std::uint64_t> z) {
    const std::size_t per_matrix = side == Side::A ? spec.m * spec.p : spec.p * spec.n;
    if (z.size() != lib.size() * per_matrix * T)
        throw ValidationError("noise scalar count does not match the library partition");
    std::vector<Matrix> out;
    for (std::size_t t = 0; t < T; ++t) {
        // Gather the t-th scalar of every (v, block) group.
        std::vector<std::uint64_t> coeffs;
        coeffs.reserve(lib.size() * per_matrix);
        for (std::size_t g = 0; g < lib.size() * per_matrix; ++g) coeffs.push_back(z[g * T + t]);
        out.push_back(accumulate_library_blocks(lib, spec, side, coeffs));
    }
    return out;
}

std::vector<Matrix> aligned_noise_blocks_lagrange(const MatrixLibrary& lib,
                                                  const BilinearTensor& tensor, Side side,
                                                  std::size_t T,
                                                  std::span<const std::uint64_t> z) {
    if (z.size() != lib.size() * tensor.R * T)
        throw ValidationError("noise scalar count does not match the library batches");
    std::vector<Matrix> out;
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<std::uint64_t> coeffs;
        coeffs.reserve(lib.size() * tensor.R);
        for (std::size_t g = 0; g < lib.size() * tensor.R; ++g) coeffs.push_back(z[g * T + t]);
        out.push_back(accumulate_library_batches(lib, tensor, side, coeffs));
    }
    return out;
}

namespace {

struct ResolvedParams {
    RunParams params;                 // with assign/tensor/points materialized
    std::uint64_t K = 0;
};

ResolvedParams resolve(const RunParams& in, const FieldConfig& field) {
    ResolvedParams out{in, 0};
    RunParams& p = out.params;
    if (p.T == 0)
        throw ValidationError("T must be at least 1: non-secure multiplication is out of scope");
    if (p.m == 0 || p.p == 0 || p.n == 0 || p.N == 0)
        throw ValidationError("m, p, n and N must be at least 1");
    if (p.family == Family::PolyCode) {
        if (!p.assign) {
            const ThresholdReport best =
                recovery_threshold(ThresholdFamily::PolyMin, p.m, p.p, p.n, p.T);
            p.assign = preset_assignment(best.chosen_variant, p.m, p.p, p.n, p.T);
        }
        const DegreeAssignment& a = *p.assign;
        if (a.m != p.m || a.p != p.p || a.n != p.n || a.T != p.T)
            throw ValidationError("degree assignment does not match (m,p,n,T)");
        out.K = a.threshold();
        if (!p.points) p.points = default_poly_points(field, p.N);
        if (p.points->alphas.size() != p.N)
            throw ValidationError("need exactly N evaluation points");
        validate_poly_points(*p.points, field);
    } else {
        if (!p.tensor) p.tensor = naive_tensor(p.m, p.p, p.n);
        const BilinearTensor& t = *p.tensor;
        if (t.m != p.m || t.p != p.p || t.n != p.n)
            throw ValidationError("tensor shape does not match (m,p,n)");
        out.K = 2 * t.R + 2 * p.T - 1;
        if (!p.points) p.points = default_lagrange_points(field, p.N, t.R, p.T);
        if (p.points->alphas.size() != p.N)
            throw ValidationError("need exactly N evaluation points");
        validate_lagrange_points(*p.points, field, t.R, p.T);
    }
    // Sharing with N < K is well-defined (the audits use it); reconstruction
    // raises BelowThresholdError when asked to decode such a run.
    return out;
}

void fill_dims(StrategyRun& run, std::size_t lambda, std::size_t omega, std::size_t gamma) {
    if (lambda % run.m != 0 || omega % run.p != 0 || gamma % run.n != 0)
        throw ValidationError("partition parameters do not divide the matrix dimensions");
    run.lambda = lambda;
    run.omega = omega;
    run.gamma = gamma;
}

StrategyRun init_run(Problem problem, const RunParams& p, const FieldConfig& field) {
    StrategyRun run;
    run.problem = problem;
    run.family = p.family;
    run.field = field;
    run.m = p.m; run.p = p.p; run.n = p.n; run.T = p.T; run.N = p.N;
    run.seed = p.seed;
    return run;
}

void compute_responses(StrategyRun& run) {
    run.responses.reserve(run.N);
    for (std::size_t i = 0; i < run.N; ++i)
        run.responses.push_back(mat_mul(run.a_shares[i], run.b_shares[i]));
}

DecodePlan make_plan(const ResolvedParams& rp, const C1Report* c1, std::size_t block_rows,
                     std::size_t block_cols) {
    DecodePlan plan;
    plan.K = rp.K;
    plan.m = rp.params.m;
    plan.n = rp.params.n;
    plan.block_rows = block_rows;
    plan.block_cols = block_cols;
    if (rp.params.family == Family::PolyCode) {
        plan.family = Family::PolyCode;
        plan.e_map = c1->e_map;
    } else {
        plan.family = Family::LagrangeCode;
        plan.tensor = *rp.params.tensor;
        plan.betas = rp.params.points->betas;
    }
    return plan;
}

C1Report require_c1(const DegreeAssignment& assign) {
    C1Report c1 = verify_c1(assign);
    if (!c1) throw ValidationError(c1.failure);
    return c1;
}

} // namespace

StrategyRun prepare_psmm(const Matrix& A, const LibraryB& lib, std::size_t theta,
                         const RunParams& params, NoiseSource& noise) {
    const FieldConfig field = A.field();
    if (lib.field() != field)
        throw ValidationError("matrix and library belong to different fields");
    if (A.cols() != lib.rows())
        throw ValidationError("inner dimensions of A and the library do not match");
    check_theta(theta, lib.size(), "library");

    const ResolvedParams rp = resolve(params, field);
    const RunParams& p = rp.params;
    StrategyRun run = init_run(Problem::PSMM, p, field);
    run.V = lib.size();
    run.theta = theta;
    fill_dims(run, A.rows(), A.cols(), lib.cols());
    run.points = *p.points;

    const PartitionSpec spec(p.m, p.p, p.n);
    const BlockGrid ga = partition(A, spec, Side::A);
    const NoiseLayout layout = noise_layout(Problem::PSMM, p, 0, lib.size(), run.lambda, run.omega);
    const std::vector<std::uint64_t> scalars = draw_scalars(layout.total(), field, noise);
    const std::vector<Matrix> noise_a = scalars_to_blocks(
        std::span(scalars).first(layout.a_block_scalars), p.T, ga.block_rows(), ga.block_cols(), field);
    const std::span<const std::uint64_t> z = std::span(scalars).subspan(layout.a_block_scalars);

    if (p.family == Family::PolyCode) {
        const C1Report c1 = require_c1(*p.assign);
        require_c2(*p.assign, run.points.alphas);
        run.a_shares = encode_poly_shares(ga, p.assign->a, noise_a, p.assign->c, run.points.alphas);
        run.queries_b = psmm_poly_queries(theta, *p.assign, lib.size(), run.points, z, field);
        run.b_shares.reserve(p.N);
        for (std::size_t i = 0; i < p.N; ++i)
            run.b_shares.push_back(psmm_worker_encode_B(lib, spec, run.queries_b[i]));
        run.plan = make_plan(rp, &c1, ga.block_rows(), lib.cols() / p.n);
    } else {
        const BilinearTensor& tensor = *p.tensor;
        const std::vector<Matrix> batch_a = batch_encode_A(ga, tensor);
        run.a_shares = encode_lagrange_shares(batch_a, noise_a, run.points.betas, run.points.alphas);
        run.queries_b =
            psmm_lagrange_queries(theta, tensor.R, p.T, lib.size(), run.points, z, field);
        run.b_shares.reserve(p.N);
        for (std::size_t i = 0; i < p.N; ++i)
            run.b_shares.push_back(lagrange_worker_encode_B(lib, tensor, run.queries_b[i]));
        run.plan = make_plan(rp, nullptr, ga.block_rows(), lib.cols() / p.n);
    }
    compute_responses(run);
    return run;
}

StrategyRun prepare_fpmm(const LibraryA& libA, const LibraryB& libB, std::size_t theta1,
                         std::size_t theta2, const RunParams& params, NoiseSource& noise) {
    const FieldConfig field = libA.field();
    if (libB.field() != field)
        throw ValidationError("libraries belong to different fields");
    if (libA.cols() != libB.rows())
        throw ValidationError("inner dimensions of the libraries do not match");
    check_theta(theta1, libA.size(), "A-library");
    check_theta(theta2, libB.size(), "B-library");

    const ResolvedParams rp = resolve(params, field);
    const RunParams& p = rp.params;
    StrategyRun run = init_run(Problem::FPMM, p, field);
    run.U = libA.size();
    run.V = libB.size();
    run.theta1 = theta1;
    run.theta2 = theta2;
    fill_dims(run, libA.rows(), libA.cols(), libB.cols());
    run.points = *p.points;

    const PartitionSpec spec(p.m, p.p, p.n);
    const NoiseLayout layout =
        noise_layout(Problem::FPMM, p, libA.size(), libB.size(), run.lambda, run.omega);
    const std::vector<std::uint64_t> scalars = draw_scalars(layout.total(), field, noise);
    const std::span<const std::uint64_t> zt = std::span(scalars).first(layout.a_query_scalars);
    const std::span<const std::uint64_t> z = std::span(scalars).subspan(layout.a_query_scalars);

    if (p.family == Family::PolyCode) {
        const C1Report c1 = require_c1(*p.assign);
        require_c2(*p.assign, run.points.alphas);
        run.queries_a = fpmm_poly_queries_a(theta1, *p.assign, libA.size(), run.points, zt, field);
        run.queries_b = psmm_poly_queries(theta2, *p.assign, libB.size(), run.points, z, field);
        run.a_shares.reserve(p.N);
        run.b_shares.reserve(p.N);
        for (std::size_t i = 0; i < p.N; ++i) {
            run.a_shares.push_back(fpmm_worker_encode_A(libA, spec, run.queries_a[i]));
            run.b_shares.push_back(psmm_worker_encode_B(libB, spec, run.queries_b[i]));
        }
        run.plan = make_plan(rp, &c1, libA.rows() / p.m, libB.cols() / p.n);
    } else {
        const BilinearTensor& tensor = *p.tensor;
        run.queries_a =
            fpmm_lagrange_queries_a(theta1, tensor.R, p.T, libA.size(), run.points, zt, field);
        run.queries_b =
            psmm_lagrange_queries(theta2, tensor.R, p.T, libB.size(), run.points, z, field);
        run.a_shares.reserve(p.N);
        run.b_shares.reserve(p.N);
        for (std::size_t i = 0; i < p.N; ++i) {
            run.a_shares.push_back(fpmm_lagrange_worker_encode_A(libA, tensor, run.queries_a[i]));
            run.b_shares.push_back(lagrange_worker_encode_B(libB, tensor, run.queries_b[i]));
        }
        run.plan = make_plan(rp, nullptr, libA.rows() / p.m, libB.cols() / p.n);
    }
    compute_responses(run);
    return run;
}

StrategyRun prepare_smm(const Matrix& A, const Matrix& B, const RunParams& params,
                        NoiseSource& noise) {
    const FieldConfig field = A.field();
    if (B.field() != field)
        throw ValidationError("matrices belong to different fields");
    if (A.cols() != B.rows())
        throw ValidationError("inner dimensions do not match");

    const ResolvedParams rp = resolve(params, field);
    const RunParams& p = rp.params;
    StrategyRun run = init_run(Problem::SMM, p, field);
    fill_dims(run, A.rows(), A.cols(), B.cols());
    run.points = *p.points;

    SmmShares shares = p.family == Family::PolyCode
                           ? smm_poly_encode(A, B, *p.assign, run.points, noise)
                           : smm_lagrange_encode(A, B, *p.tensor, p.T, run.points, noise);
    run.a_shares = std::move(shares.a_shares);
    run.b_shares = std::move(shares.b_shares);
    run.plan = std::move(shares.plan);
    compute_responses(run);
    return run;
}

void decode_run(StrategyRun& run, std::span<const std::size_t> worker_ids) {
    if (worker_ids.size() < run.plan.K)
        throw BelowThresholdError("below recovery threshold: have "
                                  + std::to_string(worker_ids.size()) + " responses, need "
                                  + std::to_string(run.plan.K));
    std::vector<std::pair<std::size_t, Matrix>> responses;
    responses.reserve(run.plan.K);
    for (std::size_t i = 0; i < run.plan.K; ++i) {
        const std::size_t id = worker_ids[i];
        if (id == 0 || id > run.N)
            throw ValidationError("worker id out of range");
        responses.emplace_back(id, run.responses[id - 1]);
    }
    run.decoded = smm_decode(responses, run.points.alphas, run.plan);
    run.used_workers.assign(worker_ids.begin(), worker_ids.begin() + run.plan.K);
    run.cost = compute_cost(run);
}

CostReport compute_cost(const StrategyRun& run) {
    CostReport cost;
    const std::size_t lambda = run.lambda, omega = run.omega, gamma = run.gamma;
    const std::size_t m = run.m, p = run.p, n = run.n, T = run.T, N = run.N;
    const std::size_t K = run.plan.K;
    const std::size_t block_a = (lambda / m) * (omega / p);
    const std::size_t block_c = (lambda / m) * (gamma / n);
    const std::size_t R = run.plan.tensor ? run.plan.tensor->R : 0;

    if (run.problem == Problem::FPMM) {
        // No data upload; queries do not scale with the matrix dimensions and
        // are accounted separately.
        cost.upload_is_query_only = true;
        cost.uploaded_symbols = 0;
        cost.upload_cost = Rational(0, 1);
    } else {
        std::uint64_t uploaded = 0;
        for (const Matrix& s : run.a_shares) uploaded += s.rows() * s.cols();
        if (run.problem == Problem::SMM)
            for (const Matrix& s : run.b_shares) uploaded += s.rows() * s.cols();
        cost.uploaded_symbols = uploaded;
        cost.upload_cost = Rational(uploaded, lambda * omega);
    }

    std::uint64_t downloaded = 0;
    for (const std::size_t id : run.used_workers)
        downloaded += run.responses[id - 1].rows() * run.responses[id - 1].cols();
    cost.downloaded_symbols = downloaded;
    cost.download_cost = Rational(downloaded, lambda * gamma);

    cost.query_scalars_per_worker = (run.queries_a.empty() ? 0 : run.queries_a.front().size())
                                    + (run.queries_b.empty() ? 0 : run.queries_b.front().size());
    cost.query_scalars_total = cost.query_scalars_per_worker * N;

    // Multiply-add trip counts of the implemented (quadratic-interpolation)
    // algorithms, not the quasi-linear asymptotics.
    if (run.family == Family::PolyCode) {
        if (run.problem == Problem::FPMM) {
            cost.encode_mul_adds = 0;
            cost.worker_mul_adds = run.U * lambda * omega + run.V * omega * gamma
                                   + lambda * omega * gamma / (m * p * n);
            cost.encode_complexity = "queries only (neglected)";
            cost.worker_complexity = "O(U*lambda*omega + V*omega*gamma + lambda*omega*gamma/(mpn))";
        } else {
            cost.encode_mul_adds = N * (m * p + T) * block_a;
            if (run.problem == Problem::SMM)
                cost.encode_mul_adds += N * (p * n + T) * (omega / p) * (gamma / n);
            cost.worker_mul_adds = (run.problem == Problem::PSMM ? run.V * omega * gamma : 0)
                                   + lambda * omega * gamma / (m * p * n);
            cost.encode_complexity = "O(N*(mp+T)*lambda*omega/(mp))";
            cost.worker_complexity = run.problem == Problem::PSMM
                                         ? "O(V*omega*gamma + lambda*omega*gamma/(mpn))"
                                         : "O(lambda*omega*gamma/(mpn))";
        }
        cost.decode_mul_adds = K * K * block_c;
        cost.decode_complexity = "O(K^2*lambda*gamma/(mn))";
    } else {
        if (run.problem == Problem::FPMM) {
            cost.encode_mul_adds = 0;
            cost.worker_mul_adds = run.U * R * lambda * omega + run.V * R * omega * gamma
                                   + (run.U + run.V) * R * (omega / p) * (gamma / n)
                                   + lambda * omega * gamma / (m * p * n);
            cost.encode_complexity = "queries only (neglected)";
            cost.worker_complexity = "O(U*R*lambda*omega + V*R*omega*gamma + lambda*omega*gamma/(mpn))";
        } else {
            cost.encode_mul_adds = R * lambda * omega + N * (R + T) * block_a;
            if (run.problem == Problem::SMM)
                cost.encode_mul_adds += R * omega * gamma + N * (R + T) * (omega / p) * (gamma / n);
            cost.worker_mul_adds = (run.problem == Problem::PSMM
                                        ? run.V * R * omega * gamma
                                              + run.V * R * (omega / p) * (gamma / n)
                                        : 0)
                                   + lambda * omega * gamma / (m * p * n);
            cost.encode_complexity = "O(R*lambda*omega + N*(R+T)*lambda*omega/(mp))";
            cost.worker_complexity = run.problem == Problem::PSMM
                                         ? "O(V*R*omega*gamma + lambda*omega*gamma/(mpn))"
                                         : "O(lambda*omega*gamma/(mpn))";
        }
        cost.decode_mul_adds = K * K * block_c + R * (K - 1) * block_c + R * lambda * gamma;
        cost.decode_complexity = "O(K^2*lambda*gamma/(mn) + R*lambda*gamma)";
    }
    return cost;
}

namespace {

std::vector<std::size_t> first_k_ids(const StrategyRun& run) {
    if (run.N < run.plan.K)
        throw BelowThresholdError("below recovery threshold: N=" + std::to_string(run.N)
                                  + " workers, need K=" + std::to_string(run.plan.K));
    std::vector<std::size_t> ids(run.plan.K);
    for (std::size_t i = 0; i < run.plan.K; ++i) ids[i] = i + 1;
    return ids;
}

} // namespace

StrategyRun psmm_run(const Matrix& A, const LibraryB& lib, std::size_t theta,
                     const RunParams& params, NoiseSource& noise) {
    StrategyRun run = prepare_psmm(A, lib, theta, params, noise);
    decode_run(run, first_k_ids(run));
    return run;
}

StrategyRun psmm_run(const Matrix& A, const LibraryB& lib, std::size_t theta,
                     const RunParams& params) {
    SeededNoise noise(params.seed);
    return psmm_run(A, lib, theta, params, noise);
}

StrategyRun fpmm_run(const LibraryA& libA, const LibraryB& libB, std::size_t theta1,
                     std::size_t theta2, const RunParams& params, NoiseSource& noise) {
    StrategyRun run = prepare_fpmm(libA, libB, theta1, theta2, params, noise);
    decode_run(run, first_k_ids(run));
    return run;
}

StrategyRun fpmm_run(const LibraryA& libA, const LibraryB& libB, std::size_t theta1,
                     std::size_t theta2, const RunParams& params) {
    SeededNoise noise(params.seed);
    return fpmm_run(libA, libB, theta1, theta2, params, noise);
}

StrategyRun smm_run(const Matrix& A, const Matrix& B, const RunParams& params, NoiseSource& noise) {
    StrategyRun run = prepare_smm(A, B, params, noise);
    decode_run(run, first_k_ids(run));
    return run;
}

StrategyRun smm_run(const Matrix& A, const Matrix& B, const RunParams& params) {
    SeededNoise noise(params.seed);
    return smm_run(A, B, params, noise);
}

namespace {

nlohmann::ordered_json matrix_to_json(const Matrix& mat) {
    nlohmann::ordered_json j;
    j["rows"] = mat.rows();
    j["cols"] = mat.cols();
    nlohmann::ordered_json data = nlohmann::ordered_json::array();
    for (std::uint64_t v : mat.data()) data.push_back(std::to_string(v));
    j["data"] = std::move(data);
    return j;
}

nlohmann::ordered_json scalars_to_json(const std::vector<std::uint64_t>& scalars) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::uint64_t v : scalars) arr.push_back(std::to_string(v));
    return arr;
}

} // namespace

nlohmann::ordered_json run_to_json(const StrategyRun& run) {
    nlohmann::ordered_json j;
    j["problem"] = problem_name(run.problem);
    j["family"] = family_name(run.family);
    j["modulus"] = std::to_string(run.field.modulus());
    j["m"] = run.m; j["p"] = run.p; j["n"] = run.n; j["T"] = run.T; j["N"] = run.N;
    if (run.V) j["V"] = run.V;
    if (run.U) j["U"] = run.U;
    if (run.theta) j["theta"] = run.theta;
    if (run.theta1) j["theta1"] = run.theta1;
    if (run.theta2) j["theta2"] = run.theta2;
    j["lambda"] = run.lambda; j["omega"] = run.omega; j["gamma"] = run.gamma;
    j["seed"] = run.seed;
    j["K"] = run.plan.K;

    nlohmann::ordered_json alphas = nlohmann::ordered_json::array();
    for (const FieldElement& a : run.points.alphas) alphas.push_back(std::to_string(a.value()));
    j["alphas"] = std::move(alphas);
    if (!run.points.betas.empty()) {
        nlohmann::ordered_json betas = nlohmann::ordered_json::array();
        for (const FieldElement& b : run.points.betas) betas.push_back(std::to_string(b.value()));
        j["betas"] = std::move(betas);
    }

    const auto query_list = [](const std::vector<std::vector<std::uint64_t>>& queries) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& w : queries) arr.push_back(scalars_to_json(w));
        return arr;
    };
    if (!run.queries_a.empty()) j["queries_a"] = query_list(run.queries_a);
    if (!run.queries_b.empty()) j["queries_b"] = query_list(run.queries_b);

    const auto share_list = [](const std::vector<Matrix>& shares) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const Matrix& s : shares) arr.push_back(matrix_to_json(s));
        return arr;
    };
    j["a_shares"] = share_list(run.a_shares);
    j["b_shares"] = share_list(run.b_shares);
    j["responses"] = share_list(run.responses);
    j["used_workers"] = run.used_workers;
    if (run.decoded) j["decoded"] = matrix_to_json(*run.decoded);

    nlohmann::ordered_json cost;
    cost["upload_cost"] = run.cost.upload_cost.str();
    cost["download_cost"] = run.cost.download_cost.str();
    cost["upload_is_query_only"] = run.cost.upload_is_query_only;
    cost["uploaded_symbols"] = run.cost.uploaded_symbols;
    cost["downloaded_symbols"] = run.cost.downloaded_symbols;
    cost["query_scalars_per_worker"] = run.cost.query_scalars_per_worker;
    cost["query_scalars_total"] = run.cost.query_scalars_total;
    cost["encode_mul_adds"] = run.cost.encode_mul_adds;
    cost["worker_mul_adds"] = run.cost.worker_mul_adds;
    cost["decode_mul_adds"] = run.cost.decode_mul_adds;
    cost["encode_complexity"] = run.cost.encode_complexity;
    cost["worker_complexity"] = run.cost.worker_complexity;
    cost["decode_complexity"] = run.cost.decode_complexity;
    j["cost"] = std::move(cost);
    return j;
}

MatrixLibrary load_library_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in)
        throw ValidationError("cannot open library manifest " + manifest_path);
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed library manifest: ") + e.what());
    }
    if (!manifest.contains("matrices") || !manifest["matrices"].is_array()
        || manifest["matrices"].empty())
        throw ValidationError("library manifest needs a non-empty \"matrices\" list");
    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    std::vector<Matrix> mats;
    for (const auto& entry : manifest["matrices"]) {
        const std::filesystem::path rel = entry.get<std::string>();
        mats.push_back(read_fqmx_file((base / rel).string()));
    }
    return MatrixLibrary(std::move(mats));
}

} // namespace copmm
