#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "copmm/cost.hpp"
#include "copmm/matrix.hpp"
#include "copmm/poly.hpp"
#include "copmm/rng.hpp"
#include "copmm/smm.hpp"

#include <nlohmann/json_fwd.hpp>

namespace copmm {

enum class Problem { SMM, PSMM, FPMM };

std::string problem_name(Problem p);

/// Library of identically shaped public matrices. Equal dimensions across the
/// library are required for index privacy and are enforced here.
class MatrixLibrary {
public:
    explicit MatrixLibrary(std::vector<Matrix> mats);

    std::size_t size() const { return mats_.size(); }
    const Matrix& at(std::size_t idx0) const { return mats_[idx0]; } // 0-based
    const FieldConfig& field() const { return mats_.front().field(); }
    std::size_t rows() const { return mats_.front().rows(); }
    std::size_t cols() const { return mats_.front().cols(); }

private:
    std::vector<Matrix> mats_;
};

using LibraryA = MatrixLibrary; // U matrices of shape lambda x omega (FPMM)
using LibraryB = MatrixLibrary; // V matrices of shape omega x gamma

// ---------------------------------------------------------------------------
// Private randomness layout. All noise scalars are drawn once by the master in
// the canonical orders below; the audits enumerate exactly this flat layout.
//   PSMM poly:       [Z^A_t blocks, t=1..T, row-major] [z^(v)_{l,j,t}: v,l,j,t]
//   PSMM lagrange:   [Z^A_{R+t} blocks, t=1..T]        [z^(v)_{r,k}:   v,r,k]
//   FPMM poly:       [zt^(u)_{k,l,t}: u,k,l,t]         [z^(v)_{l,j,t}: v,l,j,t]
//   FPMM lagrange:   [zt^(u)_{r,k}:   u,r,k]           [z^(v)_{r,k}:   v,r,k]
// ---------------------------------------------------------------------------
struct NoiseLayout {
    std::size_t a_block_scalars = 0; // master-side noise matrices (SMM/PSMM)
    std::size_t a_query_scalars = 0; // FPMM rho noise
    std::size_t b_block_scalars = 0; // SMM only
    std::size_t b_query_scalars = 0; // PSMM/FPMM q noise

    std::size_t total() const {
        return a_block_scalars + a_query_scalars + b_block_scalars + b_query_scalars;
    }
    /// [first, first+count) range of the query-noise scalars within the flat
    /// layout; the privacy mutation sweep pins coordinates in this range.
    std::size_t query_noise_offset() const { return a_block_scalars + b_block_scalars; }
    std::size_t query_noise_count() const { return a_query_scalars + b_query_scalars; }
};

struct RunParams {
    Family family = Family::PolyCode;
    std::size_t m = 1, p = 1, n = 1, T = 1, N = 1;
    std::uint64_t seed = 0;
    std::optional<DegreeAssignment> assign;  // poly family
    std::optional<BilinearTensor> tensor;    // lagrange family
    std::optional<EvaluationPoints> points;  // default schedule when absent
};

NoiseLayout noise_layout(Problem problem, const RunParams& params,
                         std::size_t U, std::size_t V,
                         std::size_t lambda, std::size_t omega);

// --- query polynomial construction (evaluated at every alpha) -------------

/// q^(v)_{l,j}(x) = sum_t z^(v)_{l,j,t} x^{d_t} + [v = theta] x^{b_{l,j}}.
/// Returns per-worker scalar lists of size V*p*n, ordered (v,l,j).
std::vector<std::vector<std::uint64_t>> psmm_poly_queries(
    std::size_t theta, const DegreeAssignment& assign, std::size_t V,
    const EvaluationPoints& points, std::span<const std::uint64_t> z, const FieldConfig& field);

/// q^(v)_r(x) = sum_k z^(v)_{r,k} ell_k(x) + [v = theta] ell_r(x), with ell the
/// Lagrange basis over the R+T betas. Size V*R per worker, ordered (v,r).
std::vector<std::vector<std::uint64_t>> psmm_lagrange_queries(
    std::size_t theta, std::size_t R, std::size_t T, std::size_t V,
    const EvaluationPoints& points, std::span<const std::uint64_t> z, const FieldConfig& field);

/// rho^(u)_{k,l}(x) = sum_t zt^(u)_{k,l,t} x^{c_t} + [u = theta1] x^{a_{k,l}}.
/// Size U*m*p per worker, ordered (u,k,l).
std::vector<std::vector<std::uint64_t>> fpmm_poly_queries_a(
    std::size_t theta1, const DegreeAssignment& assign, std::size_t U,
    const EvaluationPoints& points, std::span<const std::uint64_t> zt, const FieldConfig& field);

/// rho^(u)_r(x) = sum_k zt^(u)_{r,k} ell_k(x) + [u = theta1] ell_r(x).
std::vector<std::vector<std::uint64_t>> fpmm_lagrange_queries_a(
    std::size_t theta1, std::size_t R, std::size_t T, std::size_t U,
    const EvaluationPoints& points, std::span<const std::uint64_t> zt, const FieldConfig& field);

// --- worker-side library encoding -----------------------------------------

/// B~_i = sum_{v,l,j} B^(v)_{l,j} q^(v)_{l,j}(alpha_i).
Matrix psmm_worker_encode_B(const LibraryB& lib, const PartitionSpec& spec,
                            std::span<const std::uint64_t> worker_queries);

/// B~_i = sum_{v,r} B^(v)_r q^(v)_r(alpha_i), with batches from the tensor.
Matrix lagrange_worker_encode_B(const LibraryB& lib, const BilinearTensor& tensor,
                                std::span<const std::uint64_t> worker_queries);

Matrix fpmm_worker_encode_A(const LibraryA& lib, const PartitionSpec& spec,
                            std::span<const std::uint64_t> worker_queries);
Matrix fpmm_lagrange_worker_encode_A(const LibraryA& lib, const BilinearTensor& tensor,
                                     std::span<const std::uint64_t> worker_queries);

// --- audit/test surface ----------------------------------------------------
// The aligned noise blocks Z_t^B = sum_v sum_{l,j} B^(v)_{l,j} z^(v)_{l,j,t}
// require library knowledge the master lacks in the threat model; they exist
// only so tests and audits can cross-check the alignment identity against the
// query path.
std::vector<Matrix> aligned_noise_blocks_poly(const MatrixLibrary& lib, const PartitionSpec& spec,
                                              Side side, std::size_t T,
                                              std::span<const std::uint64_t> z);
std::vector<Matrix> aligned_noise_blocks_lagrange(const MatrixLibrary& lib,
                                                  const BilinearTensor& tensor, Side side,
                                                  std::size_t T,
                                                  std::span<const std::uint64_t> z);

// --- full pipelines ---------------------------------------------------------

/// Complete sharing / computation / reconstruction transcript of one run.
struct StrategyRun {
    Problem problem = Problem::SMM;
    Family family = Family::PolyCode;
    FieldConfig field{2};
    std::size_t m = 1, p = 1, n = 1, T = 1, N = 1;
    std::size_t V = 0, U = 0;
    std::size_t theta = 0, theta1 = 0, theta2 = 0; // 1-based
    std::size_t lambda = 0, omega = 0, gamma = 0;
    std::uint64_t seed = 0;

    EvaluationPoints points;
    DecodePlan plan;
    std::vector<std::vector<std::uint64_t>> queries_a; // FPMM rho, per worker
    std::vector<std::vector<std::uint64_t>> queries_b; // PSMM/FPMM q, per worker
    std::vector<Matrix> a_shares;   // PSMM/SMM master-encoded; FPMM worker-encoded
    std::vector<Matrix> b_shares;   // SMM master-encoded; PSMM/FPMM worker-encoded
    std::vector<Matrix> responses;  // Y_i for all N workers
    std::vector<std::size_t> used_workers; // 1-based ids consumed by the decoder
    std::optional<Matrix> decoded;
    CostReport cost;
};

/// Sharing + computation phases for all N workers; reconstruction is left to
/// decode_run so the simulator can pick which responses arrive.
StrategyRun prepare_psmm(const Matrix& A, const LibraryB& lib, std::size_t theta,
                         const RunParams& params, NoiseSource& noise);
StrategyRun prepare_fpmm(const LibraryA& libA, const LibraryB& libB, std::size_t theta1,
                         std::size_t theta2, const RunParams& params, NoiseSource& noise);
StrategyRun prepare_smm(const Matrix& A, const Matrix& B, const RunParams& params,
                        NoiseSource& noise);

/// Decodes from the given worker ids (first K are used) and fills the cost
/// report. Throws BelowThresholdError with fewer than K ids.
void decode_run(StrategyRun& run, std::span<const std::size_t> worker_ids);

/// Exact symbol counters and multiply-add trip counts for the completed run.
CostReport compute_cost(const StrategyRun& run);

// Convenience: full happy-path runs decoding from workers 1..K.
StrategyRun psmm_run(const Matrix& A, const LibraryB& lib, std::size_t theta, const RunParams& params);
StrategyRun psmm_run(const Matrix& A, const LibraryB& lib, std::size_t theta, const RunParams& params,
                     NoiseSource& noise);
StrategyRun fpmm_run(const LibraryA& libA, const LibraryB& libB, std::size_t theta1,
                     std::size_t theta2, const RunParams& params);
StrategyRun fpmm_run(const LibraryA& libA, const LibraryB& libB, std::size_t theta1,
                     std::size_t theta2, const RunParams& params, NoiseSource& noise);
StrategyRun smm_run(const Matrix& A, const Matrix& B, const RunParams& params);
StrategyRun smm_run(const Matrix& A, const Matrix& B, const RunParams& params, NoiseSource& noise);

/// Transcript as JSON with all field values rendered as decimal strings.
nlohmann::ordered_json run_to_json(const StrategyRun& run);

/// Loads a library from a JSON manifest {"matrices": ["b1.fqmx", ...]} whose
/// paths are resolved relative to the manifest location.
MatrixLibrary load_library_manifest(const std::string& manifest_path);

} // namespace copmm
