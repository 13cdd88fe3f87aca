#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "copmm/bilinear.hpp"
#include "copmm/cost.hpp"
#include "copmm/matrix.hpp"
#include "copmm/poly.hpp"
#include "copmm/rng.hpp"

namespace copmm {

enum class Family { PolyCode, LagrangeCode };

std::string family_name(Family f);

/// Exponent family {a_{k,l}, b_{l,j}, c_t, d_t} driving the polynomial-code
/// encoders. Construction checks the structural necessities (T >= 1, distinct
/// c's, distinct d's); decodability and noise invertibility are established by
/// verify_c1 / verify_c2 before any strategy uses the assignment.
struct DegreeAssignment {
    std::size_t m = 0, p = 0, n = 0, T = 0;
    std::vector<std::uint64_t> a; // m*p, index (k,l) row-major
    std::vector<std::uint64_t> b; // p*n, index (l,j) row-major
    std::vector<std::uint64_t> c; // T
    std::vector<std::uint64_t> d; // T

    DegreeAssignment(std::size_t m_, std::size_t p_, std::size_t n_, std::size_t T_,
                     std::vector<std::uint64_t> a_, std::vector<std::uint64_t> b_,
                     std::vector<std::uint64_t> c_, std::vector<std::uint64_t> d_);

    std::uint64_t a_at(std::size_t k, std::size_t l) const { return a[k * p + l]; }
    std::uint64_t b_at(std::size_t l, std::size_t j) const { return b[l * n + j]; }

    std::uint64_t max_a_c() const;
    std::uint64_t max_b_d() const;
    /// K = max{a,c} + max{b,d} + 1.
    std::uint64_t threshold() const { return max_a_c() + max_b_d() + 1; }
};

enum class PresetVariant { V1, V2, V3 };

/// The three preset exponent families:
///   V1: a=(k-1)(np+T)+l-1, b=jp-l, c=(m-1)(np+T)+np+t-1, d=np+t-1; K=(m+1)(np+T)-1
///   V2: a=(k-1)p+l-1, b=(j-1)(mp+T)+p-l, c=mp+t-1, d=(n-1)(mp+T)+mp+t-1; K=(n+1)(mp+T)-1
///   V3: a=(k-1)np+l-1, b=jp-l, c=d=mpn+t-1; K=2mpn+2T-1
DegreeAssignment preset_assignment(PresetVariant variant, std::size_t m, std::size_t p,
                                   std::size_t n, std::size_t T);

/// Decodability check: expands f*h over formal block and noise symbols and,
/// for each (k,j), locates the exponent whose coefficient is exactly
/// sum_l A_{k,l} B_{l,j} with no noise or cross terms. The resulting exponent
/// map e[k][j] is what the decoder reads the product blocks from.
struct C1Report {
    bool ok = false;
    std::vector<std::uint64_t> e_map; // m*n, row-major (k,j)
    std::string failure;

    explicit operator bool() const { return ok; }
    std::uint64_t e_at(std::size_t k, std::size_t j, std::size_t n) const { return e_map[k * n + j]; }
};

C1Report verify_c1(const DegreeAssignment& assign);

/// Noise-invertibility check: both T x T matrices [alpha_i^{c_t}] and
/// [alpha_i^{d_t}] must be non-singular for every T-subset of the evaluation
/// points. Runs all C(N,T) subsets when exhaustive, a sampled batch otherwise;
/// consecutive exponent runs are additionally recognized analytically
/// (diag(alpha^base) * Vandermonde).
struct C2Report {
    bool ok = false;
    bool exhaustive = false;
    std::size_t subsets_checked = 0;
    bool c_consecutive = false; // analytic shortcut applied to the c-exponents
    bool d_consecutive = false;
    std::vector<std::size_t> singular_subset; // 1-based worker indices of first failure
    std::string failure;

    explicit operator bool() const { return ok; }
};

C2Report verify_c2(const DegreeAssignment& assign, std::span<const FieldElement> alphas,
                   bool exhaustive, std::size_t sampled_subsets = 200, std::uint64_t seed = 1);

/// Encode-time C2 gate. Consecutive exponent runs are invertible analytically
/// (diag(alpha^base) * Vandermonde over distinct non-zero points); anything
/// else gets a sampled determinant screen. Throws ValidationError on failure.
void require_c2(const DegreeAssignment& assign, std::span<const FieldElement> alphas);

/// Determinant-based invertibility over F_q (Gaussian elimination).
bool is_invertible(std::vector<std::uint64_t> matrix, std::size_t dim, std::uint64_t q);

enum class ThresholdFamily { PolyV1, PolyV2, PolyV3, PolyMin, PolyExplicit, Lagrange };

struct ThresholdReport {
    std::uint64_t K = 0;
    ThresholdFamily family = ThresholdFamily::PolyMin;
    PresetVariant chosen_variant = PresetVariant::V1; // meaningful for PolyMin
    std::size_t m = 0, p = 0, n = 0, T = 0;
    std::size_t R = 0; // lagrange only
};

/// Closed-form recovery thresholds. Lagrange needs R; PolyExplicit needs the
/// assignment. PolyMin ties break in listed order V1, V2, V3.
ThresholdReport recovery_threshold(ThresholdFamily family, std::size_t m, std::size_t p,
                                   std::size_t n, std::size_t T,
                                   std::optional<std::size_t> R = std::nullopt,
                                   const DegreeAssignment* assign = nullptr);

/// Everything the decoder needs to turn >= K responses into the product.
struct DecodePlan {
    Family family = Family::PolyCode;
    std::uint64_t K = 0;
    std::size_t m = 0, n = 0;
    std::size_t block_rows = 0, block_cols = 0;
    std::vector<std::uint64_t> e_map;      // poly family: from verify_c1
    std::optional<BilinearTensor> tensor;  // lagrange family
    std::vector<FieldElement> betas;       // lagrange family
};

/// Responses are (worker index, Y_i) pairs with 1-based indices into the alpha
/// schedule. Uses the first K responses given; throws BelowThresholdError with
/// fewer.
Matrix smm_decode(std::span<const std::pair<std::size_t, Matrix>> responses,
                  std::span<const FieldElement> alphas, const DecodePlan& plan);

// --- encoders ------------------------------------------------------------

/// f(alpha_i) for the polynomial-code encoding of one partitioned matrix:
/// sum over blocks of X_{k,l} x^{exp(k,l)} plus the T noise blocks at the
/// noise exponents. Returns one share per alpha.
std::vector<Matrix> encode_poly_shares(const BlockGrid& blocks,
                                       std::span<const std::uint64_t> block_exponents,
                                       std::span<const Matrix> noise_blocks,
                                       std::span<const std::uint64_t> noise_exponents,
                                       std::span<const FieldElement> alphas);

/// Evaluations at every alpha of the degree R+T-1 interpolant through
/// (beta_r -> batch[r], beta_{R+t} -> noise[t]).
std::vector<Matrix> encode_lagrange_shares(std::span<const Matrix> batch,
                                           std::span<const Matrix> noise_blocks,
                                           std::span<const FieldElement> betas,
                                           std::span<const FieldElement> alphas);

/// Full SMM sharing state: per-worker share pairs plus the decode plan.
struct SmmShares {
    std::vector<Matrix> a_shares;
    std::vector<Matrix> b_shares;
    EvaluationPoints points;
    DecodePlan plan;
    std::vector<Matrix> noise_a; // retained for structural tests/audits
    std::vector<Matrix> noise_b;
};

SmmShares smm_poly_encode(const Matrix& A, const Matrix& B, const DegreeAssignment& assign,
                          const EvaluationPoints& points, NoiseSource& noise);
SmmShares smm_lagrange_encode(const Matrix& A, const Matrix& B, const BilinearTensor& tensor,
                              std::size_t T, const EvaluationPoints& points, NoiseSource& noise);

} // namespace copmm
