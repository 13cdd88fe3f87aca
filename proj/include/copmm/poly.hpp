#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "copmm/field.hpp"
#include "copmm/matrix.hpp"

namespace copmm {

/// Polynomial with matrix coefficients, dense in the exponent (index r holds
/// the coefficient of x^r). All coefficients share shape and field.
class MatrixPolynomial {
public:
    explicit MatrixPolynomial(std::vector<Matrix> coefficients);

    /// Builds the dense form from (exponent, coefficient) terms; exponents must
    /// be strictly increasing. Gaps are filled with zero matrices.
    static MatrixPolynomial from_sparse(std::span<const std::pair<std::uint64_t, Matrix>> terms);

    std::size_t degree() const { return coeffs_.size() - 1; }
    const Matrix& coeff(std::size_t r) const { return coeffs_[r]; }
    const std::vector<Matrix>& coefficients() const { return coeffs_; }

    /// Horner evaluation.
    Matrix evaluate(const FieldElement& x) const;

private:
    std::vector<Matrix> coeffs_;
};

/// Interpolates the unique polynomial of degree <= degree_bound through the
/// given points. Requires exactly degree_bound+1 points with pairwise distinct
/// x-values; fewer points signals "below recovery threshold".
MatrixPolynomial interpolate(std::span<const std::pair<FieldElement, Matrix>> points,
                             std::size_t degree_bound);

/// k-th Lagrange basis polynomial over `betas` evaluated at x (k is 1-based).
FieldElement lagrange_basis_eval(std::span<const FieldElement> betas, std::size_t k,
                                 const FieldElement& x);

/// Evaluation-point schedule. Polynomial-code strategies use the alphas only;
/// Lagrange-code strategies additionally carry the R+T interpolation betas.
struct EvaluationPoints {
    std::vector<FieldElement> alphas;
    std::vector<FieldElement> betas;
};

/// alpha_i = i for i in [N]; requires q >= N+1 so all alphas are distinct and
/// non-zero as criterion C2 demands.
EvaluationPoints default_poly_points(const FieldConfig& field, std::size_t N);

/// beta_r = r for r in [R+T], alpha_i = R+T+i; requires q >= N+R+T.
EvaluationPoints default_lagrange_points(const FieldConfig& field, std::size_t N,
                                         std::size_t R, std::size_t T);

void validate_poly_points(const EvaluationPoints& pts, const FieldConfig& field);
void validate_lagrange_points(const EvaluationPoints& pts, const FieldConfig& field,
                              std::size_t R, std::size_t T);

} // namespace copmm
