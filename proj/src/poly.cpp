#include "copmm/poly.hpp"

#include <algorithm>
#include <unordered_set>

namespace copmm {

MatrixPolynomial::MatrixPolynomial(std::vector<Matrix> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.empty())
        throw ValidationError("polynomial needs at least one coefficient");
    for (const Matrix& c : coeffs_) {
        if (c.rows() != coeffs_.front().rows() || c.cols() != coeffs_.front().cols()
            || c.field() != coeffs_.front().field())
            throw ValidationError("polynomial coefficients have mismatched shapes");
    }
}

MatrixPolynomial MatrixPolynomial::from_sparse(std::span<const std::pair<std::uint64_t, Matrix>> terms) {
    if (terms.empty())
        throw ValidationError("polynomial needs at least one term");
    for (std::size_t i = 1; i < terms.size(); ++i)
        if (terms[i].first <= terms[i - 1].first)
            throw ValidationError("sparse exponents must be strictly increasing");
    const Matrix& proto = terms.front().second;
    std::vector<Matrix> coeffs(terms.back().first + 1,
                               Matrix::zero(proto.rows(), proto.cols(), proto.field()));
    for (const auto& [e, mat] : terms) coeffs[e] = mat;
    return MatrixPolynomial(std::move(coeffs));
}

Matrix MatrixPolynomial::evaluate(const FieldElement& x) const {
    if (x.modulus() != coeffs_.front().modulus())
        throw ValidationError("evaluation point belongs to a different field");
    Matrix acc = coeffs_.back();
    for (std::size_t r = coeffs_.size() - 1; r-- > 0;) {
        acc = acc.scaled(x.value());
        acc += coeffs_[r];
    }
    return acc;
}

MatrixPolynomial interpolate(std::span<const std::pair<FieldElement, Matrix>> points,
                             std::size_t degree_bound) {
    const std::size_t k = degree_bound + 1;
    if (points.size() < k)
        throw BelowThresholdError("below recovery threshold: " + std::to_string(points.size())
                                  + " points for degree bound " + std::to_string(degree_bound));
    if (points.size() > k)
        throw ValidationError("too many interpolation points for the degree bound");

    const FieldConfig field = points.front().second.field();
    const std::uint64_t q = field.modulus();
    std::unordered_set<std::uint64_t> seen;
    for (const auto& [x, y] : points) {
        if (x.modulus() != q || y.field() != field)
            throw ValidationError("interpolation data belongs to a different field");
        if (!seen.insert(x.value()).second)
            throw ValidationError("duplicate x-values in interpolation data");
    }

    // Master polynomial M(x) = prod (x - x_i), then per-point synthetic division
    // gives the Lagrange basis coefficients in O(k^2) scalar work.
    std::vector<std::uint64_t> master(k + 1, 0);
    master[0] = 1;
    for (std::size_t i = 0; i < k; ++i) {
        const std::uint64_t xi = points[i].first.value();
        for (std::size_t d = i + 1; d-- > 0;) {
            master[d + 1] = fq::add(master[d + 1], master[d], q);
            master[d] = fq::mul(master[d], fq::neg(xi, q), q);
        }
    }

    const std::size_t rows = points.front().second.rows();
    const std::size_t cols = points.front().second.cols();
    std::vector<Matrix> coeffs(k, Matrix::zero(rows, cols, field));
    std::vector<std::uint64_t> quotient(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        const std::uint64_t xi = points[i].first.value();
        // Q(x) = M(x) / (x - x_i).
        std::uint64_t carry = master[k];
        for (std::size_t d = k; d-- > 0;) {
            quotient[d] = carry;
            carry = fq::add(master[d], fq::mul(xi, carry, q), q);
        }
        // Q(x_i) = prod_{j != i} (x_i - x_j) is the basis denominator.
        std::uint64_t denom = 0;
        std::uint64_t power = 1;
        for (std::size_t d = 0; d < k; ++d) {
            denom = fq::add(denom, fq::mul(quotient[d], power, q), q);
            power = fq::mul(power, xi, q);
        }
        const std::uint64_t w = fq::inv(denom, q);
        for (std::size_t d = 0; d < k; ++d) {
            const std::uint64_t basis_coeff = fq::mul(w, quotient[d], q);
            coeffs[d].add_scaled(points[i].second, basis_coeff);
        }
    }
    return MatrixPolynomial(std::move(coeffs));
}

FieldElement lagrange_basis_eval(std::span<const FieldElement> betas, std::size_t k,
                                 const FieldElement& x) {
    if (k == 0 || k > betas.size())
        throw ValidationError("lagrange basis index out of range");
    const std::uint64_t q = x.modulus();
    std::uint64_t num = 1, den = 1;
    const std::uint64_t bk = betas[k - 1].value();
    for (std::size_t j = 0; j < betas.size(); ++j) {
        if (j == k - 1) continue;
        const std::uint64_t bj = betas[j].value();
        if (bj == bk)
            throw ValidationError("duplicate interpolation points");
        num = fq::mul(num, fq::sub(x.value(), bj, q), q);
        den = fq::mul(den, fq::sub(bk, bj, q), q);
    }
    return FieldElement(fq::mul(num, fq::inv(den, q), q), x.field());
}

EvaluationPoints default_poly_points(const FieldConfig& field, std::size_t N) {
    if (N == 0)
        throw ValidationError("need at least one worker");
    if (field.modulus() < N + 1)
        throw ValidationError("field too small: need q >= N+1 distinct non-zero points");
    EvaluationPoints pts;
    pts.alphas.reserve(N);
    for (std::size_t i = 1; i <= N; ++i) pts.alphas.emplace_back(i, field);
    return pts;
}

EvaluationPoints default_lagrange_points(const FieldConfig& field, std::size_t N,
                                         std::size_t R, std::size_t T) {
    if (N == 0 || R == 0 || T == 0)
        throw ValidationError("N, R and T must be at least 1");
    if (field.modulus() < N + R + T)
        throw ValidationError("field too small: need q >= N+R+T distinct points");
    EvaluationPoints pts;
    pts.betas.reserve(R + T);
    for (std::size_t r = 1; r <= R + T; ++r) pts.betas.emplace_back(r, field);
    pts.alphas.reserve(N);
    for (std::size_t i = 1; i <= N; ++i)
        pts.alphas.emplace_back((R + T + i) % field.modulus(), field);
    return pts;
}

void validate_poly_points(const EvaluationPoints& pts, const FieldConfig& field) {
    std::unordered_set<std::uint64_t> seen;
    for (const FieldElement& a : pts.alphas) {
        if (a.modulus() != field.modulus())
            throw ValidationError("evaluation point belongs to a different field");
        if (a.is_zero())
            throw ValidationError("polynomial-code evaluation points must be non-zero");
        if (!seen.insert(a.value()).second)
            throw ValidationError("evaluation points must be pairwise distinct");
    }
}

void validate_lagrange_points(const EvaluationPoints& pts, const FieldConfig& field,
                              std::size_t R, std::size_t T) {
    if (pts.betas.size() != R + T)
        throw ValidationError("lagrange mode needs exactly R+T betas");
    std::unordered_set<std::uint64_t> seen;
    for (const FieldElement& b : pts.betas) {
        if (b.modulus() != field.modulus())
            throw ValidationError("evaluation point belongs to a different field");
        if (!seen.insert(b.value()).second)
            throw ValidationError("evaluation points must be pairwise distinct");
    }
    for (const FieldElement& a : pts.alphas) {
        if (a.modulus() != field.modulus())
            throw ValidationError("evaluation point belongs to a different field");
        if (!seen.insert(a.value()).second)
            throw ValidationError("alphas and betas must be pairwise distinct");
    }
}

} // namespace copmm
