#include "doctest.h"

#include "copmm/poly.hpp"

using namespace copmm;

namespace {

const FieldConfig f7(7);
const FieldConfig f101(101);

Matrix scalar(std::uint64_t v, const FieldConfig& f) {
    const std::uint64_t vals[] = {v};
    return Matrix::from_values(1, 1, f, vals);
}

} // namespace

TEST_CASE("evaluate") {
    // scalar coefficients [1,2,3]: at x=2 over q=7, 1+4+12 = 17 = 3 mod 7
    MatrixPolynomial poly({scalar(1, f7), scalar(2, f7), scalar(3, f7)});
    CHECK(poly.evaluate(FieldElement(2, f7)).raw(0, 0) == 3);
    CHECK(poly.evaluate(FieldElement(0, f7)) == scalar(1, f7));

    MatrixPolynomial constant({scalar(4, f7)});
    for (std::uint64_t x = 0; x < 7; ++x)
        CHECK(constant.evaluate(FieldElement(x, f7)) == scalar(4, f7));
}

TEST_CASE("sparse construction") {
    std::vector<std::pair<std::uint64_t, Matrix>> terms;
    terms.emplace_back(0, scalar(5, f7));
    terms.emplace_back(3, scalar(2, f7));
    MatrixPolynomial poly = MatrixPolynomial::from_sparse(terms);
    CHECK(poly.degree() == 3);
    CHECK(poly.coeff(1).is_zero());
    CHECK(poly.coeff(3) == scalar(2, f7));

    std::vector<std::pair<std::uint64_t, Matrix>> dup;
    dup.emplace_back(2, scalar(1, f7));
    dup.emplace_back(2, scalar(2, f7));
    CHECK_THROWS_AS(MatrixPolynomial::from_sparse(dup), ValidationError);
}

TEST_CASE("interpolate two points") {
    // (0, c0), (1, c0+c1) -> coefficients [c0, c1]
    std::vector<std::pair<FieldElement, Matrix>> pts;
    pts.emplace_back(FieldElement(0, f7), scalar(3, f7));
    pts.emplace_back(FieldElement(1, f7), scalar(5, f7)); // 3 + 2
    MatrixPolynomial poly = interpolate(pts, 1);
    CHECK(poly.coeff(0) == scalar(3, f7));
    CHECK(poly.coeff(1) == scalar(2, f7));
}

TEST_CASE("interpolating constant data") {
    std::vector<std::pair<FieldElement, Matrix>> pts;
    for (std::uint64_t x = 1; x <= 4; ++x) pts.emplace_back(FieldElement(x, f101), scalar(9, f101));
    MatrixPolynomial poly = interpolate(pts, 3);
    CHECK(poly.coeff(0) == scalar(9, f101));
    for (std::size_t r = 1; r <= 3; ++r) CHECK(poly.coeff(r).is_zero());
}

TEST_CASE("round trip: evaluate then interpolate recovers coefficients") {
    SplitMix64 rng(23);
    std::vector<Matrix> coeffs;
    for (int i = 0; i < 6; ++i) coeffs.push_back(Matrix::random(2, 3, f101, rng));
    MatrixPolynomial poly(coeffs);
    std::vector<std::pair<FieldElement, Matrix>> pts;
    for (std::uint64_t x = 10; x < 16; ++x) {
        FieldElement xe(x, f101);
        pts.emplace_back(xe, poly.evaluate(xe));
    }
    MatrixPolynomial back = interpolate(pts, 5);
    for (std::size_t r = 0; r <= 5; ++r) CHECK(back.coeff(r) == coeffs[r]);
}

TEST_CASE("reed-solomon consistency across point subsets") {
    SplitMix64 rng(29);
    std::vector<Matrix> coeffs;
    for (int i = 0; i < 4; ++i) coeffs.push_back(Matrix::random(1, 2, f101, rng));
    MatrixPolynomial poly(coeffs);
    std::vector<std::pair<FieldElement, Matrix>> s1, s2;
    for (std::uint64_t x : {1, 2, 3, 4}) {
        FieldElement xe(x, f101);
        s1.emplace_back(xe, poly.evaluate(xe));
    }
    for (std::uint64_t x : {50, 61, 72, 93}) {
        FieldElement xe(x, f101);
        s2.emplace_back(xe, poly.evaluate(xe));
    }
    MatrixPolynomial p1 = interpolate(s1, 3), p2 = interpolate(s2, 3);
    for (std::size_t r = 0; r <= 3; ++r) CHECK(p1.coeff(r) == p2.coeff(r));
}

TEST_CASE("interpolation errors") {
    std::vector<std::pair<FieldElement, Matrix>> pts;
    pts.emplace_back(FieldElement(1, f7), scalar(1, f7));
    pts.emplace_back(FieldElement(1, f7), scalar(2, f7));
    CHECK_THROWS_AS(interpolate(pts, 1), ValidationError);
    pts.pop_back();
    CHECK_THROWS_AS(interpolate(pts, 1), BelowThresholdError);
}

TEST_CASE("evaluate(interpolate(S)) passes through every point") {
    SplitMix64 rng(31);
    std::vector<std::pair<FieldElement, Matrix>> pts;
    for (std::uint64_t x : {2, 5, 9, 40, 77}) pts.emplace_back(FieldElement(x, f101), Matrix::random(2, 2, f101, rng));
    MatrixPolynomial poly = interpolate(pts, 4);
    for (const auto& [x, y] : pts) CHECK(poly.evaluate(x) == y);
}

TEST_CASE("lagrange basis properties") {
    std::vector<FieldElement> betas{FieldElement(1, f101), FieldElement(2, f101),
                                    FieldElement(3, f101), FieldElement(4, f101)};
    for (std::size_t k = 1; k <= betas.size(); ++k)
        for (std::size_t j = 1; j <= betas.size(); ++j)
            CHECK(lagrange_basis_eval(betas, k, betas[j - 1]).value() == (k == j ? 1 : 0));

    // partition of unity at arbitrary x
    for (std::uint64_t x : {0, 7, 55, 100}) {
        FieldElement sum(0, f101);
        for (std::size_t k = 1; k <= betas.size(); ++k)
            sum += lagrange_basis_eval(betas, k, FieldElement(x, f101));
        CHECK(sum.value() == 1);
    }
}

TEST_CASE("lagrange basis hand value") {
    // q=11, betas=(1,2,3), k=1, x=5: ((5-2)(5-3))/((1-2)(1-3)) = 6 * inv(2) = 3
    FieldConfig f11(11);
    std::vector<FieldElement> betas{FieldElement(1, f11), FieldElement(2, f11), FieldElement(3, f11)};
    CHECK(lagrange_basis_eval(betas, 1, FieldElement(5, f11)).value() == 3);
    CHECK_THROWS_AS(lagrange_basis_eval(betas, 0, FieldElement(5, f11)), ValidationError);
    std::vector<FieldElement> dup{FieldElement(1, f11), FieldElement(1, f11)};
    CHECK_THROWS_AS(lagrange_basis_eval(dup, 1, FieldElement(5, f11)), ValidationError);
}

TEST_CASE("default point schedules") {
    FieldConfig f(101);
    EvaluationPoints poly_pts = default_poly_points(f, 10);
    CHECK(poly_pts.alphas.size() == 10);
    CHECK(poly_pts.alphas.front().value() == 1);
    CHECK_NOTHROW(validate_poly_points(poly_pts, f));
    CHECK_THROWS_AS(default_poly_points(FieldConfig(7), 7), ValidationError);

    EvaluationPoints lag = default_lagrange_points(f, 5, 7, 2);
    CHECK(lag.betas.size() == 9);
    CHECK(lag.alphas.front().value() == 10);
    CHECK_NOTHROW(validate_lagrange_points(lag, f, 7, 2));
    CHECK_THROWS_AS(default_lagrange_points(FieldConfig(11), 5, 7, 2), ValidationError);

    // q = N+R+T exactly is admissible
    CHECK_NOTHROW(default_lagrange_points(FieldConfig(5), 3, 1, 1));
}
