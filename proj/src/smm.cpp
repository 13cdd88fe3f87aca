#include "copmm/smm.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace copmm {

std::string family_name(Family f) {
    return f == Family::PolyCode ? "poly" : "lagrange";
}

DegreeAssignment::DegreeAssignment(std::size_t m_, std::size_t p_, std::size_t n_, std::size_t T_,
                                   std::vector<std::uint64_t> a_, std::vector<std::uint64_t> b_,
                                   std::vector<std::uint64_t> c_, std::vector<std::uint64_t> d_)
    : m(m_), p(p_), n(n_), T(T_), a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
    if (m == 0 || p == 0 || n == 0)
        throw ValidationError("partition parameters must be at least 1");
    if (T == 0)
        throw ValidationError("T must be at least 1: non-secure multiplication is out of scope");
    if (a.size() != m * p || b.size() != p * n || c.size() != T || d.size() != T)
        throw ValidationError("degree assignment arrays do not match (m,p,n,T)");
    std::set<std::uint64_t> cs(c.begin(), c.end()), ds(d.begin(), d.end());
    if (cs.size() != T)
        throw ValidationError("c exponents must be pairwise distinct");
    if (ds.size() != T)
        throw ValidationError("d exponents must be pairwise distinct");
}

std::uint64_t DegreeAssignment::max_a_c() const {
    return std::max(*std::max_element(a.begin(), a.end()), *std::max_element(c.begin(), c.end()));
}

std::uint64_t DegreeAssignment::max_b_d() const {
    return std::max(*std::max_element(b.begin(), b.end()), *std::max_element(d.begin(), d.end()));
}

DegreeAssignment preset_assignment(PresetVariant variant, std::size_t m, std::size_t p,
                                   std::size_t n, std::size_t T) {
    if (m == 0 || p == 0 || n == 0 || T == 0)
        throw ValidationError("preset parameters must be at least 1");
    std::vector<std::uint64_t> a(m * p), b(p * n), c(T), d(T);
    switch (variant) {
        case PresetVariant::V1:
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < p; ++l)
                    a[k * p + l] = k * (n * p + T) + l;
            for (std::size_t l = 0; l < p; ++l)
                for (std::size_t j = 0; j < n; ++j)
                    b[l * n + j] = (j + 1) * p - (l + 1);
            for (std::size_t t = 0; t < T; ++t) {
                c[t] = (m - 1) * (n * p + T) + n * p + t;
                d[t] = n * p + t;
            }
            break;
        case PresetVariant::V2:
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < p; ++l)
                    a[k * p + l] = k * p + l;
            for (std::size_t l = 0; l < p; ++l)
                for (std::size_t j = 0; j < n; ++j)
                    b[l * n + j] = j * (m * p + T) + p - (l + 1);
            for (std::size_t t = 0; t < T; ++t) {
                c[t] = m * p + t;
                d[t] = (n - 1) * (m * p + T) + m * p + t;
            }
            break;
        case PresetVariant::V3:
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < p; ++l)
                    a[k * p + l] = k * n * p + l;
            for (std::size_t l = 0; l < p; ++l)
                for (std::size_t j = 0; j < n; ++j)
                    b[l * n + j] = (j + 1) * p - (l + 1);
            for (std::size_t t = 0; t < T; ++t) {
                c[t] = m * p * n + t;
                d[t] = m * p * n + t;
            }
            break;
    }
    return DegreeAssignment(m, p, n, T, std::move(a), std::move(b), std::move(c), std::move(d));
}

namespace {

// Formal term of f or h: a data block, or a noise block.
struct Term {
    bool is_noise;
    std::size_t i, j; // block index (k,l) / (l,j); noise: (t,0)
};

std::string term_name(const Term& t, bool a_side) {
    std::ostringstream os;
    if (t.is_noise)
        os << (a_side ? "Z^A_" : "Z^B_") << t.i + 1;
    else
        os << (a_side ? "A[" : "B[") << t.i + 1 << "," << t.j + 1 << "]";
    return os.str();
}

} // namespace

C1Report verify_c1(const DegreeAssignment& assign) {
    C1Report report;
    const std::size_t m = assign.m, p = assign.p, n = assign.n, T = assign.T;

    // Bucket every product term of f*h by exponent.
    std::map<std::uint64_t, std::vector<std::pair<Term, Term>>> buckets;
    std::vector<std::pair<Term, std::uint64_t>> f_terms, h_terms;
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < p; ++l)
            f_terms.push_back({{false, k, l}, assign.a_at(k, l)});
    for (std::size_t t = 0; t < T; ++t) f_terms.push_back({{true, t, 0}, assign.c[t]});
    for (std::size_t l = 0; l < p; ++l)
        for (std::size_t j = 0; j < n; ++j)
            h_terms.push_back({{false, l, j}, assign.b_at(l, j)});
    for (std::size_t t = 0; t < T; ++t) h_terms.push_back({{true, t, 0}, assign.d[t]});
    for (const auto& [ft, fe] : f_terms)
        for (const auto& [ht, he] : h_terms)
            buckets[fe + he].push_back({ft, ht});

    report.e_map.assign(m * n, 0);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::uint64_t e = assign.a_at(k, 0) + assign.b_at(0, j);
            // All p partial products A_{k,l} B_{l,j} must land on one exponent.
            for (std::size_t l = 0; l < p; ++l) {
                if (assign.a_at(k, l) + assign.b_at(l, j) != e) {
                    std::ostringstream os;
                    os << "C1 violated: a[" << k + 1 << "," << l + 1 << "]+b[" << l + 1 << ","
                       << j + 1 << "] = " << assign.a_at(k, l) + assign.b_at(l, j)
                       << " but the (k=" << k + 1 << ",j=" << j + 1 << ") products start at exponent " << e;
                    report.failure = os.str();
                    return report;
                }
            }
            // ... and that exponent must carry nothing else.
            const auto& bucket = buckets[e];
            std::size_t desired = 0;
            for (const auto& [ft, ht] : bucket) {
                const bool is_desired = !ft.is_noise && !ht.is_noise && ft.i == k && ht.j == j && ft.j == ht.i;
                if (is_desired) {
                    ++desired;
                } else {
                    std::ostringstream os;
                    os << "C1 violated: exponent " << e << " for C[" << k + 1 << "," << j + 1
                       << "] collides with " << term_name(ft, true) << "*" << term_name(ht, false);
                    report.failure = os.str();
                    return report;
                }
            }
            if (desired != p) {
                std::ostringstream os;
                os << "C1 violated: exponent " << e << " holds " << desired << " of the " << p
                   << " desired products for C[" << k + 1 << "," << j + 1 << "]";
                report.failure = os.str();
                return report;
            }
            report.e_map[k * n + j] = e;
        }
    }
    report.ok = true;
    return report;
}

bool is_invertible(std::vector<std::uint64_t> matrix, std::size_t dim, std::uint64_t q) {
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t pivot = col;
        while (pivot < dim && matrix[pivot * dim + col] == 0) ++pivot;
        if (pivot == dim) return false;
        if (pivot != col)
            for (std::size_t j = 0; j < dim; ++j)
                std::swap(matrix[pivot * dim + j], matrix[col * dim + j]);
        const std::uint64_t inv_p = fq::inv(matrix[col * dim + col], q);
        for (std::size_t row = col + 1; row < dim; ++row) {
            const std::uint64_t factor = fq::mul(matrix[row * dim + col], inv_p, q);
            if (factor == 0) continue;
            for (std::size_t j = col; j < dim; ++j)
                matrix[row * dim + j] =
                    fq::sub(matrix[row * dim + j], fq::mul(factor, matrix[col * dim + j], q), q);
        }
    }
    return true;
}

namespace {

bool exponents_consecutive(std::span<const std::uint64_t> e) {
    for (std::size_t i = 1; i < e.size(); ++i)
        if (e[i] != e[i - 1] + 1) return false;
    return true;
}

bool subset_invertible(std::span<const FieldElement> alphas, std::span<const std::size_t> subset,
                       std::span<const std::uint64_t> exps, std::uint64_t q) {
    const std::size_t T = subset.size();
    std::vector<std::uint64_t> mat(T * T);
    for (std::size_t r = 0; r < T; ++r)
        for (std::size_t t = 0; t < T; ++t)
            mat[r * T + t] = fq::pow(alphas[subset[r]].value(), exps[t], q);
    return is_invertible(std::move(mat), T, q);
}

// Enumerates T-subsets of [0, N) in lexicographic order, invoking fn on each;
// fn returns false to abort.
template <typename Fn>
bool for_each_subset(std::size_t N, std::size_t T, Fn&& fn) {
    std::vector<std::size_t> idx(T);
    for (std::size_t i = 0; i < T; ++i) idx[i] = i;
    while (true) {
        if (!fn(std::span<const std::size_t>(idx))) return false;
        std::size_t i = T;
        while (i-- > 0) {
            if (idx[i] != i + N - T) {
                ++idx[i];
                for (std::size_t j = i + 1; j < T; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return true;
        }
    }
}

} // namespace

C2Report verify_c2(const DegreeAssignment& assign, std::span<const FieldElement> alphas,
                   bool exhaustive, std::size_t sampled_subsets, std::uint64_t seed) {
    C2Report report;
    const std::size_t N = alphas.size();
    const std::size_t T = assign.T;
    if (N < T)
        throw ValidationError("need at least T evaluation points");
    const std::uint64_t q = alphas.front().modulus();
    for (const FieldElement& a : alphas)
        if (a.is_zero())
            throw ValidationError("C2 requires non-zero evaluation points");

    report.c_consecutive = exponents_consecutive(assign.c);
    report.d_consecutive = exponents_consecutive(assign.d);
    report.exhaustive = exhaustive;

    const auto check_subset = [&](std::span<const std::size_t> subset) {
        ++report.subsets_checked;
        if (!subset_invertible(alphas, subset, assign.c, q)
            || !subset_invertible(alphas, subset, assign.d, q)) {
            report.singular_subset.assign(subset.begin(), subset.end());
            for (auto& v : report.singular_subset) ++v; // report 1-based worker ids
            std::ostringstream os;
            os << "C2 violated: singular noise matrix for worker subset {";
            for (std::size_t i = 0; i < subset.size(); ++i) os << (i ? "," : "") << subset[i] + 1;
            os << "}";
            report.failure = os.str();
            return false;
        }
        return true;
    };

    if (exhaustive) {
        if (!for_each_subset(N, T, check_subset)) return report;
    } else {
        SplitMix64 rng(seed);
        std::vector<std::size_t> subset(T);
        for (std::size_t s = 0; s < sampled_subsets; ++s) {
            std::vector<std::size_t> pool(N);
            for (std::size_t i = 0; i < N; ++i) pool[i] = i;
            for (std::size_t i = 0; i < T; ++i) {
                const std::size_t pick = i + rng.next_below(N - i);
                std::swap(pool[i], pool[pick]);
                subset[i] = pool[i];
            }
            std::sort(subset.begin(), subset.end());
            if (!check_subset(subset)) return report;
        }
    }
    report.ok = true;
    return report;
}

void require_c2(const DegreeAssignment& assign, std::span<const FieldElement> alphas) {
    if (exponents_consecutive(assign.c) && exponents_consecutive(assign.d)) return;
    const C2Report r = verify_c2(assign, alphas, false, 32);
    if (!r.ok) throw ValidationError(r.failure);
}

ThresholdReport recovery_threshold(ThresholdFamily family, std::size_t m, std::size_t p,
                                   std::size_t n, std::size_t T,
                                   std::optional<std::size_t> R, const DegreeAssignment* assign) {
    if (m == 0 || p == 0 || n == 0)
        throw ValidationError("partition parameters must be at least 1");
    if (T == 0)
        throw ValidationError("T must be at least 1");
    ThresholdReport report;
    report.family = family;
    report.m = m; report.p = p; report.n = n; report.T = T;
    const std::uint64_t k1 = (m + 1) * (n * p + T) - 1;
    const std::uint64_t k2 = (n + 1) * (m * p + T) - 1;
    const std::uint64_t k3 = 2 * m * p * n + 2 * T - 1;
    switch (family) {
        case ThresholdFamily::PolyV1: report.K = k1; break;
        case ThresholdFamily::PolyV2: report.K = k2; break;
        case ThresholdFamily::PolyV3: report.K = k3; break;
        case ThresholdFamily::PolyMin:
            report.K = k1;
            report.chosen_variant = PresetVariant::V1;
            if (k2 < report.K) { report.K = k2; report.chosen_variant = PresetVariant::V2; }
            if (k3 < report.K) { report.K = k3; report.chosen_variant = PresetVariant::V3; }
            break;
        case ThresholdFamily::PolyExplicit:
            if (assign == nullptr)
                throw ValidationError("explicit threshold needs a degree assignment");
            report.K = assign->threshold();
            break;
        case ThresholdFamily::Lagrange:
            if (!R.has_value())
                throw ValidationError("lagrange threshold needs the tensor rank R");
            report.R = *R;
            report.K = 2 * *R + 2 * T - 1;
            break;
    }
    return report;
}

std::vector<Matrix> encode_poly_shares(const BlockGrid& blocks,
                                       std::span<const std::uint64_t> block_exponents,
                                       std::span<const Matrix> noise_blocks,
                                       std::span<const std::uint64_t> noise_exponents,
                                       std::span<const FieldElement> alphas) {
    if (blocks.blocks.size() != block_exponents.size())
        throw ValidationError("block and exponent counts differ");
    if (noise_blocks.size() != noise_exponents.size())
        throw ValidationError("noise block and exponent counts differ");
    const FieldConfig field = blocks.blocks.front().field();
    const std::uint64_t q = field.modulus();
    std::vector<Matrix> shares;
    shares.reserve(alphas.size());
    for (const FieldElement& alpha : alphas) {
        Matrix share(blocks.block_rows(), blocks.block_cols(), field);
        for (std::size_t i = 0; i < blocks.blocks.size(); ++i)
            share.add_scaled(blocks.blocks[i].to_matrix(),
                             fq::pow(alpha.value(), block_exponents[i], q));
        for (std::size_t t = 0; t < noise_blocks.size(); ++t)
            share.add_scaled(noise_blocks[t], fq::pow(alpha.value(), noise_exponents[t], q));
        shares.push_back(std::move(share));
    }
    return shares;
}

std::vector<Matrix> encode_lagrange_shares(std::span<const Matrix> batch,
                                           std::span<const Matrix> noise_blocks,
                                           std::span<const FieldElement> betas,
                                           std::span<const FieldElement> alphas) {
    const std::size_t R = batch.size();
    const std::size_t T = noise_blocks.size();
    if (betas.size() != R + T)
        throw ValidationError("need exactly R+T interpolation points");
    const FieldConfig field = batch.front().field();
    std::vector<Matrix> shares;
    shares.reserve(alphas.size());
    for (const FieldElement& alpha : alphas) {
        Matrix share(batch.front().rows(), batch.front().cols(), field);
        for (std::size_t r = 0; r < R; ++r)
            share.add_scaled(batch[r], lagrange_basis_eval(betas, r + 1, alpha).value());
        for (std::size_t t = 0; t < T; ++t)
            share.add_scaled(noise_blocks[t], lagrange_basis_eval(betas, R + t + 1, alpha).value());
        shares.push_back(std::move(share));
    }
    return shares;
}

Matrix smm_decode(std::span<const std::pair<std::size_t, Matrix>> responses,
                  std::span<const FieldElement> alphas, const DecodePlan& plan) {
    if (responses.size() < plan.K)
        throw BelowThresholdError("below recovery threshold: have "
                                  + std::to_string(responses.size()) + " responses, need "
                                  + std::to_string(plan.K));
    std::vector<std::pair<FieldElement, Matrix>> points;
    points.reserve(plan.K);
    for (std::size_t i = 0; i < plan.K; ++i) {
        const auto& [worker, Y] = responses[i];
        if (worker == 0 || worker > alphas.size())
            throw ValidationError("response carries an unknown worker id");
        if (Y.rows() != plan.block_rows || Y.cols() != plan.block_cols)
            throw ValidationError("response block has inconsistent dimensions");
        points.emplace_back(alphas[worker - 1], Y);
    }
    const MatrixPolynomial g = interpolate(points, plan.K - 1);

    std::vector<Matrix> grid;
    grid.reserve(plan.m * plan.n);
    if (plan.family == Family::PolyCode) {
        for (std::size_t k = 0; k < plan.m; ++k)
            for (std::size_t j = 0; j < plan.n; ++j)
                grid.push_back(g.coeff(plan.e_map[k * plan.n + j]));
    } else {
        const BilinearTensor& t = plan.tensor.value();
        std::vector<Matrix> products;
        products.reserve(t.R);
        for (std::size_t r = 0; r < t.R; ++r)
            products.push_back(g.evaluate(plan.betas[r]));
        grid = recombine(products, t);
    }
    return assemble_blocks(grid, plan.m, plan.n);
}

namespace {

std::vector<Matrix> draw_noise_blocks(std::size_t count, std::size_t rows, std::size_t cols,
                                      const FieldConfig& field, NoiseSource& noise) {
    std::vector<Matrix> out;
    out.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        Matrix z(rows, cols, field);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                z.set_raw(r, c, noise.next_scalar(field));
        out.push_back(std::move(z));
    }
    return out;
}

} // namespace

SmmShares smm_poly_encode(const Matrix& A, const Matrix& B, const DegreeAssignment& assign,
                          const EvaluationPoints& points, NoiseSource& noise) {
    const FieldConfig field = A.field();
    if (B.field() != field)
        throw ValidationError("matrices belong to different fields");
    validate_poly_points(points, field);
    const C1Report c1 = verify_c1(assign);
    if (!c1) throw ValidationError(c1.failure);
    require_c2(assign, points.alphas);
    const PartitionSpec spec(assign.m, assign.p, assign.n);
    const BlockGrid ga = partition(A, spec, Side::A);
    const BlockGrid gb = partition(B, spec, Side::B);

    SmmShares out;
    out.points = points;
    // Noise draw order: the T A-side blocks, then the T B-side blocks.
    out.noise_a = draw_noise_blocks(assign.T, ga.block_rows(), ga.block_cols(), field, noise);
    out.noise_b = draw_noise_blocks(assign.T, gb.block_rows(), gb.block_cols(), field, noise);
    out.a_shares = encode_poly_shares(ga, assign.a, out.noise_a, assign.c, points.alphas);
    out.b_shares = encode_poly_shares(gb, assign.b, out.noise_b, assign.d, points.alphas);

    out.plan.family = Family::PolyCode;
    out.plan.K = assign.threshold();
    out.plan.m = assign.m;
    out.plan.n = assign.n;
    out.plan.block_rows = ga.block_rows();
    out.plan.block_cols = gb.block_cols();
    out.plan.e_map = c1.e_map;
    return out;
}

SmmShares smm_lagrange_encode(const Matrix& A, const Matrix& B, const BilinearTensor& tensor,
                              std::size_t T, const EvaluationPoints& points, NoiseSource& noise) {
    const FieldConfig field = A.field();
    if (B.field() != field)
        throw ValidationError("matrices belong to different fields");
    if (T == 0)
        throw ValidationError("T must be at least 1");
    validate_lagrange_points(points, field, tensor.R, T);
    const PartitionSpec spec(tensor.m, tensor.p, tensor.n);
    const BlockGrid ga = partition(A, spec, Side::A);
    const BlockGrid gb = partition(B, spec, Side::B);
    const std::vector<Matrix> batch_a = batch_encode_A(ga, tensor);
    const std::vector<Matrix> batch_b = batch_encode_B(gb, tensor);

    SmmShares out;
    out.points = points;
    out.noise_a = draw_noise_blocks(T, ga.block_rows(), ga.block_cols(), field, noise);
    out.noise_b = draw_noise_blocks(T, gb.block_rows(), gb.block_cols(), field, noise);
    out.a_shares = encode_lagrange_shares(batch_a, out.noise_a, points.betas, points.alphas);
    out.b_shares = encode_lagrange_shares(batch_b, out.noise_b, points.betas, points.alphas);

    out.plan.family = Family::LagrangeCode;
    out.plan.K = 2 * tensor.R + 2 * T - 1;
    out.plan.m = tensor.m;
    out.plan.n = tensor.n;
    out.plan.block_rows = ga.block_rows();
    out.plan.block_cols = gb.block_cols();
    out.plan.tensor = tensor;
    out.plan.betas = points.betas;
    return out;
}

} // namespace copmm
