#include "copmm/audit.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

namespace copmm {

namespace {

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

using NoiseMatrixFn = std::function<std::uint64_t(std::size_t row_alpha_idx, std::size_t t)>;

Lemma1Report sweep_subsets(std::size_t N, std::size_t T, bool exhaustive,
                           std::size_t sampled_subsets, std::uint64_t seed, std::uint64_t q,
                           const NoiseMatrixFn& entry) {
    Lemma1Report report;
    report.exhaustive = exhaustive;
    const auto check = [&](std::span<const std::size_t> subset) {
        ++report.subsets_checked;
        std::vector<std::uint64_t> mat(T * T);
        for (std::size_t r = 0; r < T; ++r)
            for (std::size_t t = 0; t < T; ++t) mat[r * T + t] = entry(subset[r], t);
        if (!is_invertible(std::move(mat), T, q)) {
            report.witness.assign(subset.begin(), subset.end());
            for (auto& v : report.witness) ++v;
            std::ostringstream os;
            os << "singular noise-coefficient matrix for worker subset {";
            for (std::size_t i = 0; i < subset.size(); ++i) os << (i ? "," : "") << subset[i] + 1;
            os << "}";
            report.failure = os.str();
            return false;
        }
        return true;
    };
    if (exhaustive) {
        if (!for_each_subset(N, T, check)) return report;
    } else {
        SplitMix64 rng(seed);
        std::vector<std::size_t> subset(T), pool(N);
        for (std::size_t s = 0; s < sampled_subsets; ++s) {
            for (std::size_t i = 0; i < N; ++i) pool[i] = i;
            for (std::size_t i = 0; i < T; ++i) {
                std::swap(pool[i], pool[i + rng.next_below(N - i)]);
                subset[i] = pool[i];
            }
            std::sort(subset.begin(), subset.end());
            if (!check(subset)) return report;
        }
    }
    report.ok = true;
    return report;
}

} // namespace

Lemma1Report check_lemma1_monomial(std::span<const std::uint64_t> exponents,
                                   std::span<const FieldElement> alphas, std::size_t T,
                                   bool exhaustive, std::size_t sampled_subsets,
                                   std::uint64_t seed) {
    if (T == 0 || exponents.size() != T)
        throw ValidationError("need exactly T noise exponents");
    if (alphas.size() < T)
        throw ValidationError("need at least T evaluation points");
    const std::uint64_t q = alphas.front().modulus();
    for (const FieldElement& a : alphas)
        if (a.is_zero())
            throw ValidationError("monomial noise functions need non-zero points");
    Lemma1Report report = sweep_subsets(
        alphas.size(), T, exhaustive, sampled_subsets, seed, q,
        [&](std::size_t i, std::size_t t) { return fq::pow(alphas[i].value(), exponents[t], q); });
    report.cauchy_structure_ok = false; // not applicable in monomial mode
    return report;
}

Lemma1Report check_lemma1_lagrange(std::span<const FieldElement> betas, std::size_t R,
                                   std::size_t T, std::span<const FieldElement> alphas,
                                   bool exhaustive, std::size_t sampled_subsets,
                                   std::uint64_t seed) {
    if (R == 0 || T == 0 || betas.size() != R + T)
        throw ValidationError("need R+T interpolation points");
    if (alphas.size() < T)
        throw ValidationError("need at least T evaluation points");
    const std::uint64_t q = alphas.front().modulus();

    // Generalized Cauchy structure: the noise basis value at alpha factors as
    // v_k(alpha) * f_k(alpha) with v_k(alpha) = prod_{j in [R]} (alpha-beta_j)
    // / (beta_{R+k}-beta_j). The form is invertible provided all points are
    // pairwise distinct and every row factor v_k(alpha_i) is non-zero, i.e. no
    // alpha collides with a data beta.
    bool structure = true;
    for (const FieldElement& a : alphas) {
        for (std::size_t j = 0; j < betas.size(); ++j)
            if (a == betas[j]) structure = false;
    }
    Lemma1Report report = sweep_subsets(
        alphas.size(), T, exhaustive, sampled_subsets, seed, q, [&](std::size_t i, std::size_t t) {
            return lagrange_basis_eval(betas, R + t + 1, alphas[i]).value();
        });
    report.cauchy_structure_ok = structure;
    if (report.ok && !structure) {
        report.ok = false;
        report.failure = "an evaluation point collides with a data interpolation point";
    }
    return report;
}

// ---------------------------------------------------------------------------

namespace {

struct AuditInstance {
    RunParams params;
    std::optional<Matrix> A;
    std::optional<MatrixLibrary> libA, libB;
    NoiseLayout layout;
};

RunParams tiny_params(const TinyAuditConfig& cfg) {
    RunParams params;
    params.family = cfg.family;
    params.m = cfg.m; params.p = cfg.p; params.n = cfg.n;
    params.T = cfg.T; params.N = cfg.N;
    if (cfg.family == Family::LagrangeCode)
        params.tensor = naive_tensor(cfg.m, cfg.p, cfg.n);
    return params;
}

AuditInstance build_instance(const TinyAuditConfig& cfg) {
    AuditInstance inst;
    inst.params = tiny_params(cfg);
    const FieldConfig field(cfg.q);
    SplitMix64 rng(cfg.data_seed);
    if (cfg.problem == Problem::PSMM) {
        inst.A = Matrix::random(cfg.lambda, cfg.omega, field, rng);
        std::vector<Matrix> libb;
        for (std::size_t v = 0; v < cfg.V; ++v)
            libb.push_back(Matrix::random(cfg.omega, cfg.gamma, field, rng));
        inst.libB = MatrixLibrary(std::move(libb));
    } else if (cfg.problem == Problem::FPMM) {
        std::vector<Matrix> liba, libb;
        for (std::size_t u = 0; u < cfg.U; ++u)
            liba.push_back(Matrix::random(cfg.lambda, cfg.omega, field, rng));
        for (std::size_t v = 0; v < cfg.V; ++v)
            libb.push_back(Matrix::random(cfg.omega, cfg.gamma, field, rng));
        inst.libA = MatrixLibrary(std::move(liba));
        inst.libB = MatrixLibrary(std::move(libb));
    } else {
        throw ValidationError("exhaustive audits cover PSMM and FPMM");
    }
    inst.layout = noise_layout(cfg.problem, inst.params, cfg.U, cfg.V, cfg.lambda, cfg.omega);
    return inst;
}

/// space = q^coords, saturating at limit+1.
std::uint64_t pow_saturating(std::uint64_t q, std::size_t coords, std::uint64_t limit) {
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < coords; ++i) {
        if (space > limit / q) return limit + 1;
        space *= q;
    }
    return space;
}

/// Canonical colluder-view serialization: per colluder (ascending id)
/// "w<id>:qa[..]:qb[..]:a[..]:y[..];" with decimal scalar values joined by
/// commas. Any stable injective encoding works; this one is fixed for
/// reproducibility.
std::string serialize_view(const StrategyRun& run, std::span<const std::size_t> colluders) {
    std::ostringstream os;
    for (const std::size_t id : colluders) {
        os << "w" << id << ":qa[";
        if (!run.queries_a.empty()) {
            const auto& qs = run.queries_a[id - 1];
            for (std::size_t i = 0; i < qs.size(); ++i) os << (i ? "," : "") << qs[i];
        }
        os << "]:qb[";
        if (!run.queries_b.empty()) {
            const auto& qs = run.queries_b[id - 1];
            for (std::size_t i = 0; i < qs.size(); ++i) os << (i ? "," : "") << qs[i];
        }
        os << "]:a[";
        const Matrix& a = run.a_shares[id - 1];
        for (std::size_t i = 0; i < a.data().size(); ++i) os << (i ? "," : "") << a.data()[i];
        os << "]:y[";
        const Matrix& y = run.responses[id - 1];
        for (std::size_t i = 0; i < y.data().size(); ++i) os << (i ? "," : "") << y.data()[i];
        os << "];";
    }
    return os.str();
}

/// Enumerates every assignment of `coords` base-q digits (the pinned index, if
/// any, stays 0) and invokes fn on the flat scalar vector.
template <typename Fn>
void enumerate_noise(std::size_t coords, std::uint64_t q,
                     std::optional<std::size_t> pinned, Fn&& fn) {
    std::vector<std::uint64_t> digits(coords, 0);
    while (true) {
        fn(digits);
        std::size_t i = 0;
        for (; i < coords; ++i) {
            if (pinned && *pinned == i) continue;
            if (++digits[i] < q) break;
            digits[i] = 0;
        }
        if (i == coords) return;
    }
}

std::vector<std::size_t> validated_colluders(const CollusionSet& colluders,
                                             const TinyAuditConfig& cfg) {
    if (colluders.ids.size() == 0)
        throw ValidationError("collusion set must not be empty");
    std::vector<std::size_t> ids = colluders.ids;
    std::sort(ids.begin(), ids.end());
    for (const std::size_t id : ids)
        if (id == 0 || id > cfg.N)
            throw ValidationError("colluder id out of range");
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw ValidationError("duplicate colluder id");
    return ids;
}

} // namespace

std::pair<std::size_t, std::size_t> query_noise_range(const TinyAuditConfig& cfg) {
    const AuditInstance inst = build_instance(cfg);
    return {inst.layout.query_noise_offset(), inst.layout.query_noise_count()};
}

Rational tv_distance(const DistributionTable& a, const DistributionTable& b) {
    if (a.total != b.total)
        throw ValidationError("distribution tables cover different randomness spaces");
    std::uint64_t diff = 0;
    for (const auto& [key, count] : a.counts) {
        const auto it = b.counts.find(key);
        const std::uint64_t other = it == b.counts.end() ? 0 : it->second;
        diff += count > other ? count - other : other - count;
    }
    for (const auto& [key, count] : b.counts) {
        if (a.counts.find(key) == a.counts.end()) diff += count;
    }
    return Rational(diff, 2 * a.total);
}

AuditReport exhaustive_privacy_audit(const TinyAuditConfig& cfg, const CollusionSet& colluders) {
    // Collusion sets of any size are auditable: smaller than T is a strictly
    // weaker adversary, larger ones probe broken schemes.
    const std::vector<std::size_t> ids = validated_colluders(colluders, cfg);
    const AuditInstance inst = build_instance(cfg);
    AuditReport report;
    report.noise_scalars = inst.layout.total();
    const std::uint64_t space = pow_saturating(cfg.q, report.noise_scalars, cfg.space_limit);
    if (space > cfg.space_limit) {
        report.refused = true;
        report.refusal = "randomness space q^" + std::to_string(report.noise_scalars)
                         + " exceeds the enumerability guard of "
                         + std::to_string(cfg.space_limit) + " states";
        return report;
    }
    report.space_size = space;
    if (cfg.pinned_noise_index && *cfg.pinned_noise_index >= report.noise_scalars)
        throw ValidationError("pinned noise index out of range");

    // One distribution table per candidate index.
    std::vector<DistributionTable> tables;
    if (cfg.problem == Problem::PSMM) {
        for (std::size_t theta = 1; theta <= cfg.V; ++theta) {
            report.labels.push_back("theta=" + std::to_string(theta));
            DistributionTable table;
            enumerate_noise(report.noise_scalars, cfg.q, cfg.pinned_noise_index,
                            [&](const std::vector<std::uint64_t>& scalars) {
                                ExplicitNoise noise(scalars);
                                const StrategyRun run =
                                    prepare_psmm(*inst.A, *inst.libB, theta, inst.params, noise);
                                ++table.counts[serialize_view(run, ids)];
                                ++table.total;
                            });
            tables.push_back(std::move(table));
        }
    } else {
        for (std::size_t t1 = 1; t1 <= cfg.U; ++t1)
            for (std::size_t t2 = 1; t2 <= cfg.V; ++t2) {
                report.labels.push_back("theta1=" + std::to_string(t1)
                                        + ",theta2=" + std::to_string(t2));
                DistributionTable table;
                enumerate_noise(report.noise_scalars, cfg.q, cfg.pinned_noise_index,
                                [&](const std::vector<std::uint64_t>& scalars) {
                                    ExplicitNoise noise(scalars);
                                    const StrategyRun run = prepare_fpmm(
                                        *inst.libA, *inst.libB, t1, t2, inst.params, noise);
                                    ++table.counts[serialize_view(run, ids)];
                                    ++table.total;
                                });
                tables.push_back(std::move(table));
            }
    }

    report.pass = true;
    for (std::size_t i = 0; i < tables.size(); ++i)
        for (std::size_t j = i + 1; j < tables.size(); ++j) {
            AuditPairTV pair;
            pair.first_label = report.labels[i];
            pair.second_label = report.labels[j];
            pair.tv = tv_distance(tables[i], tables[j]);
            if (pair.tv.num != 0) report.pass = false;
            report.pairs.push_back(std::move(pair));
        }
    return report;
}

AuditReport exhaustive_security_audit(const TinyAuditConfig& cfg, const CollusionSet& colluders) {
    if (cfg.problem != Problem::PSMM)
        throw ValidationError("the security audit covers the PSMM confidential matrix");
    const std::vector<std::size_t> ids = validated_colluders(colluders, cfg);
    const AuditInstance inst = build_instance(cfg);
    AuditReport report;
    report.noise_scalars = inst.layout.total();
    const std::size_t a_entries = cfg.lambda * cfg.omega;
    const std::uint64_t noise_space =
        pow_saturating(cfg.q, report.noise_scalars, cfg.space_limit);
    const std::uint64_t a_space = pow_saturating(cfg.q, a_entries, cfg.space_limit);
    if (noise_space > cfg.space_limit || a_space > cfg.space_limit / noise_space) {
        report.refused = true;
        report.refusal = "randomness space q^" + std::to_string(report.noise_scalars + a_entries)
                         + " exceeds the enumerability guard of "
                         + std::to_string(cfg.space_limit) + " states";
        return report;
    }
    report.space_size = noise_space;
    if (cfg.pinned_noise_index && *cfg.pinned_noise_index >= report.noise_scalars)
        throw ValidationError("pinned noise index out of range");
    if (cfg.theta == 0 || cfg.theta > cfg.V)
        throw ValidationError("library index out of range [1.." + std::to_string(cfg.V) + "]");

    const FieldConfig field(cfg.q);
    std::vector<DistributionTable> tables;
    enumerate_noise(a_entries, cfg.q, std::nullopt, [&](const std::vector<std::uint64_t>& a_vals) {
        Matrix A = Matrix::from_values(cfg.lambda, cfg.omega, field, a_vals);
        std::ostringstream label;
        label << "A=[";
        for (std::size_t i = 0; i < a_vals.size(); ++i) label << (i ? "," : "") << a_vals[i];
        label << "]";
        report.labels.push_back(label.str());
        DistributionTable table;
        enumerate_noise(report.noise_scalars, cfg.q, cfg.pinned_noise_index,
                        [&](const std::vector<std::uint64_t>& scalars) {
                            ExplicitNoise noise(scalars);
                            const StrategyRun run =
                                prepare_psmm(A, *inst.libB, cfg.theta, inst.params, noise);
                            ++table.counts[serialize_view(run, ids)];
                            ++table.total;
                        });
        tables.push_back(std::move(table));
    });

    report.pass = true;
    for (std::size_t i = 0; i < tables.size(); ++i)
        for (std::size_t j = i + 1; j < tables.size(); ++j) {
            AuditPairTV pair;
            pair.first_label = report.labels[i];
            pair.second_label = report.labels[j];
            pair.tv = tv_distance(tables[i], tables[j]);
            if (pair.tv.num != 0) report.pass = false;
            report.pairs.push_back(std::move(pair));
        }
    return report;
}

nlohmann::ordered_json audit_report_to_json(const AuditReport& report) {
    nlohmann::ordered_json j;
    j["pass"] = report.pass;
    j["refused"] = report.refused;
    if (report.refused) j["refusal"] = report.refusal;
    j["space_size"] = report.space_size;
    j["noise_scalars"] = report.noise_scalars;
    j["labels"] = report.labels;
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const AuditPairTV& p : report.pairs) {
        nlohmann::ordered_json entry;
        entry["first"] = p.first_label;
        entry["second"] = p.second_label;
        entry["tv"] = p.tv.str();
        pairs.push_back(std::move(entry));
    }
    j["pairs"] = std::move(pairs);
    return j;
}

nlohmann::ordered_json lemma1_report_to_json(const Lemma1Report& report) {
    nlohmann::ordered_json j;
    j["ok"] = report.ok;
    j["exhaustive"] = report.exhaustive;
    j["subsets_checked"] = report.subsets_checked;
    j["cauchy_structure_ok"] = report.cauchy_structure_ok;
    if (!report.witness.empty()) j["witness"] = report.witness;
    if (!report.failure.empty()) j["failure"] = report.failure;
    return j;
}

} // namespace copmm
