#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "copmm/cost.hpp"
#include "copmm/private_mm.hpp"

#include <nlohmann/json_fwd.hpp>

namespace copmm {

// ---------------------------------------------------------------------------
// Structural checks: the T x T noise-coefficient matrix seen by any T
// colluding workers must be invertible. Valid at any scale.
// ---------------------------------------------------------------------------

struct Lemma1Report {
    bool ok = false;
    bool exhaustive = false;
    std::size_t subsets_checked = 0;
    bool cauchy_structure_ok = false; // lagrange mode: generalized Cauchy form held
    std::vector<std::size_t> witness; // 1-based worker ids of the first singular subset
    std::string failure;

    explicit operator bool() const { return ok; }
};

/// Monomial noise functions v_t(x) = x^{e_t}.
Lemma1Report check_lemma1_monomial(std::span<const std::uint64_t> exponents,
                                   std::span<const FieldElement> alphas, std::size_t T,
                                   bool exhaustive, std::size_t sampled_subsets = 200,
                                   std::uint64_t seed = 1);

/// Lagrange noise functions v_t = the basis polynomials at positions R+1..R+T
/// over the R+T betas. Performs the generalized Cauchy structure check (points
/// distinct, row factors non-zero) plus an explicit determinant sweep.
Lemma1Report check_lemma1_lagrange(std::span<const FieldElement> betas, std::size_t R,
                                   std::size_t T, std::span<const FieldElement> alphas,
                                   bool exhaustive, std::size_t sampled_subsets = 200,
                                   std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Exhaustive distribution audits: enumerate the complete private-randomness
// space of a tiny instance and compare colluder-view distributions. Exact at
// tiny scale only; the structural checks above cover production scale.
// ---------------------------------------------------------------------------

struct CollusionSet {
    std::vector<std::size_t> ids; // 1-based, |ids| = T
};

struct TinyAuditConfig {
    Problem problem = Problem::PSMM;
    Family family = Family::PolyCode;
    std::uint64_t q = 5;
    std::size_t m = 1, p = 1, n = 1, T = 1, N = 3;
    std::size_t V = 2, U = 1;
    std::size_t lambda = 1, omega = 1, gamma = 1;
    std::size_t theta = 1; // security audit: the fixed query index
    std::uint64_t data_seed = 7; // fixed A / libraries
    std::optional<std::size_t> pinned_noise_index; // mutation: pin one noise scalar to 0
    std::uint64_t space_limit = 10'000'000;
};

/// Indices of the query-noise scalars within the flat noise layout of this
/// config; the mutation sweep pins each of these in turn.
std::pair<std::size_t, std::size_t> query_noise_range(const TinyAuditConfig& cfg);

struct DistributionTable {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;
};

/// Exact total-variation distance between two equal-total tables.
Rational tv_distance(const DistributionTable& a, const DistributionTable& b);

struct AuditPairTV {
    std::string first_label, second_label;
    Rational tv;
};

struct AuditReport {
    bool pass = false;
    bool refused = false;
    std::string refusal;
    std::uint64_t space_size = 0;    // enumerated randomness states per candidate
    std::size_t noise_scalars = 0;
    std::vector<std::string> labels;
    std::vector<AuditPairTV> pairs;  // privacy holds iff every TV is exactly 0
};

/// Privacy: for fixed data, the colluders' complete view (queries, shares,
/// responses) must be identically distributed for every candidate index
/// (theta, or (theta1,theta2) pairs for FPMM).
AuditReport exhaustive_privacy_audit(const TinyAuditConfig& cfg, const CollusionSet& colluders);

/// Security (PSMM/SMM side): for fixed theta, the colluders' view must be
/// identically distributed for every value of the confidential matrix A.
AuditReport exhaustive_security_audit(const TinyAuditConfig& cfg, const CollusionSet& colluders);

nlohmann::ordered_json audit_report_to_json(const AuditReport& report);
nlohmann::ordered_json lemma1_report_to_json(const Lemma1Report& report);

} // namespace copmm
