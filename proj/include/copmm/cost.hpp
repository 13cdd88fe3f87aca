#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "copmm/errors.hpp"

namespace copmm {

/// Exact non-negative rational; communication costs are reported with these,
/// never as floats.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    Rational() = default;
    Rational(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
        if (d == 0) throw ValidationError("rational with zero denominator");
        const std::uint64_t g = std::gcd(num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rational& o) const { return !(*this == o); }

    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

/// Communication and computation accounting for one completed run. The symbol
/// counters are measured from the actual transcript; the operation counts are
/// the exact multiply-add trip counts of the implemented algorithms.
struct CostReport {
    Rational upload_cost;        // P_u = uploaded/(lambda*omega)
    Rational download_cost;      // P_d = downloaded/(lambda*gamma)
    bool upload_is_query_only = false; // FPMM: no data upload, queries neglected

    std::uint64_t uploaded_symbols = 0;
    std::uint64_t downloaded_symbols = 0;
    std::uint64_t query_scalars_per_worker = 0;
    std::uint64_t query_scalars_total = 0;

    std::uint64_t encode_mul_adds = 0;  // master-side encoding
    std::uint64_t worker_mul_adds = 0;  // per worker (max)
    std::uint64_t decode_mul_adds = 0;

    std::string encode_complexity;  // big-O descriptors
    std::string worker_complexity;
    std::string decode_complexity;
};

} // namespace copmm
