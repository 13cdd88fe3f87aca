#include "copmm/field.hpp"

namespace copmm {

namespace fq {

std::uint64_t pow(std::uint64_t base, std::uint64_t exp, std::uint64_t q) {
    std::uint64_t result = 1 % q;
    std::uint64_t b = base % q;
    while (exp > 0) {
        if (exp & 1) result = mul(result, b, q);
        b = mul(b, b, q);
        exp >>= 1;
    }
    return result;
}

std::uint64_t inv(std::uint64_t x, std::uint64_t q) {
    if (x == 0) throw ValidationError("zero has no multiplicative inverse");
    return pow(x, q - 2, q);
}

} // namespace fq

namespace {

bool miller_rabin_witness(std::uint64_t n, std::uint64_t a, std::uint64_t d, int r) {
    std::uint64_t x = fq::pow(a % n, d, n);
    if (x == 1 || x == n - 1) return false;
    for (int i = 1; i < r; ++i) {
        x = fq::mul(x, x, n);
        if (x == n - 1) return false;
    }
    return true; // composite witness
}

} // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) { d >>= 1; ++r; }
    // This witness set decides primality for every n < 2^64.
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (miller_rabin_witness(n, a, d, r)) return false;
    }
    return true;
}

FieldConfig::FieldConfig(std::uint64_t modulus) : q_(modulus) {
    if (modulus < 2)
        throw ValidationError("field modulus must be at least 2");
    if (modulus >= (1ULL << 63))
        throw ValidationError("field modulus must fit in 63 bits");
    if (!is_prime_u64(modulus))
        throw ValidationError("field modulus " + std::to_string(modulus) + " is not prime");
}

} // namespace copmm
