#pragma once

#include <cstdint>
#include <string>

#include "copmm/errors.hpp"

namespace copmm {

/// Deterministic Miller-Rabin, valid for every n < 2^64.
bool is_prime_u64(std::uint64_t n);

// Low-level residue arithmetic. Inputs must already be canonical (< q).
namespace fq {

inline std::uint64_t add(std::uint64_t x, std::uint64_t y, std::uint64_t q) {
    std::uint64_t s = x + y; // q < 2^63 is enforced by FieldConfig, no overflow
    return s >= q ? s - q : s;
}

inline std::uint64_t sub(std::uint64_t x, std::uint64_t y, std::uint64_t q) {
    return x >= y ? x - y : x + q - y;
}

inline std::uint64_t neg(std::uint64_t x, std::uint64_t q) {
    return x == 0 ? 0 : q - x;
}

inline std::uint64_t mul(std::uint64_t x, std::uint64_t y, std::uint64_t q) {
    return static_cast<std::uint64_t>(static_cast<__uint128_t>(x) * y % q);
}

std::uint64_t pow(std::uint64_t base, std::uint64_t exp, std::uint64_t q);

/// Multiplicative inverse via Fermat; throws ValidationError on zero.
std::uint64_t inv(std::uint64_t x, std::uint64_t q);

/// Canonical representative of a possibly negative integer.
inline std::uint64_t embed_signed(std::int64_t v, std::uint64_t q) {
    std::int64_t r = v % static_cast<std::int64_t>(q);
    if (r < 0) r += static_cast<std::int64_t>(q);
    return static_cast<std::uint64_t>(r);
}

} // namespace fq

/// A prime field F_q. The modulus is validated once at construction; everything
/// downstream assumes it is prime.
class FieldConfig {
public:
    explicit FieldConfig(std::uint64_t modulus);

    std::uint64_t modulus() const { return q_; }

    bool operator==(const FieldConfig& other) const { return q_ == other.q_; }
    bool operator!=(const FieldConfig& other) const { return q_ != other.q_; }

    static constexpr std::uint64_t kDefaultModulus = 2147483647ULL; // 2^31 - 1

private:
    std::uint64_t q_;
};

/// Canonical element of F_q. Mixing elements of different fields throws.
class FieldElement {
public:
    FieldElement() : v_(0), q_(2) {}
    FieldElement(std::uint64_t value, const FieldConfig& field)
        : v_(value % field.modulus()), q_(field.modulus()) {}

    std::uint64_t value() const { return v_; }
    std::uint64_t modulus() const { return q_; }
    FieldConfig field() const { return FieldConfig(q_); }
    bool is_zero() const { return v_ == 0; }

    FieldElement& operator+=(const FieldElement& o) { check(o); v_ = fq::add(v_, o.v_, q_); return *this; }
    FieldElement& operator-=(const FieldElement& o) { check(o); v_ = fq::sub(v_, o.v_, q_); return *this; }
    FieldElement& operator*=(const FieldElement& o) { check(o); v_ = fq::mul(v_, o.v_, q_); return *this; }

    friend FieldElement operator+(FieldElement a, const FieldElement& b) { a += b; return a; }
    friend FieldElement operator-(FieldElement a, const FieldElement& b) { a -= b; return a; }
    friend FieldElement operator*(FieldElement a, const FieldElement& b) { a *= b; return a; }

    bool operator==(const FieldElement& o) const { return v_ == o.v_ && q_ == o.q_; }
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

private:
    void check(const FieldElement& o) const {
        if (q_ != o.q_)
            throw ValidationError("operands belong to different prime fields");
    }

    friend FieldElement inv(const FieldElement&);
    friend FieldElement pow(const FieldElement&, std::uint64_t);

    std::uint64_t v_;
    std::uint64_t q_;
};

inline FieldElement neg(const FieldElement& x) {
    return FieldElement(fq::neg(x.value(), x.modulus()), x.field());
}

inline FieldElement inv(const FieldElement& x) {
    return FieldElement(fq::inv(x.value(), x.modulus()), x.field());
}

inline FieldElement pow(const FieldElement& x, std::uint64_t e) {
    return FieldElement(fq::pow(x.value(), e, x.modulus()), x.field());
}

inline FieldElement embed_signed(std::int64_t v, const FieldConfig& field) {
    return FieldElement(fq::embed_signed(v, field.modulus()), field);
}

} // namespace copmm
