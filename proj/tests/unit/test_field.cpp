#include "doctest.h"

#include "copmm/field.hpp"
#include "copmm/rng.hpp"

using namespace copmm;

TEST_CASE("modulus validation") {
    CHECK_NOTHROW(FieldConfig(2));
    CHECK_NOTHROW(FieldConfig(7));
    CHECK_NOTHROW(FieldConfig(2147483647ULL));
    CHECK_THROWS_AS(FieldConfig(1), ValidationError);
    CHECK_THROWS_AS(FieldConfig(0), ValidationError);
    CHECK_THROWS_AS(FieldConfig(4), ValidationError);
    CHECK_THROWS_AS(FieldConfig(2147483646ULL), ValidationError);
}

TEST_CASE("primality test") {
    CHECK(is_prime_u64(2));
    CHECK(is_prime_u64(257));
    CHECK(is_prime_u64(10007));
    CHECK(is_prime_u64(2147483647ULL));
    CHECK(is_prime_u64(0x1fffffffffffffffULL)); // 2^61 - 1
    CHECK_FALSE(is_prime_u64(1));
    CHECK_FALSE(is_prime_u64(561));        // Carmichael
    CHECK_FALSE(is_prime_u64(3215031751ULL)); // strong pseudoprime to bases 2,3,5,7
}

TEST_CASE("basic arithmetic") {
    FieldConfig f7(7);
    CHECK((FieldElement(5, f7) + FieldElement(4, f7)).value() == 2);
    CHECK((FieldElement(0, f7) * FieldElement(6, f7)).value() == 0);
    FieldConfig mers(2147483647ULL);
    FieldElement minus_one(mers.modulus() - 1, mers);
    CHECK((minus_one * minus_one).value() == 1);
}

TEST_CASE("inverses") {
    FieldConfig f7(7);
    CHECK(inv(FieldElement(3, f7)).value() == 5);
    CHECK(inv(FieldElement(1, f7)).value() == 1);
    CHECK_THROWS_AS(inv(FieldElement(0, f7)), ValidationError);
    FieldConfig f11(11);
    for (std::uint64_t x = 1; x < 11; ++x)
        CHECK(inv(inv(FieldElement(x, f11))).value() == x);
}

TEST_CASE("inverse identity, exhaustive for small primes") {
    for (std::uint64_t q : {5ULL, 7ULL, 11ULL, 257ULL}) {
        FieldConfig f(q);
        for (std::uint64_t x = 1; x < q; ++x) {
            FieldElement e(x, f);
            CHECK((e * inv(e)).value() == 1);
        }
    }
}

TEST_CASE("embed_signed") {
    FieldConfig f7(7);
    CHECK(embed_signed(-1, f7).value() == 6);
    CHECK(embed_signed(0, f7).value() == 0);
    CHECK(embed_signed(15, f7).value() == 1);
    CHECK(embed_signed(-8, f7).value() == 6);
}

TEST_CASE("field axioms on random triples") {
    FieldConfig f(10007);
    SplitMix64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        FieldElement a(rng.next_below(10007), f);
        FieldElement b(rng.next_below(10007), f);
        FieldElement c(rng.next_below(10007), f);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK(a * (b + c) == a * b + a * c);
        // canonical form
        CHECK((a * b).value() < 10007);
        CHECK((a - b).value() < 10007);
    }
}

TEST_CASE("mixed fields rejected") {
    FieldConfig f7(7), f11(11);
    FieldElement x(3, f7), y(3, f11);
    CHECK_THROWS_AS((void)(x + y), ValidationError);
    CHECK_THROWS_AS((void)(x * y), ValidationError);
}

TEST_CASE("seeded sampler is deterministic and in range") {
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t x = a.next_below(5);
        CHECK(x == b.next_below(5));
        CHECK(x < 5);
    }
}
