#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "copmm/errors.hpp"
#include "copmm/field.hpp"

namespace copmm {

/// SplitMix64. Chosen over std::mt19937/uniform_int_distribution because its
/// output stream is fixed by the seed on every platform, which the transcript
/// determinism contract and the audits rely on.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw from [0, q) by rejection sampling.
    std::uint64_t next_below(std::uint64_t q) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % q;
        std::uint64_t x;
        do { x = next(); } while (x >= limit);
        return x % q;
    }

private:
    std::uint64_t state_;
};

/// Source of the private randomness consumed by encoders and query builders.
/// Scalars are always drawn in a documented canonical order, so an explicit
/// source can replay or enumerate exactly what a seeded source would feed in.
class NoiseSource {
public:
    virtual ~NoiseSource() = default;
    virtual std::uint64_t next_scalar(const FieldConfig& field) = 0;
};

class SeededNoise final : public NoiseSource {
public:
    explicit SeededNoise(std::uint64_t seed) : rng_(seed) {}
    std::uint64_t next_scalar(const FieldConfig& field) override {
        return rng_.next_below(field.modulus());
    }

private:
    SplitMix64 rng_;
};

/// Replays a fixed scalar list; used by the audits to enumerate the full
/// randomness space and by tests that pin noise to chosen values.
class ExplicitNoise final : public NoiseSource {
public:
    explicit ExplicitNoise(std::vector<std::uint64_t> values)
        : values_(std::move(values)) {}

    std::uint64_t next_scalar(const FieldConfig& field) override {
        if (pos_ >= values_.size())
            throw ValidationError("explicit noise list exhausted");
        return values_[pos_++] % field.modulus();
    }

    std::size_t consumed() const { return pos_; }

private:
    std::vector<std::uint64_t> values_;
    std::size_t pos_ = 0;
};

class ZeroNoise final : public NoiseSource {
public:
    std::uint64_t next_scalar(const FieldConfig&) override { return 0; }
};

} // namespace copmm
