#pragma once

// Seeded random streams and the distribution samplers used by policies and the
// simulated environment.
//
// RngStream wraps std::mt19937_64, whose output sequence is fixed by the C++
// standard, and converts raw 64-bit words to doubles and normals with
// hand-written transforms (no std::*_distribution), so a seed reproduces the
// same draws on every platform and standard library.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include "mvts/linalg.hpp"

namespace mvts {

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Marsaglia polar method; the second variate of each pair is cached.
    double standard_normal();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

double sample_standard_normal(RngStream& rng);

/// Gamma(shape, rate) by Marsaglia-Tsang squeeze, with the U^{1/shape} boost for shape < 1.
/// Mean shape/rate. Throws InvalidParameter unless both arguments are positive and finite.
double sample_gamma(double shape, double rate, RngStream& rng);

/// Draw source seen by policies and the environment. Tests substitute scripted
/// implementations to pin down argmax decisions.
class Sampler {
public:
    virtual ~Sampler() = default;
    virtual double standard_normal() = 0;
    virtual double gamma(double shape, double rate) = 0;
    virtual double uniform01() = 0;
    /// Uniform index in [0, n).
    virtual std::size_t uniform_index(std::size_t n) = 0;
};

class RngSampler final : public Sampler {
public:
    explicit RngSampler(std::uint64_t seed) : stream_(seed) {}

    double standard_normal() override { return stream_.standard_normal(); }
    double gamma(double shape, double rate) override { return sample_gamma(shape, rate, stream_); }
    double uniform01() override { return stream_.uniform01(); }
    std::size_t uniform_index(std::size_t n) override;

    RngStream& stream() noexcept { return stream_; }

private:
    RngStream stream_;
};

/// mean + chol * z, z ~ N(0, I). Consumes exactly mean.size() normals.
Vector sample_mvn(std::span<const double> mean, const Matrix& cov_chol, Sampler& sampler);

struct NoiseKind {
    enum class Tag { gaussian, truncated_normal, uniform };

    Tag tag = Tag::gaussian;
    /// Truncation half-width on the standardized draw; used by truncated_normal only.
    double bound = 5.0;

    static NoiseKind gaussian() { return {Tag::gaussian, 5.0}; }
    static NoiseKind truncated_normal(double bound = 5.0) { return {Tag::truncated_normal, bound}; }
    static NoiseKind uniform() { return {Tag::uniform, 5.0}; }

    bool operator==(const NoiseKind&) const = default;
};

std::string_view to_string(NoiseKind::Tag tag);
/// Accepts "gaussian", "truncated_normal", "uniform".
NoiseKind parse_noise_kind(std::string_view name);

/// Variance of a standard normal conditioned on |z| <= bound.
double truncated_standard_normal_variance(double bound);

/// Zero-mean noise with the requested variance.
///   gaussian:          sqrt(variance) * z
///   truncated_normal:  z drawn from N(0,1) restricted to [-bound, bound] by
///                      rejection, rescaled by sqrt(variance) / sd_trunc so the
///                      variance matches exactly
///   uniform:           uniform on [-sqrt(3 variance), sqrt(3 variance)]
double sample_noise(const NoiseKind& kind, double variance, Sampler& sampler);

}  // namespace mvts
