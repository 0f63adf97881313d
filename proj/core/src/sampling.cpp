#include "mvts/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "mvts/errors.hpp"

namespace mvts {

double RngStream::standard_normal() {
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return z;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    return u * factor;
}

double sample_standard_normal(RngStream& rng) { return rng.standard_normal(); }

namespace {

// Marsaglia & Tsang (2000), shape >= 1, unit rate.
double gamma_unit_rate(double shape, RngStream& rng) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = rng.standard_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform01();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace

double sample_gamma(double shape, double rate, RngStream& rng) {
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
        throw InvalidParameter("sample_gamma: shape and rate must be positive and finite (shape=" +
                               std::to_string(shape) + ", rate=" + std::to_string(rate) + ")");
    }
    if (shape < 1.0) {
        const double boosted = gamma_unit_rate(shape + 1.0, rng);
        const double u = rng.uniform01();
        return boosted * std::pow(u, 1.0 / shape) / rate;
    }
    return gamma_unit_rate(shape, rng) / rate;
}

std::size_t RngSampler::uniform_index(std::size_t n) {
    if (n == 0) throw InvalidParameter("uniform_index: empty range");
    // Rejection on the top of the 64-bit range removes modulo bias.
    const std::uint64_t range = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t word = 0;
    do {
        word = stream_.next_u64();
    } while (word >= limit);
    return static_cast<std::size_t>(word % range);
}

Vector sample_mvn(std::span<const double> mean, const Matrix& cov_chol, Sampler& sampler) {
    if (cov_chol.dim() != mean.size()) {
        throw InvalidParameter("sample_mvn: mean has dimension " + std::to_string(mean.size()) +
                               " but the covariance factor has dimension " + std::to_string(cov_chol.dim()));
    }
    Vector z(mean.size());
    for (double& zi : z) zi = sampler.standard_normal();
    Vector out = lower_mat_vec(cov_chol, z);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += mean[i];
    return out;
}

std::string_view to_string(NoiseKind::Tag tag) {
    switch (tag) {
        case NoiseKind::Tag::gaussian: return "gaussian";
        case NoiseKind::Tag::truncated_normal: return "truncated_normal";
        case NoiseKind::Tag::uniform: return "uniform";
    }
    return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
    if (name == "gaussian") return NoiseKind::gaussian();
    if (name == "truncated_normal") return NoiseKind::truncated_normal();
    if (name == "uniform") return NoiseKind::uniform();
    throw InvalidParameter("unknown noise kind '" + std::string(name) + "'");
}

double truncated_standard_normal_variance(double bound) {
    const double pdf = std::exp(-0.5 * bound * bound) / std::sqrt(2.0 * std::numbers::pi);
    const double mass = std::erf(bound / std::numbers::sqrt2);  // P(|z| <= bound)
    return 1.0 - 2.0 * bound * pdf / mass;
}

double sample_noise(const NoiseKind& kind, double variance, Sampler& sampler) {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw InvalidParameter("sample_noise: variance must be positive, got " + std::to_string(variance));
    }
    const double sd = std::sqrt(variance);
    switch (kind.tag) {
        case NoiseKind::Tag::gaussian:
            return sd * sampler.standard_normal();
        case NoiseKind::Tag::truncated_normal: {
            if (!(kind.bound > 0.0)) throw InvalidParameter("sample_noise: truncation bound must be positive");
            double z = 0.0;
            do {
                z = sampler.standard_normal();
            } while (std::abs(z) > kind.bound);
            return z * sd / std::sqrt(truncated_standard_normal_variance(kind.bound));
        }
        case NoiseKind::Tag::uniform:
            return (2.0 * sampler.uniform01() - 1.0) * std::sqrt(3.0) * sd;
    }
    return 0.0;
}

}  // namespace mvts
