#pragma once

// Simulated portfolio market: hidden per-arm (mu, sigma^2), context generation,
// reward draws and the exact mean-variance regret oracle.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "mvts/context.hpp"
#include "mvts/linalg.hpp"
#include "mvts/sampling.hpp"

namespace mvts {

struct ArmTruth {
    Vector mu;
    double sigma2 = 1.0;
    NoiseKind noise;
};

/// Validates sigma2 > 0 and ||mu|| <= 1; `allow_large_mean` skips the norm check.
ArmTruth make_arm_truth(Vector mu, double sigma2, NoiseKind noise, bool allow_large_mean = false);

/// The ten-portfolio, eight-sector parameter table used by the portfolio experiments.
std::vector<ArmTruth> builtin_portfolio_truths(NoiseKind noise = NoiseKind::gaussian());

/// Plain-text truth table: one line per arm, "index mu_1 ... mu_d sigma2".
/// Blank lines and lines starting with '#' are ignored. Indices must run 1..K in order.
std::vector<ArmTruth> read_truths(std::istream& in, NoiseKind noise, bool allow_large_mean);
std::vector<ArmTruth> load_truths(const std::filesystem::path& path, NoiseKind noise, bool allow_large_mean);
void write_truths(std::ostream& out, std::span<const ArmTruth> truths);

/// Entries uniform on [-1, 1], each row then scaled by min(1, 1 / ||x||).
ContextMatrix gen_contexts(std::size_t arms, std::size_t dim, Sampler& sampler);

/// x^T mu + noise with the arm's variance and noise kind.
double draw_reward(const ArmTruth& truth, std::span<const double> x, Sampler& sampler);

/// x^T mu - rho sigma2.
double mv_value(std::span<const double> x, std::span<const double> mu, double sigma2, double rho);

/// Mean-variance of every arm under this round's contexts.
std::vector<double> mv_values(const ContextMatrix& contexts, std::span<const ArmTruth> truths, double rho);

/// Lowest-index arm with maximal mean-variance.
std::size_t optimal_arm(const ContextMatrix& contexts, std::span<const ArmTruth> truths, double rho);

/// max_i MV_i - MV_chosen. Throws InvalidParameter when `chosen` is out of range.
double regret(const ContextMatrix& contexts, std::span<const ArmTruth> truths, double rho, std::size_t chosen);

}  // namespace mvts
