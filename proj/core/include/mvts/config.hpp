#pragma once

// Experiment configuration and its flat `key = value` text form.
//
// Recognized keys (defaults in parentheses):
//   arms (10)  dim (8)  horizon (10000)  rho (1)  replications (20)
//   policies (mvts_d,mvts_dn,ts_a,cf_mvts,uniform)   comma-separated tags
//   noise (gaussian)   gaussian | truncated_normal | uniform
//   truncation_bound (5)
//   master_seed (1)
//   R (1)  epsilon (0.25)  delta (0.1)       used to derive u, v when not overridden
//   mvts_dn.u  mvts_dn.v  ts_a.v             optional constant overrides
//   truths (builtin)   builtin | path to a truth table
//   allow_large_mean (true)
// '#' starts a comment line. Unknown keys are an error.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvts/environment.hpp"
#include "mvts/policies.hpp"
#include "mvts/sampling.hpp"

namespace mvts {

struct ExperimentConfig {
    std::size_t arms = 10;
    std::size_t dim = 8;
    std::size_t horizon = 10000;
    double rho = 1.0;
    std::size_t replications = 20;
    std::vector<PolicyKind> policies{PolicyKind::mvts_d, PolicyKind::mvts_dn, PolicyKind::ts_a, PolicyKind::cf_mvts,
                                     PolicyKind::uniform};
    NoiseKind noise = NoiseKind::gaussian();
    std::uint64_t master_seed = 1;

    double R = 1.0;
    double epsilon = 0.25;
    double delta = 0.1;
    std::optional<double> dn_u;
    std::optional<double> dn_v;
    std::optional<double> ts_a_v;

    /// "builtin" or a filesystem path.
    std::string truth_source = "builtin";
    bool allow_large_mean = true;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Text form accepted by parse_config; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Throws ConfigError on empty/duplicate policies, zero sizes, negative rho and similar.
void validate(const ExperimentConfig& config);

/// Truth table named by the config, checked against arms and dim.
std::vector<ArmTruth> resolve_truths(const ExperimentConfig& config);

/// Policy parameters with u and v taken from overrides or derived from (R, epsilon, delta).
PolicyParams resolve_policy(const ExperimentConfig& config, PolicyKind kind);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;
/// Stream seed: mix64(mix64(master ^ mix64(replication)) ^ fnv1a64(tag)).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replication, std::string_view tag) noexcept;

}  // namespace mvts
