#pragma once

// Seeded replication runner and cross-replication aggregation.
//
// A replication draws one context matrix per round from its environment stream
// and hands it to every configured policy. Each policy has its own decision
// stream and its own reward-noise stream, so the policies see the same
// contexts but independent reward noise. Round 0 pulls every arm once per
// policy; those rows are logged with round = 0, regret = 0 and do not count
// toward cumulative regret.
//
// Stream seeds (see derive_seed):
//   contexts:          derive_seed(master, rep, "env")
//   policy decisions:  derive_seed(master, rep, "<policy tag>")
//   policy rewards:    derive_seed(master, rep, "<policy tag>/reward")

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mvts/config.hpp"
#include "mvts/environment.hpp"
#include "mvts/policies.hpp"

namespace mvts {

struct RoundRecord {
    std::size_t replication = 0;
    std::size_t round = 0;
    PolicyKind policy = PolicyKind::mvts_d;
    std::size_t chosen_arm = 0;
    std::size_t optimal_arm = 0;
    double reward = 0.0;
    double regret = 0.0;
    double cum_regret = 0.0;

    bool operator==(const RoundRecord&) const = default;
};

struct PolicyTrace {
    PolicyKind policy = PolicyKind::mvts_d;
    /// Rounds 0..T when records are kept, otherwise empty.
    std::vector<RoundRecord> records;
    /// Cumulative regret after rounds 1..T.
    std::vector<double> cum_regret;
    /// Contexts with norm above 1 seen by the policy's posterior.
    std::size_t norm_violations = 0;
};

struct ReplicationResult {
    std::size_t replication = 0;
    std::vector<PolicyTrace> traces;  // config.policies order
};

struct RunOptions {
    bool keep_records = true;
    /// 0 means resolve_thread_count().
    unsigned threads = 0;
};

/// Validates the config, then simulates one replication.
ReplicationResult run_replication(const ExperimentConfig& config, std::span<const ArmTruth> truths,
                                  std::size_t replication, bool keep_records = true);

struct AggregateCurves {
    std::vector<PolicyKind> policies;
    std::size_t replications = 0;
    /// [policy][t - 1] mean cumulative regret over replications.
    std::vector<std::vector<double>> mean_cum_regret;
    /// [policy][t - 1] standard error of that mean (0 with a single replication).
    std::vector<std::vector<double>> stderr_cum_regret;

    std::size_t horizon() const noexcept { return mean_cum_regret.empty() ? 0 : mean_cum_regret.front().size(); }
    /// Mean total regret at round T for `policy`; throws InvalidParameter if absent.
    double final_mean(PolicyKind policy) const;
    double mean_at(PolicyKind policy, std::size_t round) const;
};

/// Reduction in replication-index order, independent of completion order.
AggregateCurves aggregate(std::span<const ReplicationResult> replications);

struct ExperimentResult {
    ExperimentConfig config;
    AggregateCurves curves;
    std::vector<ReplicationResult> replications;  // index order
};

/// Runs all replications (in parallel when threads > 1). A failing replication
/// is rethrown as Error with its index attached.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentResult run_experiment(const ExperimentConfig& config, std::span<const ArmTruth> truths,
                                const RunOptions& options);

/// MVTS_THREADS if set to a positive integer, else std::thread::hardware_concurrency() (at least 1).
unsigned resolve_thread_count();

}  // namespace mvts
