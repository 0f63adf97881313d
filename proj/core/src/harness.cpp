#include "mvts/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "mvts/errors.hpp"
#include "mvts/sampling.hpp"

namespace mvts {

namespace {

struct PolicyRunner {
    std::unique_ptr<Policy> policy;
    RngSampler decisions;
    RngSampler rewards;
    PolicyTrace trace;
};

PolicyTrace make_trace(PolicyKind kind) {
    PolicyTrace trace;
    trace.policy = kind;
    return trace;
}

}  // namespace

ReplicationResult run_replication(const ExperimentConfig& config, std::span<const ArmTruth> truths,
                                  std::size_t replication, bool keep_records) {
    validate(config);
    if (truths.size() != config.arms) throw ConfigError("truth table does not match the configured arm count");
    for (const auto& truth : truths) {
        if (truth.mu.size() != config.dim) throw ConfigError("truth table does not match the configured dimension");
    }

    const std::size_t arms = config.arms;
    RngSampler environment(derive_seed(config.master_seed, replication, "env"));

    std::vector<PolicyRunner> runners;
    runners.reserve(config.policies.size());
    for (auto kind : config.policies) {
        const std::string tag(to_string(kind));
        PolicyRunner runner{
            make_policy(resolve_policy(config, kind), arms, config.dim),
            RngSampler(derive_seed(config.master_seed, replication, tag)),
            RngSampler(derive_seed(config.master_seed, replication, tag + "/reward")),
            make_trace(kind),
        };
        runner.trace.cum_regret.reserve(config.horizon);
        if (keep_records) runner.trace.records.reserve(config.horizon + arms);
        runners.push_back(std::move(runner));
    }

    // Round 0: every policy pulls every arm once.
    const ContextMatrix initial = gen_contexts(arms, config.dim, environment);
    const std::size_t initial_best = optimal_arm(initial, truths, config.rho);
    for (auto& runner : runners) {
        for (std::size_t arm = 0; arm < arms; ++arm) {
            const double reward = draw_reward(truths[arm], initial.row(arm), runner.rewards);
            runner.policy->update(arm, initial.row(arm), reward);
            if (keep_records) {
                runner.trace.records.push_back({replication, 0, runner.trace.policy, arm, initial_best, reward, 0.0, 0.0});
            }
        }
    }

    for (std::size_t round = 1; round <= config.horizon; ++round) {
        const ContextMatrix contexts = gen_contexts(arms, config.dim, environment);
        const std::vector<double> values = mv_values(contexts, truths, config.rho);
        const auto best_it = std::max_element(values.begin(), values.end());
        const std::size_t best = static_cast<std::size_t>(best_it - values.begin());

        for (auto& runner : runners) {
            const Decision decision = runner.policy->choose(contexts, runner.decisions);
            const std::size_t arm = decision.arm;
            const double reward = draw_reward(truths[arm], contexts.row(arm), runner.rewards);
            runner.policy->update(arm, contexts.row(arm), reward);

            const double step_regret = *best_it - values[arm];
            const double cum = (runner.trace.cum_regret.empty() ? 0.0 : runner.trace.cum_regret.back()) + step_regret;
            runner.trace.cum_regret.push_back(cum);
            if (keep_records) {
                runner.trace.records.push_back({replication, round, runner.trace.policy, arm, best, reward, step_regret, cum});
            }
        }
    }

    ReplicationResult result{.replication = replication, .traces = {}};
    result.traces.reserve(runners.size());
    for (auto& runner : runners) {
        if (const auto* linear = dynamic_cast<const LinearPolicy*>(runner.policy.get())) {
            for (const auto& state : linear->states()) runner.trace.norm_violations += state.norm_violations();
        }
        result.traces.push_back(std::move(runner.trace));
    }
    return result;
}

double AggregateCurves::mean_at(PolicyKind policy, std::size_t round) const {
    const auto it = std::find(policies.begin(), policies.end(), policy);
    if (it == policies.end()) throw InvalidParameter("aggregate has no policy '" + std::string(to_string(policy)) + "'");
    if (round == 0 || round > horizon()) throw InvalidParameter("round out of range");
    return mean_cum_regret[static_cast<std::size_t>(it - policies.begin())][round - 1];
}

double AggregateCurves::final_mean(PolicyKind policy) const { return mean_at(policy, horizon()); }

AggregateCurves aggregate(std::span<const ReplicationResult> replications) {
    AggregateCurves curves;
    if (replications.empty()) return curves;
    std::vector<const ReplicationResult*> ordered;
    ordered.reserve(replications.size());
    for (const auto& rep : replications) ordered.push_back(&rep);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto* a, const auto* b) { return a->replication < b->replication; });
    const auto& first = *ordered.front();
    const std::size_t n_policies = first.traces.size();
    const std::size_t horizon = n_policies ? first.traces.front().cum_regret.size() : 0;
    const double n = static_cast<double>(replications.size());

    curves.replications = replications.size();
    for (const auto& trace : first.traces) curves.policies.push_back(trace.policy);
    curves.mean_cum_regret.assign(n_policies, std::vector<double>(horizon, 0.0));
    curves.stderr_cum_regret.assign(n_policies, std::vector<double>(horizon, 0.0));

    for (const auto* rep_ptr : ordered) {
        const auto& rep = *rep_ptr;
        if (rep.traces.size() != n_policies) throw InvalidParameter("aggregate: replications disagree on policies");
        for (std::size_t p = 0; p < n_policies; ++p) {
            if (rep.traces[p].policy != curves.policies[p] || rep.traces[p].cum_regret.size() != horizon) {
                throw InvalidParameter("aggregate: replications disagree on policies or horizon");
            }
            for (std::size_t t = 0; t < horizon; ++t) curves.mean_cum_regret[p][t] += rep.traces[p].cum_regret[t];
        }
    }
    for (auto& curve : curves.mean_cum_regret) {
        for (double& v : curve) v /= n;
    }
    if (replications.size() > 1) {
        for (const auto* rep : ordered) {
            for (std::size_t p = 0; p < n_policies; ++p) {
                for (std::size_t t = 0; t < horizon; ++t) {
                    const double dev = rep->traces[p].cum_regret[t] - curves.mean_cum_regret[p][t];
                    curves.stderr_cum_regret[p][t] += dev * dev;
                }
            }
        }
        for (auto& curve : curves.stderr_cum_regret) {
            for (double& v : curve) v = std::sqrt(v / (n - 1.0) / n);
        }
    }
    return curves;
}

unsigned resolve_thread_count() {
    if (const char* env = std::getenv("MVTS_THREADS")) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && value > 0) return static_cast<unsigned>(value);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    validate(config);
    const auto truths = resolve_truths(config);
    return run_experiment(config, truths, options);
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::span<const ArmTruth> truths,
                                const RunOptions& options) {
    validate(config);
    const unsigned threads = std::min<unsigned>(options.threads ? options.threads : resolve_thread_count(),
                                                static_cast<unsigned>(config.replications));

    std::vector<ReplicationResult> results(config.replications);
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::size_t failed_index = config.replications;
    std::exception_ptr failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= config.replications) return;
            try {
                results[rep] = run_replication(config, truths, rep, options.keep_records);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (rep < failed_index) {
                    failed_index = rep;
                    failure = std::current_exception();
                }
            }
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            throw Error("replication " + std::to_string(failed_index) + ": " + e.what());
        }
    }

    ExperimentResult result{.config = config, .curves = aggregate(results), .replications = std::move(results)};
    return result;
}

}  // namespace mvts
