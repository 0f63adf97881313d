#include "mvts/policies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvts/errors.hpp"

namespace mvts {

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::mvts_d: return "mvts_d";
        case PolicyKind::mvts_dn: return "mvts_dn";
        case PolicyKind::ts_a: return "ts_a";
        case PolicyKind::cf_mvts: return "cf_mvts";
        case PolicyKind::uniform: return "uniform";
    }
    return "unknown";
}

PolicyKind parse_policy_kind(std::string_view tag) {
    for (auto kind : {PolicyKind::mvts_d, PolicyKind::mvts_dn, PolicyKind::ts_a, PolicyKind::cf_mvts,
                      PolicyKind::uniform}) {
        if (to_string(kind) == tag) return kind;
    }
    throw InvalidParameter("unknown policy '" + std::string(tag) + "'");
}

std::size_t argmax_lowest(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    return best;
}

DnConstants dn_constants(double R, double epsilon, double delta, std::size_t d, std::size_t K) {
    if (!(R > 0.0)) throw InvalidParameter("dn_constants: R must be positive");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw InvalidParameter("dn_constants: epsilon must lie in (0, 1/2)");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameter("dn_constants: delta must lie in (0, 1)");
    if (d == 0 || K == 0) throw InvalidParameter("dn_constants: d and K must be positive");
    const double log_term = std::log(4.0 * static_cast<double>(K) / delta);
    const double dd = static_cast<double>(d);
    return {
        .u = 8.0 * R * R * dd * log_term * std::sqrt(1.0 / epsilon),
        .v = R * std::sqrt(4.0 / epsilon * dd * log_term),
    };
}

double ts_a_constant(double R, double epsilon, double delta, std::size_t d) {
    if (!(R > 0.0)) throw InvalidParameter("ts_a_constant: R must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidParameter("ts_a_constant: epsilon must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameter("ts_a_constant: delta must lie in (0, 1)");
    if (d == 0) throw InvalidParameter("ts_a_constant: d must be positive");
    return R * std::sqrt(24.0 / epsilon * static_cast<double>(d) * std::log(1.0 / delta));
}

namespace {

void check_shapes(std::span<const ArmPosterior> arms, const ContextMatrix& contexts) {
    if (arms.empty()) throw PolicyStateError("policy has no arms");
    if (contexts.arms() != arms.size()) {
        throw InvalidParameter("context matrix has " + std::to_string(contexts.arms()) + " rows for " +
                               std::to_string(arms.size()) + " arms");
    }
    for (std::size_t i = 0; i < arms.size(); ++i) {
        if (arms[i].n_pulls() == 0) {
            throw PolicyStateError("arm " + std::to_string(i) + " has not been initialized");
        }
        if (arms[i].dim() != contexts.dim()) throw InvalidParameter("context dimension mismatch");
    }
}

Decision finish(Decision decision) {
    decision.arm = argmax_lowest(decision.sampled_scores);
    return decision;
}

Decision reserve_decision(std::size_t arms, bool with_variances) {
    Decision decision;
    decision.sampled_scores.reserve(arms);
    decision.sampled_means.reserve(arms);
    if (with_variances) decision.sampled_variances.reserve(arms);
    return decision;
}

}  // namespace

Decision choose_mvts_d(std::span<const ArmPosterior> arms, const ContextMatrix& contexts, double rho,
                       Sampler& sampler) {
    check_shapes(arms, contexts);
    Decision decision = reserve_decision(arms.size(), true);
    for (std::size_t i = 0; i < arms.size(); ++i) {
        const auto& arm = arms[i];
        const double lambda =
            std::max(kMinPrecisionDraw, sampler.gamma(arm.shape(), std::max(arm.rate(), kMinGammaRate)));
        const double sigma2 = 1.0 / lambda;
        // chol((lambda A)^{-1}) = chol(A^{-1}) / sqrt(lambda)
        const Matrix factor = scaled(cholesky(arm.design_inverse()), std::sqrt(sigma2));
        const Vector mu = sample_mvn(arm.mean_estimate(), factor, sampler);
        const double mean = dot(contexts.row(i), mu);
        decision.sampled_means.push_back(mean);
        decision.sampled_variances.push_back(sigma2);
        decision.sampled_scores.push_back(mean - rho * sigma2);
    }
    return finish(std::move(decision));
}

Decision choose_mvts_dn(std::span<const ArmPosterior> arms, const ContextMatrix& contexts, double rho, double u,
                        double v, Sampler& sampler) {
    if (!(u > 0.0) || !(v > 0.0)) throw InvalidParameter("choose_mvts_dn: u and v must be positive");
    check_shapes(arms, contexts);
    Decision decision = reserve_decision(arms.size(), true);
    for (std::size_t i = 0; i < arms.size(); ++i) {
        const auto& arm = arms[i];
        const double spread = u / std::sqrt(static_cast<double>(arm.n_pulls()));
        const double sigma2 = arm.variance_estimate() + spread * sampler.standard_normal();
        const Matrix factor = scaled(cholesky(arm.design_inverse()), v);
        const Vector mu = sample_mvn(arm.mean_estimate(), factor, sampler);
        const double mean = dot(contexts.row(i), mu);
        decision.sampled_means.push_back(mean);
        decision.sampled_variances.push_back(sigma2);
        decision.sampled_scores.push_back(mean - rho * sigma2);
    }
    return finish(std::move(decision));
}

Decision choose_ts_a(std::span<const ArmPosterior> arms, const ContextMatrix& contexts, double v,
                     Sampler& sampler) {
    if (!(v > 0.0)) throw InvalidParameter("choose_ts_a: v must be positive");
    check_shapes(arms, contexts);
    Decision decision = reserve_decision(arms.size(), false);
    for (std::size_t i = 0; i < arms.size(); ++i) {
        const auto& arm = arms[i];
        const Matrix factor = scaled(cholesky(arm.design_inverse()), v);
        const Vector mu = sample_mvn(arm.mean_estimate(), factor, sampler);
        const double mean = dot(contexts.row(i), mu);
        decision.sampled_means.push_back(mean);
        decision.sampled_scores.push_back(mean);
    }
    return finish(std::move(decision));
}

Decision choose_cf_mvts(std::span<const CfArmPosterior> arms, double rho, Sampler& sampler) {
    if (arms.empty()) throw PolicyStateError("policy has no arms");
    Decision decision = reserve_decision(arms.size(), true);
    for (std::size_t i = 0; i < arms.size(); ++i) {
        const auto& arm = arms[i];
        if (!arm.initialized()) throw PolicyStateError("arm " + std::to_string(i) + " has not been initialized");
        const double tau = std::max(kMinPrecisionDraw, sampler.gamma(arm.alpha_hat, arm.beta_hat));
        const double theta = arm.mu_hat + sampler.standard_normal() / std::sqrt(arm.t_hat);
        decision.sampled_means.push_back(theta);
        decision.sampled_variances.push_back(1.0 / tau);
        decision.sampled_scores.push_back(theta - rho / tau);
    }
    return finish(std::move(decision));
}

Decision choose_uniform(std::size_t arms, Sampler& sampler) {
    if (arms == 0) throw InvalidParameter("choose_uniform: no arms");
    Decision decision;
    decision.arm = sampler.uniform_index(arms);
    decision.sampled_scores.assign(arms, 0.0);
    decision.sampled_scores[decision.arm] = 1.0;
    return decision;
}

std::unique_ptr<Policy> make_policy(const PolicyParams& params, std::size_t arms, std::size_t dim) {
    if (arms == 0 || dim == 0) throw InvalidParameter("make_policy: K and d must be positive");
    if (!(params.rho >= 0.0) || !std::isfinite(params.rho)) {
        throw InvalidParameter("make_policy: rho must be a finite nonnegative number");
    }
    switch (params.kind) {
        case PolicyKind::mvts_d:
        case PolicyKind::mvts_dn:
        case PolicyKind::ts_a:
            return std::make_unique<LinearPolicy>(params, arms, dim);
        case PolicyKind::cf_mvts:
            return std::make_unique<CfMvtsPolicy>(params.rho, arms);
        case PolicyKind::uniform:
            return std::make_unique<UniformPolicy>(arms);
    }
    throw InvalidParameter("make_policy: unknown policy kind");
}

LinearPolicy::LinearPolicy(const PolicyParams& params, std::size_t arms, std::size_t dim)
    : params_(params), states_(arms, ArmPosterior(dim)) {
    if (params.kind == PolicyKind::mvts_dn && !(params.u > 0.0 && params.v > 0.0)) {
        throw InvalidParameter("mvts_dn requires positive u and v");
    }
    if (params.kind == PolicyKind::ts_a && !(params.v > 0.0)) throw InvalidParameter("ts_a requires positive v");
}

Decision LinearPolicy::choose(const ContextMatrix& contexts, Sampler& sampler) const {
    switch (params_.kind) {
        case PolicyKind::mvts_d: return choose_mvts_d(states_, contexts, params_.rho, sampler);
        case PolicyKind::mvts_dn:
            return choose_mvts_dn(states_, contexts, params_.rho, params_.u, params_.v, sampler);
        case PolicyKind::ts_a: return choose_ts_a(states_, contexts, params_.v, sampler);
        default: break;
    }
    throw PolicyStateError("LinearPolicy holds a non-linear policy kind");
}

void LinearPolicy::update(std::size_t arm, std::span<const double> context, double reward) {
    if (arm >= states_.size()) throw InvalidParameter("update: arm " + std::to_string(arm) + " out of range");
    states_[arm].observe(context, reward);
}

Decision CfMvtsPolicy::choose(const ContextMatrix&, Sampler& sampler) const {
    return choose_cf_mvts(states_, rho_, sampler);
}

void CfMvtsPolicy::update(std::size_t arm, std::span<const double>, double reward) {
    if (arm >= states_.size()) throw InvalidParameter("update: arm " + std::to_string(arm) + " out of range");
    states_[arm].observe(reward);
}

Decision UniformPolicy::choose(const ContextMatrix&, Sampler& sampler) const {
    return choose_uniform(arms_, sampler);
}

void UniformPolicy::update(std::size_t arm, std::span<const double>, double) {
    if (arm >= arms_) throw InvalidParameter("update: arm " + std::to_string(arm) + " out of range");
}

}  // namespace mvts
