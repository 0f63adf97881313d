#pragma once

// Arm-selection policies.
//
//   mvts_d   normal-gamma Thompson sampling on the mean-variance score
//   mvts_dn  variant with an independent normal draw for the variance
//   ts_a     risk-neutral linear Thompson sampling
//   cf_mvts  context-free mean-variance Thompson sampling
//   uniform  uniformly random arm
//
// Every choose_* function draws per arm in increasing arm order and breaks
// score ties toward the lowest index, so a seeded sampler fixes the decision.

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "mvts/context.hpp"
#include "mvts/posterior.hpp"
#include "mvts/sampling.hpp"

namespace mvts {

enum class PolicyKind { mvts_d, mvts_dn, ts_a, cf_mvts, uniform };

std::string_view to_string(PolicyKind kind);
/// Throws InvalidParameter for unknown tags.
PolicyKind parse_policy_kind(std::string_view tag);

struct Decision {
    std::size_t arm = 0;
    /// Value each arm was ranked by.
    std::vector<double> sampled_scores;
    /// x^T mu~ per arm (theta for cf_mvts); empty for uniform.
    std::vector<double> sampled_means;
    /// sigma~^2 per arm (1 / tau for cf_mvts); empty for ts_a and uniform.
    std::vector<double> sampled_variances;
};

/// Smallest index among the maxima.
std::size_t argmax_lowest(std::span<const double> scores);

struct DnConstants {
    double u = 1.0;
    double v = 1.0;
};

/// v = R sqrt((4 / eps) d ln(4K / delta)),  u = 8 R^2 d ln(4K / delta) sqrt(1 / eps).
/// Requires R > 0, eps in (0, 1/2), delta in (0, 1), d >= 1, K >= 1.
DnConstants dn_constants(double R, double epsilon, double delta, std::size_t d, std::size_t K);

/// Exploration scale of ts_a: R sqrt((24 / eps) d ln(1 / delta)), eps and delta in (0, 1).
double ts_a_constant(double R, double epsilon, double delta, std::size_t d);

/// Lambda draws below this are raised to it before forming (lambda A)^{-1}.
inline constexpr double kMinPrecisionDraw = 1e-12;
/// Gamma rate used when the posterior rate D is exactly zero.
inline constexpr double kMinGammaRate = 1e-12;

/// Per arm: lambda~ ~ Gamma(C, D), sigma~^2 = 1 / lambda~, mu~ ~ N(A^{-1}b, (lambda~ A)^{-1}),
/// score = x^T mu~ - rho sigma~^2. Consumes one gamma and d normals per arm.
Decision choose_mvts_d(std::span<const ArmPosterior> arms, const ContextMatrix& contexts, double rho,
                       Sampler& sampler);

/// Per arm: sigma~^2 ~ N(D / C, u^2 / n), then mu~ ~ N(A^{-1}b, v^2 A^{-1}). The variance
/// draw is left unclamped. Consumes 1 + d normals per arm.
Decision choose_mvts_dn(std::span<const ArmPosterior> arms, const ContextMatrix& contexts, double rho, double u,
                        double v, Sampler& sampler);

/// Per arm: mu~ ~ N(A^{-1}b, v^2 A^{-1}); score = x^T mu~. Consumes d normals per arm.
Decision choose_ts_a(std::span<const ArmPosterior> arms, const ContextMatrix& contexts, double v,
                     Sampler& sampler);

/// Per arm: tau ~ Gamma(alpha, beta), theta ~ N(mu_hat, 1 / T); score = theta - rho / tau.
Decision choose_cf_mvts(std::span<const CfArmPosterior> arms, double rho, Sampler& sampler);

Decision choose_uniform(std::size_t arms, Sampler& sampler);

struct PolicyParams {
    PolicyKind kind = PolicyKind::mvts_d;
    double rho = 1.0;
    double u = 1.0;  // mvts_dn
    double v = 1.0;  // mvts_dn, ts_a
};

/// A policy instance owns the posterior state for all K arms.
class Policy {
public:
    virtual ~Policy() = default;

    virtual PolicyKind kind() const noexcept = 0;
    virtual std::size_t arms() const noexcept = 0;
    virtual Decision choose(const ContextMatrix& contexts, Sampler& sampler) const = 0;
    /// Feeds the reward of the pulled arm; other arms are untouched.
    /// Throws InvalidParameter when `arm` is out of range.
    virtual void update(std::size_t arm, std::span<const double> context, double reward) = 0;
};

/// Throws InvalidParameter on K == 0, d == 0, negative rho or nonpositive u / v.
std::unique_ptr<Policy> make_policy(const PolicyParams& params, std::size_t arms, std::size_t dim);

/// Shared by mvts_d, mvts_dn and ts_a.
class LinearPolicy final : public Policy {
public:
    LinearPolicy(const PolicyParams& params, std::size_t arms, std::size_t dim);

    PolicyKind kind() const noexcept override { return params_.kind; }
    std::size_t arms() const noexcept override { return states_.size(); }
    Decision choose(const ContextMatrix& contexts, Sampler& sampler) const override;
    void update(std::size_t arm, std::span<const double> context, double reward) override;

    std::span<const ArmPosterior> states() const noexcept { return states_; }
    const PolicyParams& params() const noexcept { return params_; }

private:
    PolicyParams params_;
    std::vector<ArmPosterior> states_;
};

class CfMvtsPolicy final : public Policy {
public:
    CfMvtsPolicy(double rho, std::size_t arms) : rho_(rho), states_(arms) {}

    PolicyKind kind() const noexcept override { return PolicyKind::cf_mvts; }
    std::size_t arms() const noexcept override { return states_.size(); }
    Decision choose(const ContextMatrix& contexts, Sampler& sampler) const override;
    void update(std::size_t arm, std::span<const double> context, double reward) override;

    std::span<const CfArmPosterior> states() const noexcept { return states_; }

private:
    double rho_;
    std::vector<CfArmPosterior> states_;
};

class UniformPolicy final : public Policy {
public:
    explicit UniformPolicy(std::size_t arms) : arms_(arms) {}

    PolicyKind kind() const noexcept override { return PolicyKind::uniform; }
    std::size_t arms() const noexcept override { return arms_; }
    Decision choose(const ContextMatrix& contexts, Sampler& sampler) const override;
    void update(std::size_t arm, std::span<const double> context, double reward) override;

private:
    std::size_t arms_;
};

}  // namespace mvts
