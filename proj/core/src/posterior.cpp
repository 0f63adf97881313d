#include "mvts/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "mvts/errors.hpp"

namespace mvts {

namespace {

bool all_finite(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

ArmPosterior::ArmPosterior(std::size_t dim)
    : a_(Matrix::identity(dim)), a_inv_(Matrix::identity(dim)), b_(dim, 0.0) {
    if (dim == 0) throw InvalidParameter("ArmPosterior: dimension must be positive");
}

ArmPosterior ArmPosterior::batch_rebuild(std::size_t dim, std::span<const Observation> history) {
    ArmPosterior state(dim);
    double sum_r2 = 0.0;
    for (const auto& obs : history) {
        if (obs.x.size() != dim) throw InvalidObservation("batch_rebuild: context dimension mismatch");
        add_outer_product(state.a_, obs.x);
        for (std::size_t i = 0; i < dim; ++i) state.b_[i] += obs.x[i] * obs.reward;
        sum_r2 += obs.reward * obs.reward;
        if (norm(obs.x) > 1.0 + 1e-12) ++state.norm_violations_;
    }
    state.a_inv_ = invert_spd(state.a_);
    state.b_ainv_b_ = quad_form(state.a_inv_, state.b_);
    state.n_pulls_ = history.size();
    state.shape_ = 0.5 * static_cast<double>(history.size());
    state.rate_ = std::max(0.0, 0.5 * (sum_r2 - state.b_ainv_b_));
    return state;
}

void ArmPosterior::observe(std::span<const double> x, double reward) {
    if (x.size() != dim()) {
        throw InvalidObservation("observe: context has dimension " + std::to_string(x.size()) + ", expected " +
                                 std::to_string(dim()));
    }
    if (!std::isfinite(reward) || !all_finite(x)) throw InvalidObservation("observe: non-finite context or reward");
    if (norm(x) > 1.0 + 1e-12) ++norm_violations_;

    const double previous_quad = b_ainv_b_;

    add_outer_product(a_, x);
    for (std::size_t i = 0; i < b_.size(); ++i) b_[i] += x[i] * reward;
    if (++since_reinvert_ >= kReinvertInterval) {
        a_inv_ = invert_spd(a_);
        since_reinvert_ = 0;
    } else {
        sherman_morrison_inplace(a_inv_, x);
    }
    b_ainv_b_ = quad_form(a_inv_, b_);

    shape_ += 0.5;
    ++n_pulls_;

    double next_rate = rate_ + 0.5 * (-b_ainv_b_ + previous_quad + reward * reward);
    if (next_rate < 0.0) {
        // Rounding in the quadratic forms can push D marginally below zero.
        const double slack = 1e-12 * std::max(1.0, previous_quad + reward * reward);
        if (next_rate < -slack) {
            throw PolicyStateError("observe: posterior rate became negative (" + std::to_string(next_rate) + ")");
        }
        next_rate = 0.0;
    }
    rate_ = next_rate;
}

Vector ArmPosterior::mean_estimate() const { return mat_vec(a_inv_, b_); }

double ArmPosterior::variance_estimate() const {
    if (n_pulls_ == 0) throw NoObservations("variance_estimate: arm has not been pulled");
    return rate_ / shape_;
}

void CfArmPosterior::observe(double reward) {
    if (!std::isfinite(reward)) throw InvalidObservation("cf observe: non-finite reward");
    if (!initialized()) {
        mu_hat = reward;
        t_hat = 1.0;
        alpha_hat = 0.5;
        beta_hat = 0.5;
        return;
    }
    const double residual = reward - mu_hat;
    const double weight = t_hat / (t_hat + 1.0);
    mu_hat = weight * mu_hat + reward / (t_hat + 1.0);
    beta_hat += weight * residual * residual / 2.0;
    alpha_hat += 0.5;
    t_hat += 1.0;
}

std::string snapshot_json(std::span<const ArmPosterior> arms) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < arms.size(); ++i) {
        const auto& arm = arms[i];
        const auto entries = arm.design().entries();
        out.push_back({
            {"arm", i},
            {"C", arm.shape()},
            {"D", arm.rate()},
            {"n_pulls", arm.n_pulls()},
            {"b", arm.response()},
            {"A", std::vector<double>(entries.begin(), entries.end())},
        });
    }
    return out.dump(2);
}

}  // namespace mvts
