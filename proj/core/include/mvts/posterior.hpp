#pragma once

// Per-arm normal-gamma posterior state.
//
// Contextual (disjoint linear) model, for an arm with pull history {(x_s, r_s)}:
//   A = I + sum x_s x_s^T        b = sum x_s r_s
//   C = n / 2                    D = (sum r_s^2 - b^T A^{-1} b) / 2
// with lambda ~ Gamma(C, D) (shape, rate) and mu | lambda ~ N(A^{-1} b, (lambda A)^{-1}).
//
// Context-free model: running mean, sample count and Gamma(alpha, beta) on the precision.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mvts/linalg.hpp"

namespace mvts {

struct Observation {
    Vector x;
    double reward = 0.0;
};

class ArmPosterior {
public:
    /// A^{-1} is recomputed from A by Cholesky after this many rank-1 updates.
    static constexpr std::size_t kReinvertInterval = 256;

    /// Empty-history prior: A = I, b = 0, C = D = 0.
    explicit ArmPosterior(std::size_t dim);

    /// Closed-form state from a full history, with A inverted directly.
    static ArmPosterior batch_rebuild(std::size_t dim, std::span<const Observation> history);

    /// Incremental conjugate update for one pull with context x and reward r.
    /// Throws InvalidObservation on non-finite input or a dimension mismatch.
    void observe(std::span<const double> x, double reward);

    /// Ridge estimate A^{-1} b.
    Vector mean_estimate() const;
    /// D / C. Throws NoObservations before the first pull.
    double variance_estimate() const;

    std::size_t dim() const noexcept { return b_.size(); }
    const Matrix& design() const noexcept { return a_; }
    const Matrix& design_inverse() const noexcept { return a_inv_; }
    const Vector& response() const noexcept { return b_; }
    double shape() const noexcept { return shape_; }
    double rate() const noexcept { return rate_; }
    std::size_t n_pulls() const noexcept { return n_pulls_; }
    /// Pulls whose context had Euclidean norm above 1 (accepted, but outside the model assumptions).
    std::size_t norm_violations() const noexcept { return norm_violations_; }

    bool operator==(const ArmPosterior&) const = default;

private:
    Matrix a_;
    Matrix a_inv_;
    Vector b_;
    double shape_ = 0.0;
    double rate_ = 0.0;
    double b_ainv_b_ = 0.0;
    std::size_t n_pulls_ = 0;
    std::size_t since_reinvert_ = 0;
    std::size_t norm_violations_ = 0;
};

/// Context-free posterior. A default-constructed value has seen no rewards; the
/// first observation sets (r, 1, 1/2, 1/2) and later ones apply the running update.
struct CfArmPosterior {
    double mu_hat = 0.0;
    double t_hat = 0.0;
    double alpha_hat = 0.0;
    double beta_hat = 0.0;

    bool initialized() const noexcept { return t_hat > 0.0; }

    /// Throws InvalidObservation on a non-finite reward.
    void observe(double reward);

    bool operator==(const CfArmPosterior&) const = default;
};

/// JSON debug dump: one object per arm with index, C, D, n_pulls, b and A (row-major).
std::string snapshot_json(std::span<const ArmPosterior> arms);

}  // namespace mvts
