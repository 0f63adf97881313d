#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mvts {

/// The K context vectors revealed in one round, one row per arm.
class ContextMatrix {
public:
    ContextMatrix() = default;
    ContextMatrix(std::size_t arms, std::size_t dim) : arms_(arms), dim_(dim), data_(arms * dim, 0.0) {}

    std::size_t arms() const noexcept { return arms_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<double> row(std::size_t arm) noexcept { return {data_.data() + arm * dim_, dim_}; }
    std::span<const double> row(std::size_t arm) const noexcept { return {data_.data() + arm * dim_, dim_}; }

    bool operator==(const ContextMatrix&) const = default;

private:
    std::size_t arms_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

}  // namespace mvts
