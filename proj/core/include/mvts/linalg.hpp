#pragma once

// Small dense linear algebra for the per-arm design matrices. Dimensions are
// tiny (d <= 16 in every experiment), so everything is row-major and unblocked.

#include <cstddef>
#include <span>
#include <vector>

namespace mvts {

using Vector = std::vector<double>;

/// Square row-major matrix. Holds the SPD design matrix A, its inverse and
/// Cholesky factors.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t dim, double fill = 0.0) : dim_(dim), data_(dim * dim, fill) {}

    static Matrix identity(std::size_t dim);
    static Matrix diagonal(std::span<const double> diag);
    /// Builds a matrix from `dim * dim` row-major entries.
    static Matrix from_rows(std::size_t dim, std::span<const double> entries);

    std::size_t dim() const noexcept { return dim_; }

    double& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * dim_ + col]; }
    double operator()(std::size_t row, std::size_t col) const noexcept { return data_[row * dim_ + col]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * dim_, dim_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * dim_, dim_}; }

    std::span<const double> entries() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// Pivots at or below this value (but not below its negative) are replaced by it.
inline constexpr double kCholeskyJitter = 1e-12;

/// Lower-triangular L with m = L * L^T. Only the lower triangle of `m` is read.
/// Throws NotPositiveDefinite when a pivot falls below -kCholeskyJitter.
Matrix cholesky(const Matrix& m);

/// Inverse of an SPD matrix through its Cholesky factor. The result is exactly symmetric.
Matrix invert_spd(const Matrix& m);

/// (A + x x^T)^{-1} from A^{-1}.
Matrix sherman_morrison(const Matrix& a_inv, std::span<const double> x);
void sherman_morrison_inplace(Matrix& a_inv, std::span<const double> x);

/// a += x x^T
void add_outer_product(Matrix& a, std::span<const double> x);

/// x^T M x, evaluated on the symmetric part of M and clamped at zero.
double quad_form(const Matrix& m, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> x);
Vector mat_vec(const Matrix& m, std::span<const double> x);
/// L z for lower-triangular L (upper triangle ignored).
Vector lower_mat_vec(const Matrix& lower, std::span<const double> z);
Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
Matrix scaled(const Matrix& m, double factor);

double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double frobenius_norm(const Matrix& m);

}  // namespace mvts
