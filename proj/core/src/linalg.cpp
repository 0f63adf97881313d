#include "mvts/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "mvts/errors.hpp"

namespace mvts {

Matrix Matrix::identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
    Matrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

Matrix Matrix::from_rows(std::size_t dim, std::span<const double> entries) {
    if (entries.size() != dim * dim) {
        throw InvalidParameter("Matrix::from_rows: expected " + std::to_string(dim * dim) + " entries, got " +
                               std::to_string(entries.size()));
    }
    Matrix m(dim);
    std::copy(entries.begin(), entries.end(), m.data_.begin());
    return m;
}

Matrix cholesky(const Matrix& m) {
    const std::size_t n = m.dim();
    Matrix lower(n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = m(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
        if (pivot <= kCholeskyJitter) {
            if (pivot < -kCholeskyJitter || std::isnan(pivot)) {
                throw NotPositiveDefinite("cholesky: pivot " + std::to_string(pivot) + " at column " +
                                          std::to_string(j));
            }
            pivot = kCholeskyJitter;
        }
        const double diag = std::sqrt(pivot);
        lower(j, j) = diag;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            lower(i, j) = s / diag;
        }
    }
    return lower;
}

Matrix invert_spd(const Matrix& m) {
    const std::size_t n = m.dim();
    const Matrix lower = cholesky(m);

    // Invert L by forward substitution, then form L^{-T} L^{-1}.
    Matrix linv(n);
    for (std::size_t j = 0; j < n; ++j) {
        linv(j, j) = 1.0 / lower(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = j; k < i; ++k) s -= lower(i, k) * linv(k, j);
            linv(i, j) = s / lower(i, i);
        }
    }
    Matrix inv(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = i; k < n; ++k) s += linv(k, i) * linv(k, j);
            inv(i, j) = s;
            inv(j, i) = s;
        }
    }
    return inv;
}

void sherman_morrison_inplace(Matrix& a_inv, std::span<const double> x) {
    assert(x.size() == a_inv.dim());
    const std::size_t n = a_inv.dim();
    const Vector ax = mat_vec(a_inv, x);
    const double denom = 1.0 + dot(x, ax);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = a_inv(i, j) - ax[i] * ax[j] / denom;
            a_inv(i, j) = v;
            a_inv(j, i) = v;
        }
    }
}

Matrix sherman_morrison(const Matrix& a_inv, std::span<const double> x) {
    Matrix out = a_inv;
    sherman_morrison_inplace(out, x);
    return out;
}

void add_outer_product(Matrix& a, std::span<const double> x) {
    assert(x.size() == a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) a(i, j) += x[i] * x[j];
    }
}

double quad_form(const Matrix& m, std::span<const double> x) {
    assert(x.size() == m.dim());
    double s = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) {
        double row = 0.5 * m(i, i) * x[i];
        for (std::size_t j = i + 1; j < m.dim(); ++j) row += 0.5 * (m(i, j) + m(j, i)) * x[j];
        s += row * x[i];
    }
    return std::max(0.0, 2.0 * s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

Vector mat_vec(const Matrix& m, std::span<const double> x) {
    assert(x.size() == m.dim());
    Vector out(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i) out[i] = dot(m.row(i), x);
    return out;
}

Vector lower_mat_vec(const Matrix& lower, std::span<const double> z) {
    assert(z.size() == lower.dim());
    Vector out(lower.dim(), 0.0);
    for (std::size_t i = 0; i < lower.dim(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k <= i; ++k) s += lower(i, k) * z[k];
        out[i] = s;
    }
    return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    assert(a.dim() == b.dim());
    const std::size_t n = a.dim();
    Matrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = 0; j < m.dim(); ++j) out(j, i) = m(i, j);
    }
    return out;
}

Matrix scaled(const Matrix& m, double factor) {
    Matrix out(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = m(i, j) * factor;
    }
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    assert(a.dim() == b.dim());
    return max_abs_diff(a.entries(), b.entries());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.entries()) s += v * v;
    return std::sqrt(s);
}

}  // namespace mvts
