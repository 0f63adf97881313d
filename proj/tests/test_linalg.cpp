#include <doctest.h>

#include <cmath>
#include <random>

#include "mvts/errors.hpp"
#include "mvts/linalg.hpp"
#include "support/test_support.hpp"

using namespace mvts;
using mvts::testing::max_abs;
using mvts::testing::to_eigen;

TEST_CASE("cholesky of identity and diagonal matrices") {
    CHECK(cholesky(Matrix::identity(2)) == Matrix::identity(2));

    const double diag[] = {4.0, 9.0};
    const Matrix lower = cholesky(Matrix::diagonal(diag));
    CHECK(lower(0, 0) == doctest::Approx(2.0));
    CHECK(lower(1, 1) == doctest::Approx(3.0));
    CHECK(lower(0, 1) == 0.0);
    CHECK(lower(1, 0) == 0.0);
}

TEST_CASE("cholesky reconstructs [[2,1],[1,2]]") {
    const double entries[] = {2.0, 1.0, 1.0, 2.0};
    const Matrix m = Matrix::from_rows(2, entries);
    const Matrix lower = cholesky(m);
    CHECK(lower(0, 1) == 0.0);
    // Reconstruction checked with Eigen's product, not the library's multiply.
    const Eigen::MatrixXd l = to_eigen(lower);
    const Eigen::MatrixXd rebuilt = l * l.transpose();
    CHECK((rebuilt - to_eigen(m)).norm() / to_eigen(m).norm() < 1e-10);
}

TEST_CASE("cholesky reconstruction holds up to condition number 1e6") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + trial % 15;
        // Q diag(eigs) Q^T with eigenvalues spread over [1, 1e6].
        Eigen::MatrixXd g = Eigen::MatrixXd::Random(static_cast<int>(d), static_cast<int>(d));
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        const Eigen::MatrixXd q = qr.householderQ();
        Eigen::VectorXd eig(d);
        for (std::size_t i = 0; i < d; ++i) eig(i) = std::pow(1e6, static_cast<double>(i) / static_cast<double>(d - 1));
        const Eigen::MatrixXd spd_e = q * eig.asDiagonal() * q.transpose();
        Matrix spd(d);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) spd(i, j) = 0.5 * (spd_e(i, j) + spd_e(j, i));
        }
        const Eigen::MatrixXd l = to_eigen(cholesky(spd));
        const Eigen::MatrixXd m = to_eigen(spd);
        CHECK((l * l.transpose() - m).norm() / m.norm() <= 1e-10);
    }
}

TEST_CASE("cholesky rejects indefinite input and floors tiny pivots") {
    const double indefinite[] = {1.0, 2.0, 2.0, 1.0};
    CHECK_THROWS_AS(cholesky(Matrix::from_rows(2, indefinite)), NotPositiveDefinite);

    const double singular[] = {1.0, 1.0, 1.0, 1.0};
    const Matrix lower = cholesky(Matrix::from_rows(2, singular));
    CHECK(lower(1, 1) == doctest::Approx(std::sqrt(kCholeskyJitter)));
}

TEST_CASE("sherman_morrison small cases") {
    const double zero[] = {0.0, 0.0};
    CHECK(sherman_morrison(Matrix::identity(2), zero) == Matrix::identity(2));

    const double e1[] = {1.0, 0.0};
    const Matrix updated = sherman_morrison(Matrix::identity(2), e1);
    CHECK(updated(0, 0) == doctest::Approx(0.5));
    CHECK(updated(1, 1) == doctest::Approx(1.0));
    CHECK(updated(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("sherman_morrison matches direct inversion for random SPD matrices") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = mvts::testing::random_spd(gen, 8);
        const Vector x = mvts::testing::random_context(gen, 8, 3.0);
        const Eigen::MatrixXd a_e = to_eigen(a);
        const Eigen::VectorXd x_e = to_eigen(x);
        const Eigen::MatrixXd direct = (a_e + x_e * x_e.transpose()).inverse();
        const Matrix a_inv = invert_spd(a);
        CHECK(max_abs(direct, sherman_morrison(a_inv, x)) < 1e-8);
    }
}

TEST_CASE("incremental inverse tracks the accumulated matrix over 500 updates") {
    std::mt19937_64 gen(5);
    for (std::size_t d : {1u, 3u, 8u}) {
        Matrix a = Matrix::identity(d);
        Matrix a_inv = Matrix::identity(d);
        for (int step = 0; step < 500; ++step) {
            const Vector x = mvts::testing::random_context(gen, d);
            add_outer_product(a, x);
            sherman_morrison_inplace(a_inv, x);
        }
        CHECK(max_abs(to_eigen(a).inverse(), a_inv) < 1e-8);
    }
}

TEST_CASE("invert_spd agrees with Eigen and is exactly symmetric") {
    std::mt19937_64 gen(8);
    const Matrix a = mvts::testing::random_spd(gen, 6);
    const Matrix inv = invert_spd(a);
    CHECK(max_abs(to_eigen(a).inverse(), inv) < 1e-10);
    CHECK(inv == transpose(inv));
}

TEST_CASE("quad_form") {
    const double x[] = {0.6, 0.8};
    CHECK(quad_form(Matrix::identity(2), x) == doctest::Approx(1.0));

    const double diag[] = {0.5, 0.25};
    const double y[] = {1.0, 2.0};
    CHECK(quad_form(Matrix::diagonal(diag), y) == doctest::Approx(1.5));

    // A = I + e1 e1^T inverted directly by Eigen.
    const double e1[] = {1.0, 0.0};
    Matrix a = Matrix::identity(2);
    add_outer_product(a, e1);
    const Eigen::MatrixXd inv_e = to_eigen(a).inverse();
    Matrix inv(2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) inv(i, j) = inv_e(i, j);
    }
    CHECK(quad_form(inv, e1) == doctest::Approx(0.5));

    const double zero[] = {0.0, 0.0};
    CHECK(quad_form(Matrix::identity(2), zero) == 0.0);
}

TEST_CASE("quad_form is invariant under symmetrization") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + trial % 8;
        Matrix m = mvts::testing::random_spd(gen, d);
        // Perturb antisymmetrically; the symmetric part is unchanged.
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i + 1; j < d; ++j) {
                const double e = unif(gen);
                m(i, j) += e;
                m(j, i) -= e;
            }
        }
        Matrix sym = m;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) sym(i, j) = 0.5 * (m(i, j) + m(j, i));
        }
        const Vector x = mvts::testing::random_context(gen, d);
        CHECK(quad_form(m, x) == doctest::Approx(quad_form(sym, x)).epsilon(1e-12));
        CHECK(quad_form(m, x) >= 0.0);
    }
}

TEST_CASE("from_rows rejects wrong entry counts") {
    const double three[] = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(Matrix::from_rows(2, three), InvalidParameter);
}
