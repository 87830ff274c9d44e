#include <cmath>
#include <vector>

#include "doctest.h"
#include "lrss2d/errors.hpp"
#include "lrss2d/matrix.hpp"
#include "lrss2d/rng.hpp"
#include "lrss2d/svd.hpp"
#include "test_util.hpp"

using namespace lrss2d;
using testutil::matrix_approx;
using testutil::max_abs_diff;

namespace {

// Independent oracle: plain 30-term Taylor series, no scaling or squaring.
Matrix taylor_exp_oracle(const Matrix& a, int terms = 30) {
    Matrix result = Matrix::identity(a.rows());
    Matrix term = Matrix::identity(a.rows());
    for (int k = 1; k <= terms; ++k) {
        term = mat_mul(term, a);
        term *= 1.0 / static_cast<double>(k);
        result += term;
    }
    return result;
}

Matrix diag(std::initializer_list<double> entries) {
    Matrix m(entries.size(), entries.size());
    std::size_t i = 0;
    for (double e : entries) m(i, i) = e, ++i;
    return m;
}

}  // namespace

TEST_SUITE("numlin") {

TEST_CASE("rng: identical seeds give bit-identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42), d(43);
    bool differ = false;
    for (int i = 0; i < 10; ++i) differ |= (c.next_u64() != d.next_u64());
    CHECK(differ);
}

TEST_CASE("rng: split streams are independent of the parent continuation") {
    Rng parent(7);
    Rng child = parent.split();
    CHECK(child.next_u64() != parent.next_u64());
    // split is itself deterministic
    Rng parent2(7);
    Rng child2 = parent2.split();
    CHECK(child2.next_u64() == Rng(child.seed()).next_u64());
}

TEST_CASE("mat_mul: identity, hand case, zero") {
    Rng rng(1);
    const Matrix m = Matrix::random_normal(3, 3, rng);
    CHECK(matrix_approx(mat_mul(Matrix::identity(3), m), m, 0.0));

    const Matrix a{{1, 2}, {3, 4}};
    const Matrix b{{0}, {1}};
    const Matrix expect{{2}, {4}};
    CHECK(matrix_approx(mat_mul(a, b), expect, 0.0));

    CHECK(matrix_approx(mat_mul(Matrix::zeros(3, 3), m), Matrix::zeros(3, 3), 0.0));
}

TEST_CASE("mat_mul: shape mismatch names both shapes") {
    const Matrix a(2, 3), b(4, 2);
    CHECK_THROWS_WITH_AS(mat_mul(a, b), doctest::Contains("2x3"), ShapeError);
    CHECK_THROWS_WITH_AS(mat_mul(a, b), doctest::Contains("4x2"), ShapeError);
}

TEST_CASE("mat_mul: associativity within 1e-10 relative") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = Matrix::random_normal(4, 6, rng);
        const Matrix b = Matrix::random_normal(6, 3, rng);
        const Matrix c = Matrix::random_normal(3, 5, rng);
        const Matrix left = mat_mul(mat_mul(a, b), c);
        const Matrix right = mat_mul(a, mat_mul(b, c));
        CHECK(frobenius_norm(left - right) <= 1e-10 * std::max(1.0, frobenius_norm(left)));
    }
}

TEST_CASE("mat_exp: zero matrix gives identity") {
    CHECK(matrix_approx(mat_exp(Matrix::zeros(3, 3)), Matrix::identity(3), 0.0));
}

TEST_CASE("mat_exp: diagonal closed form") {
    const Matrix a = diag({std::log(2.0), 0.0});
    const Matrix expect = diag({2.0, 1.0});
    CHECK(max_abs_diff(mat_exp(a), expect) < 1e-14);
}

TEST_CASE("mat_exp: matches 30-term Taylor oracle for small-norm input") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix a = Matrix::random_normal(4, 4, rng, 0.2);  // ||A|| < 1
        CHECK(max_abs_diff(mat_exp(a), taylor_exp_oracle(a)) < 1e-10);
    }
}

TEST_CASE("mat_exp: non-square input is a shape error") {
    CHECK_THROWS_AS(mat_exp(Matrix(2, 3)), ShapeError);
}

TEST_CASE("mat_exp: multiplicative over commuting diagonal pairs") {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix a(5, 5), b(5, 5);
        for (std::size_t i = 0; i < 5; ++i) {
            a(i, i) = rng.normal();
            b(i, i) = rng.normal();
        }
        const Matrix lhs = mat_exp(a + b);
        const Matrix rhs = mat_mul(mat_exp(a), mat_exp(b));
        CHECK(frobenius_norm(lhs - rhs) <= 1e-10 * std::max(1.0, frobenius_norm(lhs)));
    }
}

TEST_CASE("frobenius_norm and mse basics") {
    CHECK(frobenius_norm(Matrix::zeros(3, 4)) == 0.0);
    Rng rng(5);
    const Matrix x = Matrix::random_normal(3, 3, rng);
    CHECK(mse(x, x) == 0.0);
    CHECK(mse(Matrix{{1, 2}}, Matrix{{0, 0}}) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK_THROWS_AS(mse(Matrix(2, 2), Matrix(2, 3)), ShapeError);
}

TEST_CASE("svd: diagonal and identity singular values") {
    const SvdResult r = svd(diag({3, 2, 1}));
    REQUIRE(r.sigma.size() == 3);
    CHECK(r.sigma[0] == doctest::Approx(3).epsilon(1e-12));
    CHECK(r.sigma[1] == doctest::Approx(2).epsilon(1e-12));
    CHECK(r.sigma[2] == doctest::Approx(1).epsilon(1e-12));

    const SvdResult ri = svd(Matrix::identity(4));
    for (double s : ri.sigma) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("svd: reconstruction and orthogonality on random matrices") {
    Rng rng(6);
    for (auto [m, n] : std::vector<std::pair<std::size_t, std::size_t>>{
             {5, 5}, {6, 3}, {3, 6}, {8, 8}, {1, 4}, {4, 1}}) {
        const Matrix a = Matrix::random_normal(m, n, rng);
        const SvdResult r = svd(a);
        REQUIRE(r.u.rows() == m);
        REQUIRE(r.u.cols() == m);
        REQUIRE(r.vt.rows() == n);
        REQUIRE(r.vt.cols() == n);
        REQUIRE(r.sigma.size() == std::min(m, n));

        // descending non-negative
        for (std::size_t i = 0; i + 1 < r.sigma.size(); ++i) CHECK(r.sigma[i] >= r.sigma[i + 1]);
        CHECK(r.sigma.back() >= 0.0);

        // orthogonality within 1e-10 Frobenius
        CHECK(frobenius_norm(mat_mul(r.u.transpose(), r.u) - Matrix::identity(m)) < 1e-10);
        CHECK(frobenius_norm(mat_mul(r.vt, r.vt.transpose()) - Matrix::identity(n)) < 1e-10);

        // reconstruct within 1e-8 relative Frobenius
        Matrix sig(m, n);
        for (std::size_t i = 0; i < r.sigma.size(); ++i) sig(i, i) = r.sigma[i];
        const Matrix rec = mat_mul(mat_mul(r.u, sig), r.vt);
        CHECK(frobenius_norm(rec - a) <= 1e-8 * std::max(1.0, frobenius_norm(a)));
    }
}

TEST_CASE("svd: deterministic, two calls bit-identical") {
    Rng rng(7);
    const Matrix a = Matrix::random_normal(6, 4, rng);
    const SvdResult r1 = svd(a);
    const SvdResult r2 = svd(a);
    CHECK(r1.u == r2.u);
    CHECK(r1.vt == r2.vt);
    CHECK(r1.sigma == r2.sigma);
}

TEST_CASE("svd: sign convention puts the largest-magnitude entry positive") {
    Rng rng(8);
    const Matrix a = Matrix::random_normal(5, 5, rng);
    const SvdResult r = svd(a);
    for (std::size_t j = 0; j < 5; ++j) {
        double best = 0.0;
        for (std::size_t i = 0; i < 5; ++i)
            if (std::abs(r.u(i, j)) > std::abs(best)) best = r.u(i, j);
        CHECK(best >= 0.0);
    }
}

TEST_CASE("svd: rank-deficient and zero matrices") {
    const SvdResult z = svd(Matrix::zeros(3, 3));
    for (double s : z.sigma) CHECK(s == 0.0);
    CHECK(frobenius_norm(mat_mul(z.u.transpose(), z.u) - Matrix::identity(3)) < 1e-12);

    // rank-1 outer product
    const Matrix col{{1}, {2}, {2}};
    const Matrix row{{3, 0, 4}};
    const Matrix a = mat_mul(col, row);  // sigma = 3 * 5 = 15
    const SvdResult r = svd(a);
    CHECK(r.sigma[0] == doctest::Approx(15.0).epsilon(1e-12));
    CHECK(r.sigma[1] == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(frobenius_norm(mat_mul(r.u.transpose(), r.u) - Matrix::identity(3)) < 1e-10);
}

TEST_CASE("truncate_svd: diagonal case by exhaustive check") {
    const SvdResult r = svd(diag({3, 2, 1}));
    auto [ur, vr] = truncate_svd(r, 2);
    const Matrix approx = mat_mul(ur, vr.transpose());
    CHECK(matrix_approx(approx, diag({3, 2, 0}), 1e-10));
    CHECK(frobenius_norm(diag({3, 2, 1}) - approx) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("truncate_svd: full rank reconstructs the input") {
    Rng rng(9);
    const Matrix a = Matrix::random_normal(5, 5, rng);
    auto [ur, vr] = truncate_svd(svd(a), 5);
    CHECK(frobenius_norm(a - mat_mul(ur, vr.transpose())) <=
          1e-8 * std::max(1.0, frobenius_norm(a)));
}

TEST_CASE("truncate_svd: error equals tail of sigma") {
    Rng rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix a = Matrix::random_normal(6, 6, rng);
        const SvdResult r = svd(a);
        for (std::size_t rank = 1; rank <= 6; ++rank) {
            auto [ur, vr] = truncate_svd(r, rank);
            double tail = 0.0;
            for (std::size_t i = rank; i < r.sigma.size(); ++i) tail += r.sigma[i] * r.sigma[i];
            CHECK(frobenius_norm(a - mat_mul(ur, vr.transpose())) ==
                  doctest::Approx(std::sqrt(tail)).epsilon(1e-8));
        }
    }
}

TEST_CASE("truncate_svd: rank out of range") {
    const SvdResult r = svd(Matrix::identity(3));
    CHECK_THROWS_AS(truncate_svd(r, 0), ArgumentError);
    CHECK_THROWS_AS(truncate_svd(r, 4), ArgumentError);
}

TEST_CASE("truncate_svd beats random factor pairs (Eckart-Young, small sweep)") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix a = Matrix::random_normal(8, 8, rng);
        const std::size_t rank = 1 + static_cast<std::size_t>(rng.next_u64() % 7);
        auto [ur, vr] = truncate_svd(svd(a), rank);
        const double best = frobenius_norm(a - mat_mul(ur, vr.transpose()));
        for (int comp = 0; comp < 20; ++comp) {
            const Matrix cu = Matrix::random_normal(8, rank, rng);
            const Matrix cv = Matrix::random_normal(8, rank, rng);
            CHECK(best <= frobenius_norm(a - mat_mul(cu, cv.transpose())));
        }
    }
}

}  // TEST_SUITE
