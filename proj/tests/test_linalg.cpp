#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "omprip/linalg.hpp"
#include "omprip/sharpness.hpp"
#include "test_support.hpp"

using namespace omprip;
using omprip::testing::random_matrix;
using omprip::testing::random_symmetric;
using omprip::testing::random_vector;

TEST(DenseMatrix, RejectsWrongLengthAndNonFinite)
{
    EXPECT_THROW(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), error);
    try {
        DenseMatrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::non_finite);
    }
    EXPECT_THROW((DenseMatrix{{1.0, std::numeric_limits<double>::infinity()}}), error);
}

TEST(DenseMatrix, RowMajorLayoutAndColumns)
{
    const DenseMatrix a(2, 3, {1, 2, 3, 4, 5, 6});
    EXPECT_EQ(a(0, 2), 3.0);
    EXPECT_EQ(a(1, 0), 4.0);
    EXPECT_EQ(a.column(1), (Vector{2, 5}));
    EXPECT_EQ(a.transposed().transposed(), a);
}

// ---------------------------------------------------------------------------
// least_squares

TEST(LeastSquares, SingleColumnProjection)
{
    const DenseMatrix a{{1.0}, {0.0}};
    const auto r = least_squares(a, Vector{3.0, 4.0});
    ASSERT_EQ(r.coefficients.size(), 1u);
    EXPECT_NEAR(r.coefficients[0], 3.0, 1e-15);
    EXPECT_NEAR(r.residual[0], 0.0, 1e-15);
    EXPECT_NEAR(r.residual[1], 4.0, 1e-15);
}

TEST(LeastSquares, IdentitySystem)
{
    const auto r = least_squares(DenseMatrix::identity(3), Vector{1.0, 2.0, 3.0});
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(r.coefficients[i], static_cast<double>(i + 1), 1e-15);
        EXPECT_NEAR(r.residual[i], 0.0, 1e-15);
    }
}

TEST(LeastSquares, ExtremalMatrixLeadingColumnsReproduceFlatSignal)
{
    for (std::size_t s = 1; s <= 6; ++s) {
        const auto bundle = build_counterexample(s);
        // b = A·(1,…,1,0) by explicit row sums of the first s columns
        Vector b(s + 1, 0.0);
        for (std::size_t i = 0; i <= s; ++i) {
            for (std::size_t j = 0; j < s; ++j) {
                b[i] += bundle.matrix(i, j);
            }
        }
        std::vector<std::size_t> cols(s);
        std::iota(cols.begin(), cols.end(), 0);
        const auto r = least_squares(select_columns<double>(bundle.matrix, cols), b);
        for (double c : r.coefficients) {
            EXPECT_NEAR(c, 1.0, 1e-13);
        }
        EXPECT_LE(norm2(r.residual), 1e-14);
    }
}

TEST(LeastSquares, RankDeficientColumnsAreRefused)
{
    const DenseMatrix a{{1.0, 2.0}, {1.0, 2.0}, {0.0, 0.0}};
    try {
        least_squares(a, Vector{1.0, 1.0, 1.0});
        FAIL() << "dependent columns accepted";
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::rank_deficient);
    }
    const DenseMatrix z{{1.0, 0.0}, {0.0, 0.0}};
    EXPECT_THROW(least_squares(z, Vector{1.0, 1.0}), error);
}

TEST(LeastSquares, ShapeErrors)
{
    EXPECT_THROW(least_squares(DenseMatrix(2, 3), Vector{1, 2}), error);
    EXPECT_THROW(least_squares(DenseMatrix::identity(2), Vector{1, 2, 3}), error);
}

TEST(LeastSquares, ResidualOrthogonalAndMatchesEigenHouseholder)
{
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 1 + gen() % 30;
        const std::size_t k = 1 + gen() % m;
        const auto a = random_matrix(m, k, gen);
        const auto b = random_vector(m, gen);
        const auto r = least_squares(a, b);

        // residual definition
        const auto fitted = multiply(a, r.coefficients);
        for (std::size_t i = 0; i < m; ++i) {
            EXPECT_DOUBLE_EQ(r.residual[i], b[i] - fitted[i]);
        }
        // orthogonality to every column
        for (std::size_t j = 0; j < k; ++j) {
            const auto col = a.column(j);
            EXPECT_LE(std::abs(dot(r.residual, col)), 1e-10 * norm2(b) * norm2(col)) << "trial " << trial;
        }
        // independent solver
        const Eigen::VectorXd ref = omprip::testing::to_eigen(a).householderQr().solve(omprip::testing::to_eigen(b));
        for (std::size_t j = 0; j < k; ++j) {
            EXPECT_NEAR(r.coefficients[j], ref(j), 1e-9 * (1.0 + std::abs(ref(j))));
        }
    }
}

TEST(LeastSquares, RankToleranceIsConfigurable)
{
    // columns differ by 1e-10 in one entry: fine at 1e-12, refused at 1e-8
    const DenseMatrix a{{1.0, 1.0}, {1.0, 1.0 + 1e-10}, {0.0, 0.0}};
    const Vector b{1.0, 2.0, 0.0};
    EXPECT_NO_THROW(householder_least_squares<double>(1e-12).solve(a, b));
    EXPECT_THROW(householder_least_squares<double>(1e-8).solve(a, b), error);
}

// ---------------------------------------------------------------------------
// symmetric_eigenvalues

TEST(SymmetricEigenvalues, Diagonal)
{
    const auto sp = symmetric_eigenvalues(DenseMatrix{{5.0, 0.0}, {0.0, 2.0}});
    EXPECT_EQ(sp.eigenvalues, (Vector{2.0, 5.0}));
    EXPECT_EQ(sp.iterations_used, 0u);
}

TEST(SymmetricEigenvalues, TwoByTwoClosedForm)
{
    const double h = 1.0 / std::sqrt(2.0);
    const auto sp = symmetric_eigenvalues(DenseMatrix{{1.0, h}, {h, 1.0}});
    ASSERT_EQ(sp.eigenvalues.size(), 2u);
    EXPECT_NEAR(sp.eigenvalues[0], 1.0 - h, 1e-15);
    EXPECT_NEAR(sp.eigenvalues[1], 1.0 + h, 1e-15);
}

TEST(SymmetricEigenvalues, ExtremalGramForTwo)
{
    const auto g = gram(build_counterexample(2).matrix);
    const auto sp = symmetric_eigenvalues(g);
    const double r3 = 1.0 / std::sqrt(3.0);
    ASSERT_EQ(sp.eigenvalues.size(), 3u);
    EXPECT_NEAR(sp.eigenvalues[0], 1.0 - r3, 1e-12);
    EXPECT_NEAR(sp.eigenvalues[1], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(sp.eigenvalues[2], 1.0 + r3, 1e-12);
    EXPECT_NEAR(sp.eigenvalues[0], 0.42265, 1e-5);
    EXPECT_NEAR(sp.eigenvalues[2], 1.57735, 1e-5);
}

TEST(SymmetricEigenvalues, Errors)
{
    try {
        symmetric_eigenvalues(DenseMatrix{{1.0, 2.0}, {2.1, 1.0}});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::not_symmetric);
    }
    EXPECT_THROW(symmetric_eigenvalues(DenseMatrix(2, 3)), error);

    JacobiOptions capped;
    capped.max_sweeps = 0;
    try {
        symmetric_eigenvalues(DenseMatrix{{1.0, 0.5}, {0.5, 1.0}}, capped);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::no_convergence);
    }
}

TEST(SymmetricEigenvalues, ZeroMatrix)
{
    const auto sp = symmetric_eigenvalues(DenseMatrix(4, 4));
    EXPECT_EQ(sp.eigenvalues, Vector(4, 0.0));
}

TEST(SymmetricEigenvalues, SmallOrdersMatchClosedForms)
{
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 500; ++trial) {
        const auto g2 = random_symmetric(2, gen);
        const double mean = 0.5 * (g2(0, 0) + g2(1, 1));
        const double rad = std::hypot(0.5 * (g2(0, 0) - g2(1, 1)), g2(0, 1));
        const auto sp2 = symmetric_eigenvalues(g2);
        EXPECT_NEAR(sp2.eigenvalues[0], mean - rad, 1e-10 * (1.0 + std::abs(mean) + rad));
        EXPECT_NEAR(sp2.eigenvalues[1], mean + rad, 1e-10 * (1.0 + std::abs(mean) + rad));

        const auto g3 = random_symmetric(3, gen);
        const auto ref = omprip::testing::closed_form_eigenvalues_3x3(g3);
        const auto sp3 = symmetric_eigenvalues(g3);
        for (std::size_t i = 0; i < 3; ++i) {
            EXPECT_NEAR(sp3.eigenvalues[i], ref[i], 1e-10 * (1.0 + std::abs(ref[i])));
        }
    }
}

TEST(SymmetricEigenvalues, TraceDeterminantAndReference)
{
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + gen() % 10;
        const auto g = random_symmetric(n, gen);
        const auto sp = symmetric_eigenvalues(g);
        ASSERT_EQ(sp.eigenvalues.size(), n);
        EXPECT_TRUE(std::is_sorted(sp.eigenvalues.begin(), sp.eigenvalues.end()));

        double trace = 0.0;
        double abs_trace = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            trace += g(i, i);
            abs_trace += std::abs(g(i, i));
        }
        const double sum = std::accumulate(sp.eigenvalues.begin(), sp.eigenvalues.end(), 0.0);
        EXPECT_NEAR(sum, trace, 1e-10 * std::max(1.0, abs_trace));

        double prod = 1.0;
        for (double e : sp.eigenvalues) {
            prod *= e;
        }
        const double det = omprip::testing::lu_determinant(g);
        EXPECT_NEAR(prod, det, 1e-8 * std::max(std::abs(det), 1e-300) + 1e-12) << "n = " << n;

        const auto ref = omprip::testing::eigen_reference_eigenvalues(g);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_NEAR(sp.eigenvalues[i], ref[i], 1e-11 * (1.0 + std::abs(ref[i])));
        }
    }
}

TEST(SymmetricEigenvalues, ConvergesOnLargerOrders)
{
    std::mt19937_64 gen(3);
    for (std::size_t n : {40u, 120u}) {
        const auto g = random_symmetric(n, gen);
        const auto sp = symmetric_eigenvalues(g);
        EXPECT_LE(sp.iterations_used, 20u);
        const auto ref = omprip::testing::eigen_reference_eigenvalues(g);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_NEAR(sp.eigenvalues[i], ref[i], 1e-10 * n);
        }
    }
}

// ---------------------------------------------------------------------------
// gram

TEST(Gram, IdentityAndExtremalCase)
{
    EXPECT_EQ(gram(DenseMatrix::identity(4)), DenseMatrix::identity(4));

    const auto g = gram(build_counterexample(1).matrix);
    EXPECT_NEAR(g(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(g(0, 1), 0.5, 1e-15);
    EXPECT_NEAR(g(1, 0), 0.5, 1e-15);
    EXPECT_NEAR(g(1, 1), 1.5, 1e-15);
}

TEST(Gram, HandMultipliedWideMatrix)
{
    const double h = 1.0 / std::sqrt(2.0);
    const auto g = gram(DenseMatrix{{1.0, 0.0, h}, {0.0, 1.0, h}});
    const double expected[3][3] = {{1.0, 0.0, h}, {0.0, 1.0, h}, {h, h, 1.0}};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_NEAR(g(i, j), expected[i][j], 1e-15);
        }
    }
}

TEST(Gram, ExactlySymmetricAndRowOrderInvariant)
{
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + gen() % 12;
        const std::size_t n = 1 + gen() % 12;
        const auto a = random_matrix(m, n, gen);
        const auto g = gram(a);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_EQ(g(i, j), g(j, i));
            }
        }
        std::vector<std::size_t> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), gen);
        DenseMatrix shuffled(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                shuffled(i, j) = a(perm[i], j);
            }
        }
        const auto gs = gram(shuffled);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_NEAR(gs(i, j), g(i, j), 1e-12 * (1.0 + std::abs(g(i, j))));
            }
        }
    }
}
