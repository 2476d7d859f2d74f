#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "omprip/ensembles.hpp"
#include "omprip/experiments.hpp"
#include "omprip/sharpness.hpp"
#include "test_support.hpp"

using namespace omprip;

// ---------------------------------------------------------------------------
// build_counterexample

TEST(Counterexample, MatrixLayoutAndGramEntries)
{
    for (std::size_t s = 1; s <= 10; ++s) {
        const auto b = build_counterexample(s);
        const double sd = static_cast<double>(s);
        ASSERT_EQ(b.matrix.rows(), s + 1);
        ASSERT_EQ(b.matrix.cols(), s + 1);
        for (std::size_t i = 0; i < s; ++i) {
            for (std::size_t j = 0; j < s; ++j) {
                EXPECT_EQ(b.matrix(i, j), i == j ? std::sqrt(sd / (sd + 1)) : 0.0);
            }
            EXPECT_EQ(b.matrix(i, s), 1.0 / std::sqrt(sd * (sd + 1)));
            EXPECT_EQ(b.matrix(s, i), 0.0);
        }
        EXPECT_EQ(b.matrix(s, s), 1.0);

        const auto g = gram(b.matrix);
        for (std::size_t i = 0; i <= s; ++i) {
            for (std::size_t j = 0; j <= s; ++j) {
                double expected = 0.0;
                if (i == s && j == s) {
                    expected = 1.0 + 1.0 / (sd + 1);
                } else if (i == s || j == s) {
                    expected = 1.0 / (sd + 1);
                } else if (i == j) {
                    expected = sd / (sd + 1);
                }
                EXPECT_NEAR(g(i, j), expected, 1e-14) << "s=" << s << " (" << i << "," << j << ")";
            }
        }
        EXPECT_EQ(b.adversarial_signal.support().size(), s);
        EXPECT_EQ(b.adversarial_signal.to_dense().back(), 0.0);
    }
}

TEST(Counterexample, PredictedQuantities)
{
    const auto one = build_counterexample(1);
    EXPECT_DOUBLE_EQ(one.matrix(0, 0), 1.0 / std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(one.matrix(0, 1), 1.0 / std::sqrt(2.0));

    const auto two = build_counterexample(2);
    const double r3 = 1.0 / std::sqrt(3.0);
    ASSERT_EQ(two.predicted_spectrum.size(), 3u);
    EXPECT_DOUBLE_EQ(two.predicted_spectrum[0], 1.0 - r3);
    EXPECT_DOUBLE_EQ(two.predicted_spectrum[1], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(two.predicted_spectrum[2], 1.0 + r3);

    EXPECT_DOUBLE_EQ(build_counterexample(3).predicted_tie_value, 0.75);
    EXPECT_DOUBLE_EQ(build_counterexample(3).predicted_delta, 0.5);

    try {
        build_counterexample(0);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::invalid_s);
    }
}

TEST(Counterexample, EigenvectorRelationsByDirectMultiply)
{
    for (std::size_t s = 1; s <= 20; ++s) {
        const auto r = counterexample_eigen_residuals(build_counterexample(s));
        EXPECT_LE(r.mean_zero, 1e-12);
        EXPECT_LE(r.plus, 1e-12);
        EXPECT_LE(r.minus, 1e-12);
    }
}

TEST(Counterexample, SpectrumAgreesWithReferenceSolver)
{
    for (std::size_t s = 1; s <= 12; ++s) {
        const auto b = build_counterexample(s);
        const auto ref = omprip::testing::eigen_reference_eigenvalues(gram(b.matrix));
        for (std::size_t i = 0; i <= s; ++i) {
            EXPECT_NEAR(ref[i], b.predicted_spectrum[i], 1e-12);
        }
    }
}

// ---------------------------------------------------------------------------
// verify_counterexample

TEST(VerifyCounterexample, AllFlagsForSmallAndFive)
{
    for (std::size_t s : {1u, 2u, 3u, 5u}) {
        const auto check = verify_counterexample(build_counterexample(s));
        EXPECT_TRUE(check.delta_matches) << s;
        EXPECT_TRUE(check.spectrum_matches) << s;
        EXPECT_TRUE(check.ties_match) << s;
        EXPECT_TRUE(check.omp_fails_under_highest_index) << s;
        EXPECT_TRUE(check.all());
    }
    const auto five = verify_counterexample(build_counterexample(5));
    EXPECT_NEAR(five.ric.delta, 0.4082482905, 1e-10);
}

TEST(VerifyCounterexample, PerturbationBreaksAFlag)
{
    auto bundle = build_counterexample(3);
    bundle.matrix(0, 0) += 0.01;
    const auto check = verify_counterexample(bundle);
    EXPECT_FALSE(check.all());
    EXPECT_FALSE(check.spectrum_matches);
    EXPECT_FALSE(check.delta_matches);
}

TEST(VerifyCounterexample, ShapeMismatch)
{
    auto bundle = build_counterexample(2);
    bundle.s = 3;
    EXPECT_THROW(verify_counterexample(bundle), error);
}

TEST(VerifyCounterexample, FavourableRuleOutcomeIsOnlyObserved)
{
    // With LowestIndex the first pick is inside the support; nothing is
    // asserted about later iterations beyond the run completing.
    for (std::size_t s = 1; s <= 6; ++s) {
        const auto bundle = build_counterexample(s);
        const Vector b = multiply(bundle.matrix, bundle.adversarial_signal.to_dense());
        const auto trace = run_omp(bundle.matrix, b, s, LowestIndex{});
        ASSERT_FALSE(trace.iterations.empty());
        EXPECT_EQ(trace.iterations.front().selected_index, 0u);
    }
}

// ---------------------------------------------------------------------------
// Identity in t

TEST(LemmaOne, TAlgebra)
{
    for (std::size_t s = 1; s <= 100; ++s) {
        const double sd = static_cast<double>(s);
        const double r = std::sqrt(sd + 1.0);
        for (int sign : {1, -1}) {
            const double t = lemma_one_t(s, sign);
            const double t2 = t * t;
            EXPECT_LT(t2, 1.0);
            EXPECT_NEAR(t2, (r - 1.0) / (r + 1.0), 1e-12);
            EXPECT_NEAR((1.0 - t2) / (1.0 + t2), 1.0 / r, 1e-12);
            EXPECT_NEAR(2.0 * t / (1.0 - t2), sign * std::sqrt(sd), 1e-12);
        }
    }
    // s = 1, sign −: 2t/(1−t²) = −1
    const double t = lemma_one_t(1, -1);
    EXPECT_NEAR(2.0 * t / (1.0 - t * t), -1.0, 1e-15);
    EXPECT_THROW(lemma_one_t(0, 1), error);
    EXPECT_THROW(lemma_one_t(1, 0), error);
}

TEST(LemmaOne, OrthogonalColumnsAnalytic)
{
    const auto inst = LemmaOneInstance::make(1, 1, 1, Vector{1.0, 0.0, 0.0}, DenseMatrix::identity(3));
    EXPECT_LE(lemma1_residual(inst), 1e-15);
}

TEST(LemmaOne, RandomInstancesBothSigns)
{
    std::mt19937_64 gen(6);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = omprip::testing::random_matrix(6, 8, gen);
        const auto x = omprip::testing::random_vector(8, gen);
        const Vector ax = multiply(a, x);
        for (int sign : {1, -1}) {
            const auto inst = LemmaOneInstance::make(4, sign, 2, x, a);
            EXPECT_LE(lemma1_residual(inst), 1e-10 * (1.0 + dot(ax, ax)));
        }
    }
}

TEST(LemmaOne, WrongSignBreaksIdentity)
{
    // sanity: the residual is not vacuously small
    std::mt19937_64 gen(60);
    const auto a = omprip::testing::random_matrix(5, 5, gen);
    const auto x = omprip::testing::random_vector(5, gen);
    auto inst = LemmaOneInstance::make(3, 1, 0, x, a);
    inst.sign = -1; // t still positive
    const Vector ax = multiply(a, x);
    if (std::abs(dot(ax, a.column(0))) > 1e-3) {
        EXPECT_GT(lemma1_residual(inst), 1e-6);
    }
}

TEST(LemmaOne, DimensionErrors)
{
    auto inst = LemmaOneInstance::make(2, 1, 5, Vector{1.0, 2.0}, DenseMatrix::identity(2));
    EXPECT_THROW(lemma1_residual(inst), error);
    inst.k = 0;
    inst.x = Vector{1.0};
    EXPECT_THROW(lemma1_residual(inst), error);
}

TEST(LemmaOne, SuiteHelper)
{
    const auto r = lemma1_suite(4, 50, 1);
    EXPECT_EQ(r.instances, 4u * 50u * 2u);
    EXPECT_TRUE(r.passed());
}

// ---------------------------------------------------------------------------
// Dominance margin

TEST(LemmaTwo, IdentityMarginIsOne)
{
    const auto id = DenseMatrix::identity(5);
    for (std::size_t s = 1; s < 5; ++s) {
        EXPECT_DOUBLE_EQ(lemma2_margin(id, s, SparseSignal(5, {0}, {1.0})), 1.0);
    }
}

TEST(LemmaTwo, ExtremalMatrixMarginIsZero)
{
    for (std::size_t s = 1; s <= 8; ++s) {
        const auto b = build_counterexample(s);
        EXPECT_NEAR(lemma2_margin(b.matrix, s, b.adversarial_signal), 0.0, 1e-12);
    }
}

TEST(LemmaTwo, CertifiedRandomMatricesHavePositiveMargin)
{
    std::size_t checked = 0;
    for (std::size_t s = 1; s <= 3; ++s) {
        const auto pool = certified_gaussian_matrices(20, s + 4, s, 30, 100 + s);
        for (const auto& cm : pool) {
            EXPECT_LT(cm.delta, recovery_threshold(s));
            for (std::uint64_t j = 0; j < 20; ++j) {
                const auto x = gen_prefix_signal(cm.matrix.cols(), 1 + j % s, mix_seed(cm.seed, j),
                                                 SignalDistribution::uniform_magnitude);
                EXPECT_GT(lemma2_margin(cm.matrix, s, x), 0.0);
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 100u);
}

TEST(LemmaTwo, ArbitrarySupportViaPermutation)
{
    const auto pool = certified_gaussian_matrices(20, 8, 2, 40, 7);
    ASSERT_FALSE(pool.empty());
    std::mt19937_64 gen(3);
    for (const auto& cm : pool) {
        for (int j = 0; j < 20; ++j) {
            const auto x = gen_sparse_signal(8, 2, gen(), SignalDistribution::flat_sign);
            EXPECT_GT(lemma2_margin_any_support(cm.matrix, 2, x), 0.0);
        }
    }
    // a prefix support gives the same answer either way
    const auto x = SparseSignal(8, {0, 1}, {1.0, -0.5});
    EXPECT_DOUBLE_EQ(lemma2_margin_any_support(pool[0].matrix, 2, x), lemma2_margin(pool[0].matrix, 2, x));
}

TEST(LemmaTwo, Errors)
{
    const auto id = DenseMatrix::identity(4);
    try {
        lemma2_margin(id, 2, SparseSignal(4, {2}, {1.0}));
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::invalid_support);
    }
    EXPECT_THROW(lemma2_margin(id, 2, SparseSignal(4, {}, {})), error);
    EXPECT_THROW(lemma2_margin(id, 4, SparseSignal(4, {0}, {1.0})), error);
    EXPECT_THROW(lemma2_margin(id, 2, SparseSignal(5, {0}, {1.0})), error);
}

// ---------------------------------------------------------------------------
// ℓ₀ oracle

TEST(L0BruteForce, ZeroRhsIsEmpty)
{
    const auto x = l0_brute_force(DenseMatrix::identity(3), Vector{0, 0, 0}, 2, 1e-10);
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ(x->sparsity(), 0u);
}

TEST(L0BruteForce, ExtremalMatrixRecoversFlatSignal)
{
    for (std::size_t s = 1; s <= 6; ++s) {
        const auto bundle = build_counterexample(s);
        const Vector b = multiply(bundle.matrix, bundle.adversarial_signal.to_dense());
        const auto x = l0_brute_force(bundle.matrix, b, s, 1e-10);
        ASSERT_TRUE(x.has_value());
        EXPECT_EQ(x->support(), bundle.adversarial_signal.support());
        for (double v : x->values()) {
            EXPECT_NEAR(v, 1.0, 1e-12);
        }
    }
}

TEST(L0BruteForce, RandomTwoSparse)
{
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = gen_gaussian_matrix(6, 10, gen(), true);
        const auto truth = gen_sparse_signal(10, 2, gen(), SignalDistribution::uniform_magnitude);
        const Vector b = multiply(a, truth.to_dense());
        const auto x = l0_brute_force(a, b, 2, 1e-9);
        ASSERT_TRUE(x.has_value());
        EXPECT_EQ(x->support(), truth.support());
        for (std::size_t i = 0; i < 2; ++i) {
            EXPECT_NEAR(x->values()[i], truth.values()[i], 1e-10);
        }
    }
}

TEST(L0BruteForce, NoSolutionAndCap)
{
    // b not in the span of any single column
    const auto a = DenseMatrix::identity(3);
    EXPECT_FALSE(l0_brute_force(a, Vector{1, 1, 0}, 1, 1e-10).has_value());
    EXPECT_TRUE(l0_brute_force(a, Vector{1, 1, 0}, 2, 1e-10).has_value());
    try {
        l0_brute_force(DenseMatrix::identity(40), Vector(40, 1.0), 20, 1e-10, 1000);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::enumeration_too_large);
    }
}

TEST(L0BruteForce, SkipsDependentSupports)
{
    const DenseMatrix a{{1.0, 2.0, 0.0}, {0.0, 0.0, 1.0}};
    const auto x = l0_brute_force(a, Vector{2.0, 3.0}, 2, 1e-12);
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ(x->support(), (std::vector<std::size_t>{0, 2}));
}

// ---------------------------------------------------------------------------
// Sufficiency sweep

TEST(Theorem1Sweep, IdentityExhaustive)
{
    SweepSpec spec;
    const auto r = theorem1_sweep(DenseMatrix::identity(6), 2, spec);
    EXPECT_EQ(r.delta, 0.0);
    EXPECT_TRUE(r.delta_is_exact);
    EXPECT_TRUE(r.condition_holds);
    EXPECT_TRUE(r.all_recovered);
    EXPECT_EQ(r.trials, binomial(6, 2) * 3);
    EXPECT_EQ(r.runs, r.trials * 3);
    EXPECT_EQ(r.recovery_rate(), 1.0);
}

TEST(Theorem1Sweep, ExtremalMatrixFailsAtTheBoundary)
{
    for (std::size_t s = 1; s <= 5; ++s) {
        SweepSpec spec;
        spec.seed = s;
        const auto r = theorem1_sweep(build_counterexample(s).matrix, s, spec);
        EXPECT_FALSE(r.condition_holds);
        EXPECT_NEAR(r.delta, r.threshold, 1e-12);
        EXPECT_FALSE(r.failures.empty());
        EXPECT_FALSE(r.sufficiency_violated());
        // the flat signal on {1..s} (trial 0) fails under HighestIndex
        const bool flat_high = std::any_of(r.failures.begin(), r.failures.end(), [](const SweepFailure& f) {
            return f.trial_index == 0 && f.rule == "high";
        });
        EXPECT_TRUE(flat_high) << "s = " << s;
        EXPECT_TRUE(std::is_sorted(r.failures.begin(), r.failures.end(),
                                   [](const auto& l, const auto& r2) { return l.trial_index < r2.trial_index; }));
    }
}

TEST(Theorem1Sweep, RandomGaussianRespectsSufficiency)
{
    int certified = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto a = gen_gaussian_matrix(20, 6, seed, true);
        SweepSpec spec;
        spec.seed = seed;
        spec.patterns_per_support = 5;
        const auto r = theorem1_sweep(a, 2, spec);
        EXPECT_FALSE(r.sufficiency_violated()) << "seed " << seed;
        certified += r.condition_holds;
    }
    EXPECT_GT(certified, 0);
}

TEST(Theorem1Sweep, SampledModeAndDeterminism)
{
    const auto a = gen_gaussian_matrix(20, 30, 5, true);
    SweepSpec spec;
    spec.exhaustive_supports = false;
    spec.trials = 50;
    spec.seed = 11;
    spec.enumeration_cap = 100; // forces the sampled δ
    spec.mc_ric_trials = 200;
    const auto r1 = theorem1_sweep(a, 3, spec);
    const auto r2 = theorem1_sweep(a, 3, spec);
    EXPECT_FALSE(r1.delta_is_exact);
    EXPECT_FALSE(r1.condition_holds);
    EXPECT_EQ(r1.trials, 50u);
    EXPECT_EQ(r1.delta, r2.delta);
    EXPECT_EQ(r1.recovered_runs, r2.recovered_runs);
}

TEST(Theorem1Sweep, InvalidOrder)
{
    EXPECT_THROW(theorem1_sweep(DenseMatrix::identity(3), 3, SweepSpec{}), error);
    EXPECT_THROW(theorem1_sweep(DenseMatrix::identity(3), 0, SweepSpec{}), error);
}
