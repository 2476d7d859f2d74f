#pragma once

// Seeded experiment drivers shared by the command-line tool and the test
// suites: the two lemma suites and the ensemble recovery sweep.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "omprip/ensembles.hpp"
#include "omprip/error.hpp"
#include "omprip/linalg.hpp"
#include "omprip/omp.hpp"
#include "omprip/random.hpp"
#include "omprip/ric.hpp"
#include "omprip/sharpness.hpp"

namespace omprip {

// ---------------------------------------------------------------------------
// Identity suite

struct LemmaOneSuiteResult {
    std::size_t s_max = 0;
    std::uint64_t instances = 0;
    /// max |LHS − RHS| / (1 + ‖Ax‖²) over all instances
    double max_scaled_residual = 0.0;
    std::vector<double> max_scaled_residual_by_s; // index s-1
    double bound = 1e-10;

    [[nodiscard]] bool passed() const { return max_scaled_residual <= bound; }
};

/// `trials` random (A, x, k) per s ∈ {1..s_max}, each checked with both
/// signs. A is m×N Gaussian with m ∈ [1, 12], N ∈ [1, 16]; x is dense
/// Gaussian, so the identity is exercised well outside sparse inputs.
inline LemmaOneSuiteResult lemma1_suite(std::size_t s_max, std::uint64_t trials, std::uint64_t seed)
{
    LemmaOneSuiteResult out;
    out.s_max = s_max;
    out.max_scaled_residual_by_s.assign(s_max, 0.0);
    for (std::size_t s = 1; s <= s_max; ++s) {
        const auto s_seed = mix_seed(seed, s);
        for (std::uint64_t trial = 0; trial < trials; ++trial) {
            Rng rng(mix_seed(s_seed, trial));
            const std::size_t m = 1 + rng.below(12);
            const std::size_t n = 1 + rng.below(16);
            DenseMatrix a(m, n);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    a(i, j) = rng.normal();
                }
            }
            Vector x(n);
            for (auto& v : x) {
                v = rng.normal();
            }
            const std::size_t k = rng.below(n);
            const Vector ax = multiply(a, x);
            const double scale = 1.0 + dot(ax, ax);
            for (int sign : {1, -1}) {
                const auto inst = LemmaOneInstance::make(s, sign, k, x, a);
                const double r = lemma1_residual(inst) / scale;
                out.max_scaled_residual = std::max(out.max_scaled_residual, r);
                out.max_scaled_residual_by_s[s - 1] = std::max(out.max_scaled_residual_by_s[s - 1], r);
                ++out.instances;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dominance suite

struct CertifiedMatrix {
    DenseMatrix matrix;
    std::size_t s = 0;
    double delta = 0.0; // exact δ_{s+1}
    std::uint64_t seed = 0;
};

/// Draws normalised Gaussian m×n matrices from seeds mix_seed(seed, i),
/// i = 0..candidates-1, and keeps the ones whose exact δ_{s+1} is below
/// 1/√(s+1).
inline std::vector<CertifiedMatrix> certified_gaussian_matrices(std::size_t m, std::size_t n, std::size_t s,
                                                                std::uint64_t candidates, std::uint64_t seed)
{
    std::vector<CertifiedMatrix> out;
    for (std::uint64_t i = 0; i < candidates; ++i) {
        const auto matrix_seed = mix_seed(seed, i);
        auto a = gen_gaussian_matrix(m, n, matrix_seed, true);
        const double delta = ric_exact(a, s + 1).delta;
        if (certifies_recovery(delta, s)) {
            out.push_back({std::move(a), s, delta, matrix_seed});
        }
    }
    return out;
}

struct LemmaTwoSuiteResult {
    std::size_t s_max = 0;
    std::uint64_t candidates = 0;
    std::uint64_t certified_matrices = 0;
    std::uint64_t signals = 0;
    /// Smallest margin over certified matrices; +inf when none were certified.
    double min_margin = std::numeric_limits<double>::infinity();
    std::vector<std::uint64_t> certified_by_s;
    /// Margin on the extremal matrix with x = (1,…,1,0), per s; expected 0.
    std::vector<double> boundary_margin_by_s;
    double boundary_tol = 1e-12;

    [[nodiscard]] double max_abs_boundary_margin() const
    {
        double worst = 0.0;
        for (double m : boundary_margin_by_s) {
            worst = std::max(worst, std::abs(m));
        }
        return worst;
    }
    [[nodiscard]] bool passed() const
    {
        return (certified_matrices == 0 || min_margin > 0.0) && max_abs_boundary_margin() <= boundary_tol;
    }
};

/// For each s: `candidates` normalised Gaussian matrices of shape
/// 8(s+1)² × (s+2) (tall enough that many certify), filtered by exact
/// δ_{s+1}; then `signals_per_matrix` prefix-supported signals each, cycling
/// through the three value distributions.
inline LemmaTwoSuiteResult lemma2_suite(std::size_t s_max, std::uint64_t candidates,
                                        std::uint64_t signals_per_matrix, std::uint64_t seed)
{
    LemmaTwoSuiteResult out;
    out.s_max = s_max;
    constexpr SignalDistribution dists[] = {SignalDistribution::flat_sign, SignalDistribution::uniform_magnitude,
                                            SignalDistribution::gaussian};
    for (std::size_t s = 1; s <= s_max; ++s) {
        const std::size_t m = 8 * (s + 1) * (s + 1);
        const std::size_t n = s + 2;
        const auto pool = certified_gaussian_matrices(m, n, s, candidates, mix_seed(seed, s));
        out.candidates += candidates;
        out.certified_matrices += pool.size();
        out.certified_by_s.push_back(pool.size());
        for (const auto& cm : pool) {
            for (std::uint64_t j = 0; j < signals_per_matrix; ++j) {
                Rng rng(mix_seed(cm.seed, j));
                const std::size_t size = 1 + rng.below(s);
                const auto x = gen_prefix_signal(n, size, rng.next_u64(), dists[j % 3]);
                out.min_margin = std::min(out.min_margin, lemma2_margin(cm.matrix, s, x));
                ++out.signals;
            }
        }
        const auto bundle = build_counterexample(s);
        out.boundary_margin_by_s.push_back(lemma2_margin(bundle.matrix, s, bundle.adversarial_signal));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ensemble recovery experiment

struct ExperimentConfig {
    std::uint64_t master_seed = 0;
    std::size_t rows = 20;
    std::size_t cols = 10;
    std::size_t sparsity = 2;
    Ensemble ensemble = Ensemble::gaussian;
    bool normalize_columns = true;
    std::uint64_t trials = 10; // matrices drawn
    /// Unset: all three rules.
    std::optional<TieBreakRule> tie_break;
    bool csv_output = false;
    bool exhaustive_supports = true;
    std::size_t patterns_per_support = 3;
    std::uint64_t signal_trials = 200; // per matrix, sampled mode
    double recovery_tol = 1e-8;

    void validate() const
    {
        if (rows < 1 || cols < 1) {
            throw error(errc::invalid_argument, "rows and cols must be positive");
        }
        // s <= m <= N is deliberately not required: the extremal family has m = N = s+1
        if (sparsity < 1 || sparsity > cols) {
            throw error(errc::invalid_argument, "sparsity must be in [1, cols]");
        }
        if (sparsity + 1 > cols || sparsity > rows) {
            throw error(errc::invalid_argument, "the sweep needs sparsity + 1 <= cols and sparsity <= rows");
        }
    }
};

struct RecoveryRateRow {
    std::uint64_t matrix_index = 0;
    std::uint64_t matrix_seed = 0;
    double delta_s_plus_1 = 0.0;
    bool delta_is_exact = false;
    double recovery_rate = 0.0;
    std::uint64_t trials = 0; // OMP runs
    bool condition_satisfied = false;
    std::vector<SweepFailure> failures;
};

struct ExperimentResult {
    std::vector<RecoveryRateRow> rows;
    std::uint64_t certified = 0;
    std::uint64_t violations = 0; // certified rows with recovery_rate < 1
};

inline ExperimentResult run_recovery_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    ExperimentResult result;
    for (std::uint64_t i = 0; i < cfg.trials; ++i) {
        const auto matrix_seed = mix_seed(cfg.master_seed, i);
        const auto a = gen_matrix(cfg.ensemble, cfg.rows, cfg.cols, matrix_seed, cfg.normalize_columns);

        SweepSpec spec;
        spec.exhaustive_supports = cfg.exhaustive_supports;
        spec.patterns_per_support = cfg.patterns_per_support;
        spec.trials = cfg.signal_trials;
        spec.seed = mix_seed(matrix_seed, 1);
        spec.recovery_tol = cfg.recovery_tol;
        if (cfg.tie_break) {
            spec.rules = {*cfg.tie_break};
        }
        auto sweep = theorem1_sweep(a, cfg.sparsity, spec);

        RecoveryRateRow row;
        row.matrix_index = i;
        row.matrix_seed = matrix_seed;
        row.delta_s_plus_1 = sweep.delta;
        row.delta_is_exact = sweep.delta_is_exact;
        row.recovery_rate = sweep.recovery_rate();
        row.trials = sweep.runs;
        row.condition_satisfied = sweep.condition_holds;
        if (sweep.sufficiency_violated()) {
            ++result.violations;
            row.failures = std::move(sweep.failures);
        }
        if (row.condition_satisfied) {
            ++result.certified;
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

} // namespace omprip
