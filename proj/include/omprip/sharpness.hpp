#pragma once

// The sharp threshold δ_{s+1} < 1/√(s+1) for s-step OMP recovery:
//   - the extremal matrix family where δ_{s+1} equals the threshold and the
//     first OMP step faces an all-way tie,
//   - checkers for the two auxiliary inequalities behind the sufficiency
//     proof (an algebraic identity in t and the S_0 > |S_k| dominance),
//   - a brute-force ℓ₀ oracle,
//   - an empirical sweep that tries to falsify sufficiency on a given matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "omprip/combinations.hpp"
#include "omprip/error.hpp"
#include "omprip/linalg.hpp"
#include "omprip/omp.hpp"
#include "omprip/random.hpp"
#include "omprip/ric.hpp"

namespace omprip {

/// 1/√(s+1)
inline double recovery_threshold(std::size_t s) { return 1.0 / std::sqrt(static_cast<double>(s) + 1.0); }

/// A computed δ has to clear the threshold by this much before it certifies a
/// matrix; the extremal family lands within rounding of the threshold.
inline constexpr double certification_margin = 1e-12;

inline bool certifies_recovery(double delta, std::size_t s) { return delta < recovery_threshold(s) - certification_margin; }

// ---------------------------------------------------------------------------
// Extremal matrix family

struct CounterexampleBundle {
    std::size_t s = 0;
    DenseMatrix matrix;                 // (s+1)×(s+1)
    double predicted_delta = 0.0;       // 1/√(s+1)
    Vector predicted_spectrum;          // ascending
    SparseSignal adversarial_signal;    // (1,…,1,0)
    double predicted_tie_value = 0.0;   // s/(s+1)
};

/// The (s+1)×(s+1) matrix
///
///     [ √(s/(s+1))·I_s   c·1 ]      c = 1/√(s(s+1))
///     [ 0 … 0              1 ]
///
/// whose Gram matrix is (s/(s+1))·I_s bordered by 1/(s+1) with corner
/// 1 + 1/(s+1).
inline CounterexampleBundle build_counterexample(std::size_t s)
{
    if (s == 0) {
        throw error(errc::invalid_s, "the counterexample family starts at s = 1");
    }
    const double sd = static_cast<double>(s);
    const std::size_t n = s + 1;

    CounterexampleBundle b;
    b.s = s;
    b.matrix = DenseMatrix(n, n);
    const double diag = std::sqrt(sd / (sd + 1.0));
    const double border = 1.0 / std::sqrt(sd * (sd + 1.0));
    for (std::size_t i = 0; i < s; ++i) {
        b.matrix(i, i) = diag;
        b.matrix(i, s) = border;
    }
    b.matrix(s, s) = 1.0;

    b.predicted_delta = recovery_threshold(s);
    b.predicted_spectrum.assign(s - 1, sd / (sd + 1.0));
    b.predicted_spectrum.push_back(1.0 - b.predicted_delta);
    b.predicted_spectrum.push_back(1.0 + b.predicted_delta);
    std::sort(b.predicted_spectrum.begin(), b.predicted_spectrum.end());

    std::vector<std::size_t> support(s);
    for (std::size_t i = 0; i < s; ++i) {
        support[i] = i;
    }
    b.adversarial_signal = SparseSignal(n, std::move(support), std::vector<double>(s, 1.0));
    b.predicted_tie_value = sd / (sd + 1.0);
    return b;
}

/// Largest ∞-norm residual of the eigenvector relations, checked by explicit
/// multiplication with AᵀA:
///   - mean_zero: v_j = e_j − e_{j+1}, j < s, spanning {v : v_{s+1} = 0, Σ v_k = 0},
///     against eigenvalue s/(s+1);
///   - plus/minus: w = (1,…,1, 1 ± √(s+1)) against 1 ± 1/√(s+1).
struct EigenRelationResiduals {
    double mean_zero = 0.0;
    double plus = 0.0;
    double minus = 0.0;
};

inline EigenRelationResiduals counterexample_eigen_residuals(const CounterexampleBundle& bundle)
{
    const std::size_t s = bundle.s;
    const std::size_t n = s + 1;
    const double sd = static_cast<double>(s);
    const DenseMatrix g = gram(bundle.matrix);

    auto residual = [&](const Vector& v, double lambda) {
        const Vector gv = multiply(g, v);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(gv[i] - lambda * v[i]));
        }
        return worst;
    };

    EigenRelationResiduals out;
    for (std::size_t j = 0; j + 1 < s; ++j) {
        Vector v(n, 0.0);
        v[j] = 1.0;
        v[j + 1] = -1.0;
        out.mean_zero = std::max(out.mean_zero, residual(v, sd / (sd + 1.0)));
    }
    const double root = std::sqrt(sd + 1.0);
    Vector w(n, 1.0);
    w[s] = 1.0 + root;
    out.plus = residual(w, 1.0 + 1.0 / root);
    w[s] = 1.0 - root;
    out.minus = residual(w, 1.0 - 1.0 / root);
    return out;
}

struct CounterexampleCheck {
    bool delta_matches = false;
    bool spectrum_matches = false;
    bool ties_match = false;
    bool omp_fails_under_highest_index = false;

    RicReport ric;
    Spectrum spectrum;
    Vector first_correlations;
    OmpTrace highest_index_trace;
    bool highest_index_recovered = false;

    [[nodiscard]] bool all() const
    {
        return delta_matches && spectrum_matches && ties_match && omp_fails_under_highest_index;
    }
};

/// Re-derives the bundle's claims numerically:
///   delta_matches     exact δ_{s+1} = predicted_delta within 1e-10
///   spectrum_matches  Gram eigenvalues = predicted_spectrum within 1e-10 each
///   ties_match        every ⟨b, A e_k⟩ = predicted_tie_value within 1e-12
///   omp_fails_...     HighestIndex OMP picks the last column first and does
///                     not recover the signal in s iterations
inline CounterexampleCheck verify_counterexample(const CounterexampleBundle& bundle)
{
    constexpr double spectral_tol = 1e-10;
    constexpr double tie_tol = 1e-12;
    constexpr double recovery_tol = 1e-8;

    const std::size_t s = bundle.s;
    const DenseMatrix& a = bundle.matrix;
    if (a.rows() != s + 1 || a.cols() != s + 1 || bundle.adversarial_signal.dimension() != s + 1) {
        throw error(errc::dimension_mismatch, "counterexample bundle shape does not match s");
    }

    CounterexampleCheck out;
    out.ric = ric_exact(a, s + 1);
    out.delta_matches = std::abs(out.ric.delta - bundle.predicted_delta) <= spectral_tol;

    out.spectrum = symmetric_eigenvalues(gram(a));
    out.spectrum_matches = out.spectrum.eigenvalues.size() == bundle.predicted_spectrum.size();
    for (std::size_t i = 0; out.spectrum_matches && i < bundle.predicted_spectrum.size(); ++i) {
        out.spectrum_matches = std::abs(out.spectrum.eigenvalues[i] - bundle.predicted_spectrum[i]) <= spectral_tol;
    }

    const Vector b = multiply(a, bundle.adversarial_signal.to_dense());
    out.first_correlations = transpose_multiply(a, b);
    out.ties_match = std::all_of(out.first_correlations.begin(), out.first_correlations.end(),
                                 [&](double c) { return std::abs(c - bundle.predicted_tie_value) <= tie_tol; });

    out.highest_index_trace = run_omp(a, b, s, HighestIndex{});
    out.highest_index_recovered =
        check_recovery(out.highest_index_trace.final_estimate, bundle.adversarial_signal, recovery_tol);
    out.omp_fails_under_highest_index = !out.highest_index_trace.iterations.empty() &&
                                        out.highest_index_trace.iterations.front().selected_index == s &&
                                        !out.highest_index_recovered;
    return out;
}

// ---------------------------------------------------------------------------
// Identity in t

/// t = sign·(√(s+1) − 1)/√s
inline double lemma_one_t(std::size_t s, int sign)
{
    if (s == 0) {
        throw error(errc::invalid_s, "t is defined for s >= 1");
    }
    if (sign != 1 && sign != -1) {
        throw error(errc::invalid_argument, "sign must be +1 or -1");
    }
    const double sd = static_cast<double>(s);
    return sign * (std::sqrt(sd + 1.0) - 1.0) / std::sqrt(sd);
}

struct LemmaOneInstance {
    std::size_t s = 1;
    int sign = 1;
    double t = 0.0;
    std::size_t k = 0; // 0-based column index
    Vector x;
    DenseMatrix a;

    static LemmaOneInstance make(std::size_t s, int sign, std::size_t k, Vector x, DenseMatrix a)
    {
        LemmaOneInstance inst;
        inst.s = s;
        inst.sign = sign;
        inst.t = lemma_one_t(s, sign);
        inst.k = k;
        inst.x = std::move(x);
        inst.a = std::move(a);
        return inst;
    }
};

/// |LHS − RHS| of
///   ‖A(x + t e_k)‖² − ‖A(t²x − t e_k)‖² = (1 − t⁴)(⟨Ax, Ax⟩ + sign·√s·⟨Ax, A e_k⟩).
/// The identity is algebraic, so the residual is pure rounding.
inline double lemma1_residual(const LemmaOneInstance& inst)
{
    if (inst.x.size() != inst.a.cols()) {
        throw error(errc::dimension_mismatch, "x length does not match matrix columns");
    }
    if (inst.k >= inst.a.cols()) {
        throw error(errc::dimension_mismatch, "k outside the column range");
    }
    const double t = inst.t;
    const double t2 = t * t;

    Vector u = inst.x;
    u[inst.k] += t;
    Vector v(inst.x.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = t2 * inst.x[i];
    }
    v[inst.k] -= t;

    const Vector au = multiply(inst.a, u);
    const Vector av = multiply(inst.a, v);
    const double lhs = dot(au, au) - dot(av, av);

    const Vector ax = multiply(inst.a, inst.x);
    const Vector aek = inst.a.column(inst.k);
    const double rhs =
        (1.0 - t2 * t2) * (dot(ax, ax) + inst.sign * std::sqrt(static_cast<double>(inst.s)) * dot(ax, aek));
    return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Correlation dominance

/// min over k ≥ s of (S_0 − |S_k|), with S_k = ⟨Ax, A e_k⟩ and S_0 the
/// largest |S_k| over the first s columns. x must be supported in the first
/// s columns. Positive whenever δ_{s+1}(A) < 1/√(s+1). No normalisation of x
/// is applied; the sign of the margin is scale-invariant.
inline double lemma2_margin(const DenseMatrix& a, std::size_t s, const SparseSignal& x)
{
    if (x.dimension() != a.cols()) {
        throw error(errc::dimension_mismatch, "signal dimension does not match matrix columns");
    }
    if (s == 0 || s >= a.cols()) {
        throw error(errc::invalid_order, "need 1 <= s < cols, got s = " + std::to_string(s));
    }
    if (x.sparsity() == 0) {
        throw error(errc::invalid_support, "signal has empty support");
    }
    if (x.support().back() >= s) {
        throw error(errc::invalid_support, "support must lie in the first s = " + std::to_string(s) + " columns");
    }
    const Vector correlations = transpose_multiply(a, multiply(a, x.to_dense()));
    double s0 = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
        s0 = std::max(s0, std::abs(correlations[k]));
    }
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = s; k < a.cols(); ++k) {
        margin = std::min(margin, s0 - std::abs(correlations[k]));
    }
    return margin;
}

/// Same check for an arbitrary support of size ≤ s: the columns are permuted
/// so the support comes first (remaining columns keep their order), which
/// leaves δ unchanged.
inline double lemma2_margin_any_support(const DenseMatrix& a, std::size_t s, const SparseSignal& x)
{
    if (x.dimension() != a.cols()) {
        throw error(errc::dimension_mismatch, "signal dimension does not match matrix columns");
    }
    if (x.sparsity() == 0 || x.sparsity() > s) {
        throw error(errc::invalid_support, "support size must be in [1, s]");
    }
    std::vector<std::size_t> order = x.support();
    std::vector<bool> used(a.cols(), false);
    for (auto j : order) {
        used[j] = true;
    }
    for (std::size_t j = 0; j < a.cols(); ++j) {
        if (!used[j]) {
            order.push_back(j);
        }
    }
    std::vector<std::size_t> prefix(x.sparsity());
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        prefix[i] = i;
    }
    return lemma2_margin(select_columns<double>(a, order), s, SparseSignal(a.cols(), prefix, x.values()));
}

// ---------------------------------------------------------------------------
// ℓ₀ oracle

/// Sparsest x with ‖Ax − b‖₂ ≤ fit_tol·max(1, ‖b‖₂), trying sparsity 0, 1, …,
/// s_max and supports in lexicographic order. Supports whose columns are
/// numerically dependent are skipped.
inline std::optional<SparseSignal> l0_brute_force(const DenseMatrix& a, const Vector& b, std::size_t s_max,
                                                  double fit_tol,
                                                  std::uint64_t enumeration_cap = default_enumeration_cap)
{
    if (b.size() != a.rows()) {
        throw error(errc::dimension_mismatch, "rhs length does not match matrix rows");
    }
    if (s_max > a.cols()) {
        throw error(errc::invalid_order, "s_max exceeds column count");
    }
    std::uint64_t total = 0;
    for (std::size_t k = 0; k <= s_max; ++k) {
        total += binomial(a.cols(), k);
        if (total > enumeration_cap) {
            throw error(errc::enumeration_too_large, "l0 search over " + std::to_string(a.cols()) +
                                                         " columns up to sparsity " + std::to_string(s_max) +
                                                         " exceeds the enumeration cap");
        }
    }

    const double bound = fit_tol * std::max(1.0, norm2(b));
    if (norm2(b) <= bound) {
        return SparseSignal(a.cols(), {}, {});
    }

    const householder_least_squares<double> solver;
    for (std::size_t k = 1; k <= std::min({s_max, a.rows(), a.cols()}); ++k) {
        std::optional<SparseSignal> found;
        for_each_combination(a.cols(), k, [&](const std::vector<std::size_t>& support) {
            LeastSquaresResult ls;
            try {
                ls = solver.solve(select_columns<double>(a, support), b);
            } catch (const error& e) {
                if (e.code() == errc::rank_deficient) {
                    return true;
                }
                throw;
            }
            if (norm2(ls.residual) > bound) {
                return true;
            }
            std::vector<std::size_t> sup;
            std::vector<double> vals;
            for (std::size_t i = 0; i < k; ++i) {
                if (ls.coefficients[i] != 0.0) {
                    sup.push_back(support[i]);
                    vals.push_back(ls.coefficients[i]);
                }
            }
            found = SparseSignal(a.cols(), std::move(sup), std::move(vals));
            return false;
        });
        if (found) {
            return found;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sufficiency sweep

enum class ValuePattern {
    flat_ones,        // every value +1
    random_signs,     // ±1
    random_magnitude, // ±U(0.5, 2)
};

inline const char* to_string(ValuePattern p)
{
    switch (p) {
    case ValuePattern::flat_ones: return "flat_ones";
    case ValuePattern::random_signs: return "random_signs";
    case ValuePattern::random_magnitude: return "random_magnitude";
    }
    return "unknown";
}

inline std::vector<double> draw_values(ValuePattern pattern, std::size_t count, Rng& rng)
{
    std::vector<double> v(count);
    for (auto& x : v) {
        switch (pattern) {
        case ValuePattern::flat_ones: x = 1.0; break;
        case ValuePattern::random_signs: x = rng.coin() ? 1.0 : -1.0; break;
        case ValuePattern::random_magnitude: x = (rng.coin() ? 1.0 : -1.0) * rng.uniform(0.5, 2.0); break;
        }
    }
    return v;
}

/// Pattern used by signal j of a support: 0 → flat, then alternating
/// random signs / random magnitudes.
constexpr ValuePattern pattern_for(std::size_t j) noexcept
{
    if (j == 0) {
        return ValuePattern::flat_ones;
    }
    return (j % 2 == 1) ? ValuePattern::random_signs : ValuePattern::random_magnitude;
}

inline std::vector<TieBreakRule> all_tie_break_rules(std::uint64_t seed)
{
    return {LowestIndex{}, HighestIndex{}, SeededRandom{seed}};
}

struct SweepSpec {
    bool exhaustive_supports = true;
    std::size_t patterns_per_support = 3; // exhaustive mode
    std::uint64_t trials = 1000;          // sampled mode: number of random signals
    std::uint64_t seed = 0;
    /// Empty means LowestIndex, HighestIndex and SeededRandom(per-trial seed).
    std::vector<TieBreakRule> rules;
    double recovery_tol = 1e-8;
    std::uint64_t enumeration_cap = default_enumeration_cap;
    /// Sample count for δ_{s+1} when exact enumeration exceeds the cap.
    std::uint64_t mc_ric_trials = 20000;
};

struct SweepFailure {
    std::uint64_t trial_index = 0;
    SparseSignal signal;
    std::string rule;
    std::vector<std::size_t> selected;
    std::string note;
};

struct SweepReport {
    std::size_t s = 0;
    double delta = 0.0;
    bool delta_is_exact = false;
    double threshold = 0.0;
    bool condition_holds = false;
    bool all_recovered = true;
    std::uint64_t trials = 0; // signals tried
    std::uint64_t runs = 0;   // signals × rules
    std::uint64_t recovered_runs = 0;
    std::vector<SweepFailure> failures; // sorted by trial index

    [[nodiscard]] double recovery_rate() const
    {
        return runs == 0 ? 1.0 : static_cast<double>(recovered_runs) / static_cast<double>(runs);
    }
    /// The sufficiency claim is contradicted: certified δ below the threshold
    /// yet some run failed.
    [[nodiscard]] bool sufficiency_violated() const { return condition_holds && !all_recovered; }
};

/// Runs s-iteration OMP on b = Ax for each trial signal and every rule.
///
/// Trial i uses seed mix_seed(spec.seed, i). In exhaustive mode trial
/// i = support_rank·patterns_per_support + j, over supports in lexicographic
/// order. The condition only counts as holding when δ_{s+1} was computed
/// exactly.
inline SweepReport theorem1_sweep(const DenseMatrix& a, std::size_t s, const SweepSpec& spec)
{
    if (s < 1 || s + 1 > a.cols() || s > a.rows()) {
        throw error(errc::invalid_order, "sweep needs 1 <= s, s+1 <= cols and s <= rows");
    }

    SweepReport report;
    report.s = s;
    report.threshold = recovery_threshold(s);
    if (binomial(a.cols(), s + 1) <= spec.enumeration_cap) {
        report.delta = ric_exact(a, s + 1, spec.enumeration_cap).delta;
        report.delta_is_exact = true;
    } else {
        report.delta = ric_lower_bound_mc(a, s + 1, spec.mc_ric_trials, spec.seed).delta;
    }
    report.condition_holds = report.delta_is_exact && certifies_recovery(report.delta, s);

    auto run_trial = [&](std::uint64_t trial, const SparseSignal& x) {
        const Vector b = multiply(a, x.to_dense());
        const auto trial_seed = mix_seed(spec.seed, trial);
        const auto rules = spec.rules.empty() ? all_tie_break_rules(trial_seed) : spec.rules;
        ++report.trials;
        for (const auto& rule : rules) {
            ++report.runs;
            SweepFailure fail{trial, x, to_string(rule), {}, {}};
            try {
                const auto trace = run_omp(a, b, s, rule);
                if (check_recovery(trace.final_estimate, x, spec.recovery_tol)) {
                    ++report.recovered_runs;
                    continue;
                }
                fail.selected = trace.selected();
                fail.note = "estimate differs from the signal";
            } catch (const error& e) {
                fail.note = e.what();
            }
            report.failures.push_back(std::move(fail));
        }
    };

    if (spec.exhaustive_supports) {
        const std::uint64_t per = std::max<std::size_t>(1, spec.patterns_per_support);
        std::uint64_t rank = 0;
        for_each_combination(a.cols(), s, [&](const std::vector<std::size_t>& support) {
            for (std::uint64_t j = 0; j < per; ++j) {
                const std::uint64_t trial = rank * per + j;
                Rng rng(mix_seed(spec.seed, trial));
                run_trial(trial, SparseSignal(a.cols(), support, draw_values(pattern_for(j), s, rng)));
            }
            ++rank;
            return true;
        });
    } else {
        for (std::uint64_t trial = 0; trial < spec.trials; ++trial) {
            Rng rng(mix_seed(spec.seed, trial));
            auto support = sample_support(a.cols(), s, rng);
            run_trial(trial, SparseSignal(a.cols(), std::move(support),
                                          draw_values(pattern_for(trial % 3), s, rng)));
        }
    }
    report.all_recovered = report.failures.empty();
    return report;
}

} // namespace omprip
