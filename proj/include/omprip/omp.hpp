#pragma once

// Orthogonal Matching Pursuit with an explicit tie-breaking policy.
//
// Indices are 0-based throughout the library. The CLI and report writers
// convert to 1-based on output.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "omprip/error.hpp"
#include "omprip/linalg.hpp"
#include "omprip/random.hpp"

namespace omprip {

/// An s-sparse vector: sorted distinct support with one nonzero value each.
class SparseSignal {
public:
    SparseSignal() = default;

    SparseSignal(std::size_t dimension, std::vector<std::size_t> support, std::vector<double> values)
        : dimension_(dimension), support_(std::move(support)), values_(std::move(values))
    {
        if (support_.size() != values_.size()) {
            throw error(errc::dimension_mismatch, "support and values have different lengths");
        }
        detail::require_finite<double>(values_, "signal");
        std::vector<std::size_t> order(support_.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(), [&](auto l, auto r) { return support_[l] < support_[r]; });
        std::vector<std::size_t> sorted_support(order.size());
        std::vector<double> sorted_values(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            sorted_support[i] = support_[order[i]];
            sorted_values[i] = values_[order[i]];
        }
        for (std::size_t i = 0; i < sorted_support.size(); ++i) {
            if (sorted_support[i] >= dimension_) {
                throw error(errc::invalid_support, "support index " + std::to_string(sorted_support[i] + 1) +
                                                       " outside [1, " + std::to_string(dimension_) + "]");
            }
            if (i > 0 && sorted_support[i] == sorted_support[i - 1]) {
                throw error(errc::invalid_support,
                            "duplicate support index " + std::to_string(sorted_support[i] + 1));
            }
            if (sorted_values[i] == 0.0) {
                throw error(errc::invalid_support,
                            "zero value at support index " + std::to_string(sorted_support[i] + 1));
            }
        }
        support_ = std::move(sorted_support);
        values_ = std::move(sorted_values);
    }

    /// Keeps the nonzero entries of a dense vector.
    static SparseSignal from_dense(const Vector& dense)
    {
        std::vector<std::size_t> support;
        std::vector<double> values;
        for (std::size_t i = 0; i < dense.size(); ++i) {
            if (dense[i] != 0.0) {
                support.push_back(i);
                values.push_back(dense[i]);
            }
        }
        return SparseSignal(dense.size(), std::move(support), std::move(values));
    }

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t sparsity() const noexcept { return support_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& support() const noexcept { return support_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    [[nodiscard]] Vector to_dense() const
    {
        Vector x(dimension_, 0.0);
        for (std::size_t i = 0; i < support_.size(); ++i) {
            x[support_[i]] = values_[i];
        }
        return x;
    }

    friend bool operator==(const SparseSignal&, const SparseSignal&) = default;

private:
    std::size_t dimension_ = 0;
    std::vector<std::size_t> support_;
    std::vector<double> values_;
};

struct LowestIndex {
    friend bool operator==(LowestIndex, LowestIndex) = default;
};
struct HighestIndex {
    friend bool operator==(HighestIndex, HighestIndex) = default;
};
/// Uniform pick from the tie set; the draw at iteration k uses mix_seed(seed, k).
struct SeededRandom {
    std::uint64_t seed = 0;
    friend bool operator==(SeededRandom, SeededRandom) = default;
};

using TieBreakRule = std::variant<LowestIndex, HighestIndex, SeededRandom>;

inline std::string to_string(const TieBreakRule& rule)
{
    struct {
        std::string operator()(LowestIndex) const { return "low"; }
        std::string operator()(HighestIndex) const { return "high"; }
        std::string operator()(SeededRandom r) const { return "rand:" + std::to_string(r.seed); }
    } visitor;
    return std::visit(visitor, rule);
}

inline constexpr double default_tie_tolerance = 1e-9;
inline constexpr double default_residual_tolerance = 1e-12;

struct Selection {
    std::size_t index = 0;
    std::vector<std::size_t> tie_set; // ascending
};

/// Argmax of |correlation| over the indices not yet selected. The tie set is
/// every candidate with |c| ≥ max − tie_tol·max; the rule picks from it.
inline Selection select_index(const Vector& correlations, const std::vector<std::size_t>& already_selected,
                              const TieBreakRule& tie_break, double tie_tol = default_tie_tolerance,
                              std::size_t iteration = 0)
{
    if (correlations.empty()) {
        throw error(errc::invalid_argument, "select_index on empty correlations");
    }
    std::vector<bool> taken(correlations.size(), false);
    for (auto j : already_selected) {
        if (j < taken.size()) {
            taken[j] = true;
        }
    }

    double best = -1.0;
    for (std::size_t i = 0; i < correlations.size(); ++i) {
        if (!taken[i]) {
            best = std::max(best, std::abs(correlations[i]));
        }
    }
    if (best < 0.0) {
        throw error(errc::all_indices_selected, "every index is already selected");
    }

    Selection sel;
    const double cutoff = best - tie_tol * best;
    for (std::size_t i = 0; i < correlations.size(); ++i) {
        if (!taken[i] && std::abs(correlations[i]) >= cutoff) {
            sel.tie_set.push_back(i);
        }
    }

    struct {
        const std::vector<std::size_t>& ties;
        std::size_t iteration;
        std::size_t operator()(LowestIndex) const { return ties.front(); }
        std::size_t operator()(HighestIndex) const { return ties.back(); }
        std::size_t operator()(SeededRandom r) const
        {
            Rng rng(mix_seed(r.seed, iteration));
            return ties[rng.below(ties.size())];
        }
    } pick{sel.tie_set, iteration};
    sel.index = std::visit(pick, tie_break);
    return sel;
}

struct OmpIteration {
    std::size_t selected_index = 0;
    Vector correlations; // ⟨r_{k-1}, A e_i⟩ for every column i
    std::vector<std::size_t> tie_set;
    double residual_norm_after = 0.0;
};

struct OmpTrace {
    std::vector<OmpIteration> iterations;
    Vector final_estimate;
    bool converged = false;

    [[nodiscard]] std::vector<std::size_t> selected() const
    {
        std::vector<std::size_t> out;
        out.reserve(iterations.size());
        for (const auto& it : iterations) {
            out.push_back(it.selected_index);
        }
        return out;
    }
};

struct OmpOptions {
    std::size_t max_iterations = 0;
    TieBreakRule tie_break = LowestIndex{};
    /// Stop once ‖r‖₂ ≤ residual_tol·max(1, ‖b‖₂).
    double residual_tol = default_residual_tolerance;
    double tie_tol = default_tie_tolerance;
    double rank_tol = default_rank_tolerance;
};

/// Runs OMP on b against the raw (unnormalised) columns of A. Each iteration
/// re-solves the least-squares problem over all selected columns.
inline OmpTrace run_omp(const DenseMatrix& a, const Vector& b, const OmpOptions& opts)
{
    if (b.size() != a.rows()) {
        throw error(errc::dimension_mismatch, "rhs length " + std::to_string(b.size()) + " != rows " +
                                                  std::to_string(a.rows()));
    }
    if (opts.max_iterations > std::min(a.rows(), a.cols())) {
        throw error(errc::dimension_mismatch, "max_iterations " + std::to_string(opts.max_iterations) +
                                                  " exceeds min(rows, cols) = " +
                                                  std::to_string(std::min(a.rows(), a.cols())));
    }
    if (!(opts.residual_tol >= 0.0)) {
        throw error(errc::invalid_argument, "residual_tol must be nonnegative");
    }
    detail::require_finite<double>(b, "rhs");

    const householder_least_squares<double> solver(opts.rank_tol);
    const double stop = opts.residual_tol * std::max(1.0, norm2(b));

    OmpTrace trace;
    trace.final_estimate.assign(a.cols(), 0.0);
    std::vector<std::size_t> selected;
    Vector residual = b;
    Vector coefficients;
    double residual_norm = norm2(residual);

    while (residual_norm > stop && selected.size() < opts.max_iterations) {
        OmpIteration step;
        step.correlations = transpose_multiply(a, residual);
        const std::size_t k = selected.size();
        auto sel = select_index(step.correlations, selected, opts.tie_break, opts.tie_tol, k);
        step.selected_index = sel.index;
        step.tie_set = std::move(sel.tie_set);
        selected.push_back(sel.index);

        LeastSquaresResult ls;
        try {
            ls = solver.solve(select_columns<double>(a, selected), b);
        } catch (const error& e) {
            if (e.code() != errc::rank_deficient) {
                throw;
            }
            throw error(errc::rank_deficient, "OMP iteration " + std::to_string(k + 1) + " selected column " +
                                                  std::to_string(sel.index + 1) +
                                                  ", dependent on earlier selections: " + e.what());
        }
        coefficients = std::move(ls.coefficients);
        residual = std::move(ls.residual);
        residual_norm = norm2(residual);
        step.residual_norm_after = residual_norm;
        trace.iterations.push_back(std::move(step));
    }

    for (std::size_t i = 0; i < selected.size(); ++i) {
        trace.final_estimate[selected[i]] = coefficients[i];
    }
    trace.converged = residual_norm <= stop;
    return trace;
}

inline OmpTrace run_omp(const DenseMatrix& a, const Vector& b, std::size_t max_iterations,
                        const TieBreakRule& tie_break, double residual_tol = default_residual_tolerance)
{
    OmpOptions opts;
    opts.max_iterations = max_iterations;
    opts.tie_break = tie_break;
    opts.residual_tol = residual_tol;
    return run_omp(a, b, opts);
}

/// True iff ‖estimate − truth‖∞ ≤ tol·max(1, ‖truth‖∞).
inline bool check_recovery(const Vector& estimate, const SparseSignal& truth, double tol)
{
    if (estimate.size() != truth.dimension()) {
        throw error(errc::dimension_mismatch, "estimate length " + std::to_string(estimate.size()) +
                                                  " != signal dimension " + std::to_string(truth.dimension()));
    }
    const Vector x = truth.to_dense();
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        worst = std::max(worst, std::abs(estimate[i] - x[i]));
    }
    return worst <= tol * std::max(1.0, norm_inf(x));
}

} // namespace omprip
