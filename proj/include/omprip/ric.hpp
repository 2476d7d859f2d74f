#pragma once

// Restricted isometry constants. δ_s is the largest deviation from 1 of any
// eigenvalue of an s-column Gram submatrix A_Sᵀ A_S. ric_exact enumerates
// every support; ric_lower_bound_mc samples supports and only ever
// under-estimates.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "omprip/combinations.hpp"
#include "omprip/error.hpp"
#include "omprip/linalg.hpp"
#include "omprip/random.hpp"

namespace omprip {

inline constexpr std::uint64_t default_enumeration_cap = 10'000'000;

struct SupportDeviation {
    double deviation = 0.0;
    double eigen_low = 0.0;
    double eigen_high = 0.0;
};

struct RicReport {
    std::size_t order = 0;
    double delta = 0.0;
    bool is_exact = false;
    std::vector<std::size_t> worst_support;
    double worst_eigen_low = 0.0;
    double worst_eigen_high = 0.0;
    std::uint64_t supports_examined = 0;
};

namespace detail {

inline void require_support(const DenseMatrix& a, const std::vector<std::size_t>& support)
{
    if (support.empty()) {
        throw error(errc::invalid_support, "empty support");
    }
    std::vector<std::size_t> sorted = support;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw error(errc::invalid_support, "support has repeated indices");
    }
    if (sorted.back() >= a.cols()) {
        throw error(errc::invalid_support, "support index " + std::to_string(sorted.back() + 1) +
                                               " exceeds column count " + std::to_string(a.cols()));
    }
}

inline SupportDeviation deviation_unchecked(const DenseMatrix& a, const std::vector<std::size_t>& support)
{
    const auto spectrum = symmetric_eigenvalues(gram(select_columns<double>(a, support)));
    SupportDeviation d;
    d.eigen_low = spectrum.min();
    d.eigen_high = spectrum.max();
    d.deviation = std::max(d.eigen_high - 1.0, 1.0 - d.eigen_low);
    return d;
}

inline void require_order(const DenseMatrix& a, std::size_t s)
{
    if (s < 1 || s > a.cols()) {
        throw error(errc::invalid_order,
                    "order " + std::to_string(s) + " outside [1, " + std::to_string(a.cols()) + "]");
    }
}

} // namespace detail

inline SupportDeviation support_deviation(const DenseMatrix& a, const std::vector<std::size_t>& support)
{
    detail::require_support(a, support);
    return detail::deviation_unchecked(a, support);
}

/// Exact δ_s by lexicographic enumeration of all C(cols, s) supports. Ties
/// keep the lexicographically first worst support.
inline RicReport ric_exact(const DenseMatrix& a, std::size_t s, std::uint64_t enumeration_cap = default_enumeration_cap)
{
    detail::require_order(a, s);
    const std::uint64_t total = binomial(a.cols(), s);
    if (total > enumeration_cap) {
        throw error(errc::enumeration_too_large,
                    "C(" + std::to_string(a.cols()) + ", " + std::to_string(s) + ") = " + std::to_string(total) +
                        " supports exceeds the cap of " + std::to_string(enumeration_cap) +
                        "; use ric_lower_bound_mc for a sampled lower bound");
    }

    RicReport report;
    report.order = s;
    report.is_exact = true;
    report.delta = -1.0;
    report.supports_examined = for_each_combination(a.cols(), s, [&](const std::vector<std::size_t>& support) {
        const auto d = detail::deviation_unchecked(a, support);
        if (d.deviation > report.delta) {
            report.delta = d.deviation;
            report.worst_support = support;
            report.worst_eigen_low = d.eigen_low;
            report.worst_eigen_high = d.eigen_high;
        }
        return true;
    });
    return report;
}

/// Uniformly random s-subset of {0..n-1}, sorted.
inline std::vector<std::size_t> sample_support(std::size_t n, std::size_t s, Rng& rng)
{
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
        pool[i] = i;
    }
    for (std::size_t i = 0; i < s; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(s);
    std::sort(pool.begin(), pool.end());
    return pool;
}

/// Max deviation over `trials` sampled supports; trial t draws from
/// mix_seed(seed, t). Never exceeds the exact δ_s.
inline RicReport ric_lower_bound_mc(const DenseMatrix& a, std::size_t s, std::uint64_t trials, std::uint64_t seed)
{
    detail::require_order(a, s);
    if (trials < 1) {
        throw error(errc::invalid_argument, "ric_lower_bound_mc needs at least one trial");
    }
    RicReport report;
    report.order = s;
    report.is_exact = false;
    report.delta = -1.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng(mix_seed(seed, t));
        const auto support = sample_support(a.cols(), s, rng);
        const auto d = detail::deviation_unchecked(a, support);
        if (d.deviation > report.delta) {
            report.delta = d.deviation;
            report.worst_support = support;
            report.worst_eigen_low = d.eigen_low;
            report.worst_eigen_high = d.eigen_high;
        }
    }
    report.supports_examined = trials;
    return report;
}

} // namespace omprip
