#pragma once

// Random measurement matrices and sparse test signals. Everything is a pure
// function of its seed (see random.hpp for why the draws are hand-rolled).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "omprip/error.hpp"
#include "omprip/linalg.hpp"
#include "omprip/omp.hpp"
#include "omprip/random.hpp"
#include "omprip/ric.hpp"

namespace omprip {

enum class Ensemble { gaussian, sign_bernoulli };

enum class SignalDistribution {
    flat_sign,        // ±1
    uniform_magnitude, // ±U(0.5, 2)
    gaussian,         // N(0, 1), redrawn on exact zero
};

namespace detail {

inline void normalize_columns(DenseMatrix& a)
{
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const double n = norm2(a.column(j));
        if (n == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < a.rows(); ++i) {
            a(i, j) /= n;
        }
    }
}

} // namespace detail

/// Entries N(0, 1)/√m, optionally rescaled to unit-norm columns.
inline DenseMatrix gen_gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed, bool normalize_columns)
{
    if (m < 1 || n < 1) {
        throw error(errc::invalid_argument, "matrix dimensions must be positive");
    }
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    DenseMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = rng.normal() * scale;
        }
    }
    if (normalize_columns) {
        detail::normalize_columns(a);
    }
    return a;
}

/// Entries ±1/√m; columns already have unit norm.
inline DenseMatrix gen_sign_bernoulli_matrix(std::size_t m, std::size_t n, std::uint64_t seed)
{
    if (m < 1 || n < 1) {
        throw error(errc::invalid_argument, "matrix dimensions must be positive");
    }
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    DenseMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = rng.coin() ? scale : -scale;
        }
    }
    return a;
}

inline DenseMatrix gen_matrix(Ensemble e, std::size_t m, std::size_t n, std::uint64_t seed, bool normalize_columns)
{
    return e == Ensemble::gaussian ? gen_gaussian_matrix(m, n, seed, normalize_columns)
                                   : gen_sign_bernoulli_matrix(m, n, seed);
}

inline std::vector<double> draw_signal_values(SignalDistribution dist, std::size_t count, Rng& rng)
{
    std::vector<double> v(count);
    for (auto& x : v) {
        switch (dist) {
        case SignalDistribution::flat_sign: x = rng.coin() ? 1.0 : -1.0; break;
        case SignalDistribution::uniform_magnitude: x = (rng.coin() ? 1.0 : -1.0) * rng.uniform(0.5, 2.0); break;
        case SignalDistribution::gaussian:
            do {
                x = rng.normal();
            } while (x == 0.0);
            break;
        }
    }
    return v;
}

/// Uniform random support of size s with values from `dist`.
inline SparseSignal gen_sparse_signal(std::size_t n, std::size_t s, std::uint64_t seed, SignalDistribution dist)
{
    if (s < 1 || s > n) {
        throw error(errc::invalid_argument, "need 1 <= s <= N, got s = " + std::to_string(s));
    }
    Rng rng(seed);
    auto support = sample_support(n, s, rng);
    return SparseSignal(n, std::move(support), draw_signal_values(dist, s, rng));
}

/// Signal on the prefix support {0..s-1}.
inline SparseSignal gen_prefix_signal(std::size_t n, std::size_t s, std::uint64_t seed, SignalDistribution dist)
{
    if (s < 1 || s > n) {
        throw error(errc::invalid_argument, "need 1 <= s <= N, got s = " + std::to_string(s));
    }
    Rng rng(seed);
    std::vector<std::size_t> support(s);
    for (std::size_t i = 0; i < s; ++i) {
        support[i] = i;
    }
    return SparseSignal(n, std::move(support), draw_signal_values(dist, s, rng));
}

} // namespace omprip
