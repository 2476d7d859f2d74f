#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace omprip {

/// C(n, k), saturating at uint64 max.
constexpr std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept
{
    if (k > n) {
        return 0;
    }
    if (k > n - k) {
        k = n - k;
    }
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // result * (n - k + i) / i is exact at every step
        const std::uint64_t factor = n - k + i;
        if (result > std::numeric_limits<std::uint64_t>::max() / factor) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        result = result * factor / i;
    }
    return result;
}

/// Visits every k-subset of {0..n-1} in lexicographic order. The visitor
/// returns false to stop early. Returns the number of subsets visited.
template <typename Visitor>
std::uint64_t for_each_combination(std::size_t n, std::size_t k, Visitor&& visit)
{
    if (k > n) {
        return 0;
    }
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) {
        idx[i] = i;
    }
    std::uint64_t count = 0;
    for (;;) {
        ++count;
        if (!visit(static_cast<const std::vector<std::size_t>&>(idx))) {
            return count;
        }
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) {
            --i;
        }
        if (i == 0) {
            return count;
        }
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

} // namespace omprip
