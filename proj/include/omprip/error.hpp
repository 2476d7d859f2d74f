#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace omprip {

enum class errc {
    invalid_argument,
    dimension_mismatch,
    non_finite,
    rank_deficient,
    not_symmetric,
    no_convergence,
    all_indices_selected,
    enumeration_too_large,
    invalid_order,
    invalid_support,
    invalid_s,
    parse_error,
    io_error,
};

constexpr std::string_view to_string(errc code) noexcept
{
    switch (code) {
    case errc::invalid_argument: return "InvalidArgument";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::non_finite: return "NonFinite";
    case errc::rank_deficient: return "RankDeficient";
    case errc::not_symmetric: return "NotSymmetric";
    case errc::no_convergence: return "NoConvergence";
    case errc::all_indices_selected: return "AllIndicesSelected";
    case errc::enumeration_too_large: return "EnumerationTooLarge";
    case errc::invalid_order: return "InvalidOrder";
    case errc::invalid_support: return "InvalidSupport";
    case errc::invalid_s: return "InvalidS";
    case errc::parse_error: return "ParseError";
    case errc::io_error: return "IOError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace omprip
