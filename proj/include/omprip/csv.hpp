#pragma once

// Plain-text formats used by the command-line tool.
//
// Matrix: one row per line, comma-separated decimals, no header.
// Signal: two lines; 1-based support indices, then the matching values.
// Vector: a single row or a single column in matrix format.
//
// Values are written with 17 significant digits, which round-trips every
// double exactly.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "omprip/error.hpp"
#include "omprip/linalg.hpp"
#include "omprip/omp.hpp"

namespace omprip::csv {

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

template <typename T>
std::vector<T> parse_fields(std::string_view line, std::size_t line_no)
{
    std::vector<T> out;
    std::size_t pos = 0;
    for (;;) {
        const auto comma = line.find(',', pos);
        const auto field = trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        T value{};
        auto begin = field.data();
        if (!field.empty() && field.front() == '+') {
            ++begin;
        }
        const auto [ptr, ec] = std::from_chars(begin, field.data() + field.size(), value);
        if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
            throw error(errc::parse_error,
                        "line " + std::to_string(line_no) + ": cannot parse field '" + std::string(field) + "'");
        }
        out.push_back(value);
        if (comma == std::string_view::npos) {
            return out;
        }
        pos = comma + 1;
    }
}

inline std::vector<std::string> content_lines(std::istream& in)
{
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) {
            lines.push_back(line);
        }
    }
    return lines;
}

inline std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw error(errc::io_error, "cannot open '" + path + "' for reading");
    }
    return in;
}

inline std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw error(errc::io_error, "cannot open '" + path + "' for writing");
    }
    return out;
}

} // namespace detail

inline DenseMatrix read_matrix(std::istream& in)
{
    const auto lines = detail::content_lines(in);
    if (lines.empty()) {
        throw error(errc::parse_error, "matrix file has no rows");
    }
    std::vector<double> entries;
    std::size_t cols = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto row = detail::parse_fields<double>(lines[i], i + 1);
        if (i == 0) {
            cols = row.size();
        } else if (row.size() != cols) {
            throw error(errc::parse_error, "line " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                                               " fields, expected " + std::to_string(cols));
        }
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return DenseMatrix(lines.size(), cols, std::move(entries));
}

inline void write_matrix(std::ostream& out, const DenseMatrix& a)
{
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) {
                out << ',';
            }
            out << format_double(a(i, j));
        }
        out << '\n';
    }
}

inline Vector read_vector(std::istream& in)
{
    const DenseMatrix m = read_matrix(in);
    if (m.rows() != 1 && m.cols() != 1) {
        throw error(errc::parse_error, "vector file must be a single row or a single column");
    }
    return Vector(m.entries().begin(), m.entries().end());
}

inline void write_vector(std::ostream& out, const Vector& v)
{
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) {
            out << ',';
        }
        out << format_double(v[i]);
    }
    out << '\n';
}

/// The file carries no dimension; the caller supplies it (usually the
/// column count of the matching matrix).
inline SparseSignal read_signal(std::istream& in, std::size_t dimension)
{
    const auto lines = detail::content_lines(in);
    if (lines.size() != 2) {
        throw error(errc::parse_error, "signal file must have exactly two non-empty lines");
    }
    const auto one_based = detail::parse_fields<long long>(lines[0], 1);
    auto values = detail::parse_fields<double>(lines[1], 2);
    if (one_based.size() != values.size()) {
        throw error(errc::parse_error, "signal support and value lines have different lengths");
    }
    std::vector<std::size_t> support;
    support.reserve(one_based.size());
    for (auto idx : one_based) {
        if (idx < 1 || static_cast<unsigned long long>(idx) > dimension) {
            throw error(errc::invalid_support,
                        "support index " + std::to_string(idx) + " outside [1, " + std::to_string(dimension) + "]");
        }
        support.push_back(static_cast<std::size_t>(idx - 1));
    }
    return SparseSignal(dimension, std::move(support), std::move(values));
}

inline void write_signal(std::ostream& out, const SparseSignal& x)
{
    for (std::size_t i = 0; i < x.sparsity(); ++i) {
        if (i) {
            out << ',';
        }
        out << x.support()[i] + 1;
    }
    out << '\n';
    write_vector(out, x.values());
}

inline DenseMatrix load_matrix(const std::string& path)
{
    auto in = detail::open_in(path);
    return read_matrix(in);
}

inline void save_matrix(const std::string& path, const DenseMatrix& a)
{
    auto out = detail::open_out(path);
    write_matrix(out, a);
}

inline Vector load_vector(const std::string& path)
{
    auto in = detail::open_in(path);
    return read_vector(in);
}

inline SparseSignal load_signal(const std::string& path, std::size_t dimension)
{
    auto in = detail::open_in(path);
    return read_signal(in, dimension);
}

inline void save_signal(const std::string& path, const SparseSignal& x)
{
    auto out = detail::open_out(path);
    write_signal(out, x);
}

inline std::string to_string(const DenseMatrix& a)
{
    std::ostringstream os;
    write_matrix(os, a);
    return os.str();
}

} // namespace omprip::csv
