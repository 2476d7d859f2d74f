#pragma once

// Small dense kernels: row-major matrices, Householder least squares and a
// cyclic Jacobi eigensolver for symmetric matrices. Sized for orders up to a
// few hundred; nothing here is blocked or vectorised.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "omprip/error.hpp"

namespace omprip {

template <std::floating_point T>
using basic_vector = std::vector<T>;

using Vector = basic_vector<double>;

namespace detail {

template <std::floating_point T>
void require_finite(std::span<const T> values, const char* what)
{
    for (T v : values) {
        if (!std::isfinite(v)) {
            throw error(errc::non_finite, std::string(what) + " contains a non-finite entry");
        }
    }
}

} // namespace detail

/// Dense real matrix stored row-major. Entries are checked for finiteness
/// when the matrix is built from data.
template <std::floating_point T>
class basic_matrix {
public:
    using value_type = T;

    basic_matrix() = default;

    basic_matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T{0}) {}

    basic_matrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries))
    {
        if (data_.size() != rows_ * cols_) {
            throw error(errc::dimension_mismatch,
                        "matrix entries length " + std::to_string(data_.size()) + " != " +
                            std::to_string(rows_) + "x" + std::to_string(cols_));
        }
        detail::require_finite<T>(data_, "matrix");
    }

    basic_matrix(std::initializer_list<std::initializer_list<T>> rows)
    {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) {
                throw error(errc::dimension_mismatch, "ragged matrix literal");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
        detail::require_finite<T>(data_, "matrix");
    }

    static basic_matrix identity(std::size_t n)
    {
        basic_matrix id(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            id(i, i) = T{1};
        }
        return id;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<const T> entries() const noexcept { return data_; }
    [[nodiscard]] std::span<const T> row(std::size_t i) const noexcept
    {
        return std::span<const T>(data_).subspan(i * cols_, cols_);
    }

    [[nodiscard]] basic_vector<T> column(std::size_t j) const
    {
        basic_vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            c[i] = (*this)(i, j);
        }
        return c;
    }

    [[nodiscard]] basic_matrix transposed() const
    {
        basic_matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    friend bool operator==(const basic_matrix&, const basic_matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using DenseMatrix = basic_matrix<double>;

// ---------------------------------------------------------------------------
// Vector helpers

template <std::floating_point T>
T dot(std::span<const T> a, std::span<const T> b)
{
    if (a.size() != b.size()) {
        throw error(errc::dimension_mismatch, "dot of vectors with different lengths");
    }
    T sum{0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

inline double dot(const Vector& a, const Vector& b) { return dot<double>(a, b); }

template <std::floating_point T>
T norm2(std::span<const T> v)
{
    // scaled accumulation avoids overflow for large entries
    T scale{0};
    T ssq{1};
    for (T x : v) {
        if (x != T{0}) {
            const T ax = std::abs(x);
            if (scale < ax) {
                ssq = T{1} + ssq * (scale / ax) * (scale / ax);
                scale = ax;
            } else {
                ssq += (ax / scale) * (ax / scale);
            }
        }
    }
    return scale * std::sqrt(ssq);
}

inline double norm2(const Vector& v) { return norm2<double>(v); }

template <std::floating_point T>
T norm_inf(std::span<const T> v)
{
    T m{0};
    for (T x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

inline double norm_inf(const Vector& v) { return norm_inf<double>(v); }

template <std::floating_point T>
T frobenius_norm(const basic_matrix<T>& a)
{
    return norm2<T>(a.entries());
}

/// y = A x
template <std::floating_point T>
basic_vector<T> multiply(const basic_matrix<T>& a, std::span<const T> x)
{
    if (x.size() != a.cols()) {
        throw error(errc::dimension_mismatch, "multiply: vector length " + std::to_string(x.size()) +
                                                  " != matrix cols " + std::to_string(a.cols()));
    }
    basic_vector<T> y(a.rows(), T{0});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        T sum{0};
        for (std::size_t j = 0; j < a.cols(); ++j) {
            sum += r[j] * x[j];
        }
        y[i] = sum;
    }
    return y;
}

inline Vector multiply(const DenseMatrix& a, const Vector& x) { return multiply<double>(a, x); }

/// y = Aᵀ r, i.e. y_i = ⟨r, A e_i⟩
template <std::floating_point T>
basic_vector<T> transpose_multiply(const basic_matrix<T>& a, std::span<const T> r)
{
    if (r.size() != a.rows()) {
        throw error(errc::dimension_mismatch, "transpose_multiply: vector length " +
                                                  std::to_string(r.size()) + " != matrix rows " +
                                                  std::to_string(a.rows()));
    }
    basic_vector<T> y(a.cols(), T{0});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto row = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            y[j] += row[j] * r[i];
        }
    }
    return y;
}

inline Vector transpose_multiply(const DenseMatrix& a, const Vector& r)
{
    return transpose_multiply<double>(a, r);
}

template <std::floating_point T>
basic_matrix<T> multiply(const basic_matrix<T>& a, const basic_matrix<T>& b)
{
    if (a.cols() != b.rows()) {
        throw error(errc::dimension_mismatch, "matrix product with incompatible shapes");
    }
    basic_matrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

/// Submatrix made of the listed columns, in the order given.
template <std::floating_point T>
basic_matrix<T> select_columns(const basic_matrix<T>& a, std::span<const std::size_t> columns)
{
    basic_matrix<T> sub(a.rows(), columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] >= a.cols()) {
            throw error(errc::invalid_support, "column index " + std::to_string(columns[c]) +
                                                   " out of range for " + std::to_string(a.cols()) +
                                                   " columns");
        }
        for (std::size_t i = 0; i < a.rows(); ++i) {
            sub(i, c) = a(i, columns[c]);
        }
    }
    return sub;
}

/// AᵀA. Each unordered pair is computed once and mirrored, so the result is
/// exactly symmetric.
template <std::floating_point T>
basic_matrix<T> gram(const basic_matrix<T>& a)
{
    const std::size_t n = a.cols();
    basic_matrix<T> g(n, n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p; q < n; ++q) {
            T sum{0};
            for (std::size_t i = 0; i < a.rows(); ++i) {
                sum += a(i, p) * a(i, q);
            }
            g(p, q) = sum;
            g(q, p) = sum;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Least squares

inline constexpr double default_rank_tolerance = 1e-12;

template <std::floating_point T>
struct basic_least_squares_result {
    basic_vector<T> coefficients;
    basic_vector<T> residual;
};

using LeastSquaresResult = basic_least_squares_result<double>;

/// Householder QR least-squares solver for a tall, full-column-rank system.
///
/// The factor R is checked column by column: a diagonal entry whose magnitude
/// is at most `rank_tol` times the largest one means the columns are
/// numerically dependent and the solve is refused with errc::rank_deficient.
template <std::floating_point T>
class householder_least_squares {
public:
    explicit householder_least_squares(T rank_tol = T(default_rank_tolerance)) : rank_tol_(rank_tol) {}

    [[nodiscard]] T rank_tolerance() const noexcept { return rank_tol_; }

    basic_least_squares_result<T> solve(const basic_matrix<T>& a, std::span<const T> b) const
    {
        const std::size_t m = a.rows();
        const std::size_t k = a.cols();
        if (k == 0 || m < k) {
            throw error(errc::dimension_mismatch, "least squares needs m >= k >= 1, got " +
                                                      std::to_string(m) + "x" + std::to_string(k));
        }
        if (b.size() != m) {
            throw error(errc::dimension_mismatch, "least squares rhs length " + std::to_string(b.size()) +
                                                      " != rows " + std::to_string(m));
        }

        basic_matrix<T> r = a;
        basic_vector<T> qtb(b.begin(), b.end());
        basic_vector<T> v(m);

        for (std::size_t j = 0; j < k; ++j) {
            T scale{0};
            for (std::size_t i = j; i < m; ++i) {
                scale = std::max(scale, std::abs(r(i, j)));
            }
            if (scale == T{0}) {
                continue; // zero column below the diagonal; caught by the rank check
            }
            T sigma{0};
            for (std::size_t i = j; i < m; ++i) {
                v[i] = r(i, j) / scale;
                sigma += v[i] * v[i];
            }
            const T alpha = (v[j] >= T{0} ? -T{1} : T{1}) * std::sqrt(sigma);
            v[j] -= alpha;
            T vnorm2{0};
            for (std::size_t i = j; i < m; ++i) {
                vnorm2 += v[i] * v[i];
            }
            if (vnorm2 == T{0}) {
                continue;
            }
            for (std::size_t c = j; c < k; ++c) {
                T proj{0};
                for (std::size_t i = j; i < m; ++i) {
                    proj += v[i] * r(i, c);
                }
                proj = T{2} * proj / vnorm2;
                for (std::size_t i = j; i < m; ++i) {
                    r(i, c) -= proj * v[i];
                }
            }
            T proj{0};
            for (std::size_t i = j; i < m; ++i) {
                proj += v[i] * qtb[i];
            }
            proj = T{2} * proj / vnorm2;
            for (std::size_t i = j; i < m; ++i) {
                qtb[i] -= proj * v[i];
            }
            r(j, j) = alpha * scale;
            for (std::size_t i = j + 1; i < m; ++i) {
                r(i, j) = T{0};
            }
        }

        T largest{0};
        for (std::size_t j = 0; j < k; ++j) {
            largest = std::max(largest, std::abs(r(j, j)));
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (!(std::abs(r(j, j)) > rank_tol_ * largest)) {
                throw error(errc::rank_deficient,
                            "column " + std::to_string(j) + " of the " + std::to_string(m) + "x" +
                                std::to_string(k) + " system is numerically dependent (|R_jj| = " +
                                std::to_string(std::abs(r(j, j))) + ", max = " + std::to_string(largest) + ")");
            }
        }

        basic_vector<T> coef(k);
        for (std::size_t jj = k; jj-- > 0;) {
            T sum = qtb[jj];
            for (std::size_t c = jj + 1; c < k; ++c) {
                sum -= r(jj, c) * coef[c];
            }
            coef[jj] = sum / r(jj, jj);
        }

        basic_vector<T> residual(b.begin(), b.end());
        const auto fitted = multiply<T>(a, coef);
        for (std::size_t i = 0; i < m; ++i) {
            residual[i] -= fitted[i];
        }
        return {std::move(coef), std::move(residual)};
    }

private:
    T rank_tol_;
};

inline LeastSquaresResult least_squares(const DenseMatrix& a, std::span<const double> b,
                                        double rank_tol = default_rank_tolerance)
{
    return householder_least_squares<double>(rank_tol).solve(a, b);
}

// ---------------------------------------------------------------------------
// Symmetric eigenvalues

template <std::floating_point T>
struct basic_spectrum {
    basic_vector<T> eigenvalues; // ascending
    std::size_t iterations_used = 0;

    [[nodiscard]] T min() const { return eigenvalues.front(); }
    [[nodiscard]] T max() const { return eigenvalues.back(); }
};

using Spectrum = basic_spectrum<double>;

struct JacobiOptions {
    double symmetry_tol = 1e-12;   // relative to the largest |G_ij|
    double off_diagonal_tol = 1e-14; // relative to ‖G‖_F
    std::size_t max_sweeps = 100;
};

template <std::floating_point T>
void require_symmetric(const basic_matrix<T>& g, T rel_tol)
{
    if (!g.square()) {
        throw error(errc::not_symmetric, "matrix is " + std::to_string(g.rows()) + "x" +
                                             std::to_string(g.cols()) + ", not square");
    }
    const T scale = std::max(T{1}, norm_inf<T>(g.entries()));
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = i + 1; j < g.cols(); ++j) {
            if (std::abs(g(i, j) - g(j, i)) > rel_tol * scale) {
                throw error(errc::not_symmetric, "entries (" + std::to_string(i) + "," + std::to_string(j) +
                                                     ") and its mirror differ");
            }
        }
    }
}

/// Cyclic Jacobi. `iterations_used` counts full sweeps; zero means the input
/// was already diagonal to tolerance.
template <std::floating_point T>
basic_spectrum<T> symmetric_eigenvalues(const basic_matrix<T>& g, const JacobiOptions& opts = {})
{
    if (g.rows() == 0) {
        throw error(errc::invalid_argument, "eigenvalues of an empty matrix");
    }
    require_symmetric<T>(g, T(opts.symmetry_tol));

    const std::size_t n = g.rows();
    basic_matrix<T> a = g;
    // symmetrise exactly so the rotations only have to track one triangle's worth of error
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const T mean = (a(i, j) + a(j, i)) / T{2};
            a(i, j) = mean;
            a(j, i) = mean;
        }
    }

    const T target = T(opts.off_diagonal_tol) * frobenius_norm(a);
    auto off_norm = [&] {
        T scale{0};
        T ssq{1};
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || a(i, j) == T{0}) {
                    continue;
                }
                const T ax = std::abs(a(i, j));
                if (scale < ax) {
                    ssq = T{1} + ssq * (scale / ax) * (scale / ax);
                    scale = ax;
                } else {
                    ssq += (ax / scale) * (ax / scale);
                }
            }
        }
        return scale * std::sqrt(ssq);
    };

    std::size_t sweeps = 0;
    while (off_norm() > target) {
        if (sweeps == opts.max_sweeps) {
            throw error(errc::no_convergence, "Jacobi did not converge in " + std::to_string(opts.max_sweeps) +
                                                  " sweeps");
        }
        ++sweeps;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const T apq = a(p, q);
                if (apq == T{0}) {
                    continue;
                }
                const T theta = (a(q, q) - a(p, p)) / (T{2} * apq);
                T t = T{1} / (std::abs(theta) + std::sqrt(theta * theta + T{1}));
                if (theta < T{0}) {
                    t = -t;
                }
                if (!std::isfinite(theta)) {
                    t = apq / (a(q, q) - a(p, p)); // |theta| overflowed: t ≈ 1/(2θ)
                }
                const T c = T{1} / std::sqrt(t * t + T{1});
                const T s = t * c;
                const T tau = s / (T{1} + c);

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = T{0};
                a(q, p) = T{0};
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) {
                        continue;
                    }
                    const T arp = a(r, p);
                    const T arq = a(r, q);
                    const T new_rp = arp - s * (arq + arp * tau);
                    const T new_rq = arq + s * (arp - arq * tau);
                    a(r, p) = new_rp;
                    a(p, r) = new_rp;
                    a(r, q) = new_rq;
                    a(q, r) = new_rq;
                }
            }
        }
    }

    basic_spectrum<T> out;
    out.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.eigenvalues[i] = a(i, i);
    }
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    out.iterations_used = sweeps;
    return out;
}

} // namespace omprip
