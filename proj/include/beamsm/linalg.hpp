#pragma once

// Small dense complex vectors/matrices and the rank-1 inverse update shared by
// every RLS recursion in the library. Row-major, no sparsity, sized for
// arrays of at most a few dozen elements.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "beamsm/errors.hpp"

namespace beamsm {

// Numerical guards used across the recursions.
namespace tol {
inline constexpr double singular = 1e-12;
inline constexpr double hermitian = 1e-12;
inline constexpr double constraint = 1e-8;
} // namespace tol

template <std::floating_point T>
class BasicVector {
public:
    using value_type = std::complex<T>;

    BasicVector() = default;
    explicit BasicVector(std::size_t n, value_type fill = {}) : data_(n, fill) {}
    BasicVector(std::initializer_list<value_type> init) : data_(init) {}
    explicit BasicVector(std::vector<value_type> data) : data_(std::move(data)) {}

    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    value_type& operator[](std::size_t i) noexcept { return data_[i]; }
    const value_type& operator[](std::size_t i) const noexcept { return data_[i]; }

    [[nodiscard]] std::span<value_type> span() noexcept { return data_; }
    [[nodiscard]] std::span<const value_type> span() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    BasicVector& operator*=(value_type c) noexcept {
        for (auto& v : data_) v *= c;
        return *this;
    }

    bool operator==(const BasicVector&) const = default;

private:
    std::vector<value_type> data_;
};

template <std::floating_point T>
class BasicMatrix {
public:
    using value_type = std::complex<T>;

    BasicMatrix() = default;
    BasicMatrix(std::size_t rows, std::size_t cols, value_type fill = {})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    // Row-major nested initializer: {{a, b}, {c, d}}.
    BasicMatrix(std::initializer_list<std::initializer_list<value_type>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) throw DimensionError("ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static BasicMatrix identity(std::size_t n, T scale = T{1}) {
        BasicMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
        return m;
    }

    static BasicMatrix diagonal(std::initializer_list<value_type> d) {
        BasicMatrix m(d.size(), d.size());
        std::size_t i = 0;
        for (auto v : d) { m(i, i) = v; ++i; }
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }

    value_type& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const value_type& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<value_type> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<const value_type> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }
    [[nodiscard]] std::span<const value_type> entries() const noexcept { return data_; }

    [[nodiscard]] BasicMatrix adjoint() const {
        BasicMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    [[nodiscard]] bool is_hermitian(T tolerance = T(tol::hermitian)) const {
        if (!square()) return false;
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = r; c < cols_; ++c)
                if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tolerance) return false;
        return true;
    }

    BasicMatrix& operator*=(value_type c) noexcept {
        for (auto& v : data_) v *= c;
        return *this;
    }

    bool operator==(const BasicMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<value_type> data_;
};

using cdouble = std::complex<double>;
using CVector = BasicVector<double>;
using CMatrix = BasicMatrix<double>;

namespace detail {
inline void require(bool ok, const char* what) {
    if (!ok) throw DimensionError(what);
}
} // namespace detail

// a^H b
template <std::floating_point T>
[[nodiscard]] std::complex<T> dot(const BasicVector<T>& a, const BasicVector<T>& b) {
    detail::require(a.size() == b.size(), "dot: length mismatch");
    std::complex<T> acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

template <std::floating_point T>
[[nodiscard]] T norm_sq(const BasicVector<T>& a) noexcept {
    T acc{};
    for (const auto& v : a) acc += std::norm(v);
    return acc;
}

template <std::floating_point T>
[[nodiscard]] BasicVector<T> operator*(const BasicMatrix<T>& m, const BasicVector<T>& x) {
    detail::require(m.cols() == x.size(), "matrix-vector: shape mismatch");
    BasicVector<T> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::complex<T> acc{};
        const auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * x[c];
        out[r] = acc;
    }
    return out;
}

// M^H x without forming the adjoint.
template <std::floating_point T>
[[nodiscard]] BasicVector<T> adjoint_times(const BasicMatrix<T>& m, const BasicVector<T>& x) {
    detail::require(m.rows() == x.size(), "adjoint-vector: shape mismatch");
    BasicVector<T> out(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto xr = x[r];
        const auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) out[c] += std::conj(row[c]) * xr;
    }
    return out;
}

template <std::floating_point T>
[[nodiscard]] BasicMatrix<T> operator*(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
    detail::require(a.cols() == b.rows(), "matrix-matrix: shape mismatch");
    BasicMatrix<T> out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const auto v = a(r, k);
            for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += v * b(k, c);
        }
    return out;
}

template <std::floating_point T>
[[nodiscard]] BasicVector<T> operator*(std::complex<T> c, BasicVector<T> x) {
    x *= c;
    return x;
}

template <std::floating_point T>
[[nodiscard]] BasicVector<T> operator+(BasicVector<T> a, const BasicVector<T>& b) {
    detail::require(a.size() == b.size(), "vector add: length mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

template <std::floating_point T>
[[nodiscard]] BasicVector<T> operator-(BasicVector<T> a, const BasicVector<T>& b) {
    detail::require(a.size() == b.size(), "vector subtract: length mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

template <std::floating_point T>
[[nodiscard]] BasicMatrix<T> operator+(BasicMatrix<T> a, const BasicMatrix<T>& b) {
    detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix add: shape mismatch");
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) a(r, c) += b(r, c);
    return a;
}

template <std::floating_point T>
[[nodiscard]] BasicMatrix<T> operator-(BasicMatrix<T> a, const BasicMatrix<T>& b) {
    detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix subtract: shape mismatch");
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) a(r, c) -= b(r, c);
    return a;
}

// u v^H
template <std::floating_point T>
[[nodiscard]] BasicMatrix<T> outer(const BasicVector<T>& u, const BasicVector<T>& v) {
    BasicMatrix<T> out(u.size(), v.size());
    for (std::size_t r = 0; r < u.size(); ++r)
        for (std::size_t c = 0; c < v.size(); ++c) out(r, c) = u[r] * std::conj(v[c]);
    return out;
}

// k = P x / (1 + lambda1 x^H P x)
template <std::floating_point T>
[[nodiscard]] BasicVector<T> gain_vector(const BasicMatrix<T>& p, const BasicVector<T>& x, T lambda1) {
    detail::require(p.square() && p.rows() == x.size(), "gain_vector: P must be square and match x");
    auto px = p * x;
    const auto denom = T{1} + lambda1 * dot(x, px);
    if (std::abs(denom) <= T(tol::singular)) throw SingularUpdateError("gain_vector: vanishing denominator");
    px *= T{1} / denom;
    return px;
}

// P' = P - lambda1 k x^H P
template <std::floating_point T>
[[nodiscard]] BasicMatrix<T> inverse_update(const BasicMatrix<T>& p, const BasicVector<T>& k, const BasicVector<T>& x,
                                            T lambda1) {
    detail::require(p.square() && p.rows() == x.size() && k.size() == x.size(),
                    "inverse_update: shape mismatch");
    BasicMatrix<T> out = p;
    if (lambda1 == T{0}) return out;
    // x^H P as a row: (P^H x)^H
    const auto xhp = adjoint_times(p, x);
    for (std::size_t r = 0; r < p.rows(); ++r) {
        const auto kr = lambda1 * k[r];
        auto row = out.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] -= kr * std::conj(xhp[c]);
    }
    return out;
}

// (M + M^H) / 2
template <std::floating_point T>
[[nodiscard]] BasicMatrix<T> hermitian_regularize(const BasicMatrix<T>& m) {
    detail::require(m.square(), "hermitian_regularize: matrix must be square");
    BasicMatrix<T> out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out(r, r) = std::complex<T>(m(r, r).real(), T{0});
        for (std::size_t c = r + 1; c < m.cols(); ++c) {
            const auto v = (m(r, c) + std::conj(m(c, r))) * T(0.5);
            out(r, c) = v;
            out(c, r) = std::conj(v);
        }
    }
    return out;
}

// Solves R z = b for Hermitian positive-definite R by Cholesky factorization.
// Not used inside the recursions; the MVDR oracle weight needs one solve per run.
template <std::floating_point T>
[[nodiscard]] BasicVector<T> cholesky_solve(const BasicMatrix<T>& r, const BasicVector<T>& b) {
    detail::require(r.square() && r.rows() == b.size(), "cholesky_solve: shape mismatch");
    const std::size_t n = r.rows();
    BasicMatrix<T> l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        T diag = r(j, j).real();
        for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l(j, k));
        if (!(diag > T(tol::singular))) throw SingularUpdateError("cholesky_solve: matrix is not positive definite");
        const T ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            auto s = r(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    BasicVector<T> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * z[k];
        z[i] = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        auto s = z[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= std::conj(l(k, i)) * z[k];
        z[i] = s / l(i, i);
    }
    return z;
}

// w^H M w for square M; real part only (M Hermitian in every caller).
template <std::floating_point T>
[[nodiscard]] T quadratic_form(const BasicMatrix<T>& m, const BasicVector<T>& w) {
    return dot(w, m * w).real();
}

} // namespace beamsm
