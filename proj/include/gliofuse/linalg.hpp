#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "gliofuse/error.hpp"

namespace gliofuse {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    [[nodiscard]] double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
    [[nodiscard]] std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::vector<double> col(std::size_t c) const
    {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            out[r] = (*this)(r, c);
        }
        return out;
    }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    [[nodiscard]] Matrix transposed() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                t(c, r) = (*this)(r, c);
            }
        }
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_) {
            throw Error(ErrorCode::DimMismatch, "matrix product shape mismatch");
        }
        Matrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    out(i, j) += aik * b(k, j);
                }
            }
        }
        return out;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct SymmetricEigen {
    std::vector<double> values; ///< descending
    Matrix vectors;             ///< column k pairs with values[k]
    int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
inline SymmetricEigen jacobi_eigen(Matrix a, int max_sweeps = 100)
{
    const std::size_t n = a.rows();
    if (n != a.cols()) {
        throw Error(ErrorCode::DimMismatch, "eigendecomposition needs a square matrix");
    }
    Matrix v = Matrix::identity(n);
    constexpr double eps = std::numeric_limits<double>::epsilon();

    // Cyclic sweeps until every off-diagonal entry is negligible next to its two diagonals,
    // which resolves small eigenvalues to full relative accuracy.
    bool rotated = true;
    int sweep = 0;
    for (; sweep < max_sweeps && rotated; ++sweep) {
        rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= eps * std::sqrt(std::fabs(a(p, p) * a(q, q))) || std::fabs(apq) < 1e-300) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                rotated = true;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    SymmetricEigen out;
    out.sweeps = sweep;
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values.push_back(a(order[k], order[k]));
        for (std::size_t r = 0; r < n; ++r) {
            out.vectors(r, k) = v(r, order[k]);
        }
    }
    return out;
}

} // namespace gliofuse
