#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dfsane {

/// Dense vector of doubles whose length is fixed at construction.
///
/// Arithmetic between vectors requires equal lengths and throws
/// std::invalid_argument otherwise.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n, double value = 0.0) : data_(n, value) {}
    Vector(std::initializer_list<double> values) : data_(values) {}
    explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    [[nodiscard]] double* data() noexcept { return data_.data(); }
    [[nodiscard]] const double* data() const noexcept { return data_.data(); }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    [[nodiscard]] std::span<const double> span() const noexcept { return data_; }
    [[nodiscard]] std::span<double> span() noexcept { return data_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return data_; }

    Vector& operator+=(const Vector& other)
    {
        require_same_size(other, "+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
        return *this;
    }

    Vector& operator-=(const Vector& other)
    {
        require_same_size(other, "-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
        return *this;
    }

    Vector& operator*=(double s) noexcept
    {
        for (auto& v : data_) v *= s;
        return *this;
    }

    bool operator==(const Vector&) const = default;

    void require_same_size(const Vector& other, const char* op) const
    {
        if (other.size() != size()) {
            throw std::invalid_argument(std::string("Vector ") + op + ": length mismatch (" +
                                        std::to_string(size()) + " vs " +
                                        std::to_string(other.size()) + ")");
        }
    }

private:
    std::vector<double> data_;
};

inline Vector operator+(Vector a, const Vector& b) { return a += b; }
inline Vector operator-(Vector a, const Vector& b) { return a -= b; }
inline Vector operator*(double s, Vector v) { return v *= s; }
inline Vector operator*(Vector v, double s) { return v *= s; }

inline double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

inline double dot(const Vector& a, const Vector& b) { return dot(a.span(), b.span()); }

/// Sum of squares in a single pass.
inline double norm2_squared(std::span<const double> v)
{
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return sum;
}

inline double norm2_squared(const Vector& v) { return norm2_squared(v.span()); }

/// Scaled so that tiny or huge components neither underflow nor overflow.
inline double norm2(std::span<const double> v)
{
    double scale = 0.0;
    for (double x : v) {
        if (std::isnan(x)) return x;
        scale = std::max(scale, std::abs(x));
    }
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double sum = 0.0;
    for (double x : v) {
        const double t = x / scale;
        sum += t * t;
    }
    return scale * std::sqrt(sum);
}
inline double norm2(const Vector& v) { return norm2(v.span()); }

/// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y)
{
    if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline bool all_finite(std::span<const double> v)
{
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

/// Column-major dense matrix. Columns are contiguous, which is the access
/// pattern of every orthogonalization routine in this library.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value)
    {
    }

    static Matrix from_columns(const std::vector<Vector>& columns)
    {
        if (columns.empty()) return {};
        Matrix m(columns.front().size(), columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j].size() != m.rows_) {
                throw std::invalid_argument("Matrix::from_columns: ragged columns");
            }
            std::copy(columns[j].begin(), columns[j].end(), m.col(j).begin());
        }
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

    [[nodiscard]] std::span<double> col(std::size_t j) noexcept
    {
        return {data_.data() + j * rows_, rows_};
    }
    [[nodiscard]] std::span<const double> col(std::size_t j) const noexcept
    {
        return {data_.data() + j * rows_, rows_};
    }

    void swap_cols(std::size_t a, std::size_t b) noexcept
    {
        if (a == b) return;
        auto ca = col(a);
        auto cb = col(b);
        std::swap_ranges(ca.begin(), ca.end(), cb.begin());
    }

    [[nodiscard]] Matrix transpose() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t j = 0; j < cols_; ++j)
            for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
        return t;
    }

    /// A * v
    [[nodiscard]] Vector apply(const Vector& v) const
    {
        if (v.size() != cols_) throw std::invalid_argument("Matrix::apply: length mismatch");
        Vector out(rows_);
        for (std::size_t j = 0; j < cols_; ++j) axpy(v[j], col(j), out.span());
        return out;
    }

    /// A^T * v
    [[nodiscard]] Vector apply_transpose(const Vector& v) const
    {
        if (v.size() != rows_) {
            throw std::invalid_argument("Matrix::apply_transpose: length mismatch");
        }
        Vector out(cols_);
        for (std::size_t j = 0; j < cols_; ++j) out[j] = dot(col(j), v.span());
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace dfsane
