#pragma once

// Test-only reference computations, kept independent of the library's own
// factorization code.

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dfsane/linalg.hpp"

namespace dfsane::oracle {

inline Eigen::MatrixXd to_eigen(const Matrix& m)
{
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = m(i, j);
    return out;
}

inline Eigen::VectorXd to_eigen(const Vector& v)
{
    Eigen::VectorXd out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
    return out;
}

inline Vector from_eigen(const Eigen::VectorXd& v)
{
    Vector out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
    return out;
}

/// pinv(Y) b through a dense SVD, discarding singular values below
/// rel_cut * sigma_max.
inline Vector pinv_solve(const Matrix& Y, const Vector& b, double rel_cut = 1e-10)
{
    const Eigen::MatrixXd A = to_eigen(Y);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    Eigen::VectorXd ub = svd.matrixU().transpose() * to_eigen(b);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(A.cols());
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) > rel_cut * smax && s(k) > 0.0) x += svd.matrixV().col(k) * (ub(k) / s(k));
    }
    return from_eigen(x);
}

/// Orthonormal basis of null(Y) from the SVD.
inline std::vector<Vector> null_space(const Matrix& Y, double rel_cut = 1e-10)
{
    const Eigen::MatrixXd A = to_eigen(Y);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    std::vector<Vector> out;
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
        const bool null_dir = k >= s.size() || !(s(k) > rel_cut * smax);
        if (null_dir) out.push_back(from_eigen(svd.matrixV().col(k)));
    }
    return out;
}

/// Random n x m matrix of rank min(rank, n, m), entries O(1).
inline Matrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t m, std::size_t rank)
{
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::MatrixXd A(n, rank), B(rank, m);
    for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = N(rng);
    for (Eigen::Index i = 0; i < B.size(); ++i) B.data()[i] = N(rng);
    const Eigen::MatrixXd P = A * B;
    Matrix out(n, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) out(i, j) = P(static_cast<Eigen::Index>(i),
                                                          static_cast<Eigen::Index>(j));
    return out;
}

/// Random matrix with condition number at most ~10 (diagonal shift of a
/// scaled Gaussian matrix), returned row-major.
inline std::vector<std::vector<double>> well_conditioned(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<std::vector<double>> A(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) A[i][j] = U(rng) / static_cast<double>(n);
        A[i][i] += 2.0;
    }
    return A;
}

}  // namespace dfsane::oracle
