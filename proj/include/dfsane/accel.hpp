#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dfsane/core.hpp"
#include "dfsane/linalg.hpp"

namespace dfsane {

/// Sliding window of the last p (s, y) difference pairs, oldest first.
class SecantWindow {
public:
    explicit SecantWindow(std::size_t capacity) : capacity_(capacity)
    {
        if (capacity_ == 0) throw std::invalid_argument("SecantWindow: capacity must be >= 1");
    }

    void push_pair(Vector s, Vector y)
    {
        if (s.size() != y.size()) throw std::invalid_argument("push_pair: s and y differ in length");
        if (!s_.empty() && s.size() != s_.front().size()) {
            throw std::invalid_argument("push_pair: pair length differs from window contents");
        }
        if (s_.size() == capacity_) {
            s_.pop_front();
            y_.pop_front();
        }
        s_.push_back(std::move(s));
        y_.push_back(std::move(y));
    }

    [[nodiscard]] std::size_t size() const noexcept { return s_.size(); }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] bool empty() const noexcept { return s_.empty(); }
    [[nodiscard]] const Vector& s(std::size_t j) const { return s_.at(j); }
    [[nodiscard]] const Vector& y(std::size_t j) const { return y_.at(j); }

    void clear() noexcept
    {
        s_.clear();
        y_.clear();
    }

private:
    std::size_t capacity_;
    std::deque<Vector> s_;
    std::deque<Vector> y_;
};

/// Column-pivoted Gram-Schmidt factorization Y P = Q R, truncated at the
/// numerical rank.
///
/// Q is n x rank with orthonormal columns. R is rank x m upper trapezoidal
/// with columns in pivot order: column i of R belongs to column perm[i] of Y.
/// A column is kept while its orthogonalized residual norm exceeds
/// tol_rank * max_j ||Y e_j||. Each column is orthogonalized twice
/// (classical Gram-Schmidt with one reorthogonalization pass) so Q stays
/// orthonormal to working precision.
struct Orthogonalization {
    Matrix Q;
    Matrix R;
    std::vector<std::size_t> perm;
    std::size_t rank = 0;
    double max_column_norm = 0.0;
};

inline Orthogonalization orthogonalize(const Matrix& Y, double tol_rank)
{
    const std::size_t n = Y.rows();
    const std::size_t m = Y.cols();

    Orthogonalization out;
    out.perm.resize(m);
    std::iota(out.perm.begin(), out.perm.end(), std::size_t{0});

    for (std::size_t j = 0; j < m; ++j) {
        out.max_column_norm = std::max(out.max_column_norm, norm2(Y.col(j)));
    }
    if (m == 0 || !(out.max_column_norm > 0.0) || !std::isfinite(out.max_column_norm)) {
        out.Q = Matrix(n, 0);
        out.R = Matrix(0, m);
        return out;
    }
    const double threshold = tol_rank * out.max_column_norm;

    Matrix W = Y;
    Matrix Q(n, std::min(n, m));
    Matrix R(m, m);
    std::size_t rank = 0;

    for (std::size_t i = 0; i < m && i < n; ++i) {
        std::size_t best = i;
        double best_norm = -1.0;
        for (std::size_t j = i; j < m; ++j) {
            const double nj = norm2(W.col(j));
            if (nj > best_norm) {
                best_norm = nj;
                best = j;
            }
        }
        if (best != i) {
            W.swap_cols(i, best);
            R.swap_cols(i, best);
            std::swap(out.perm[i], out.perm[best]);
        }

        auto wi = W.col(i);
        for (std::size_t l = 0; l < i; ++l) {
            const double c = dot(Q.col(l), wi);
            axpy(-c, Q.col(l), wi);
            R(l, i) += c;
        }
        const double nrm = norm2(wi);
        if (!(nrm > threshold)) break;

        R(i, i) = nrm;
        auto qi = Q.col(i);
        for (std::size_t r = 0; r < n; ++r) qi[r] = wi[r] / nrm;

        for (std::size_t j = i + 1; j < m; ++j) {
            auto wj = W.col(j);
            const double c = dot(qi, wj);
            R(i, j) = c;
            axpy(-c, qi, wj);
        }
        rank = i + 1;
    }

    out.rank = rank;
    out.Q = Matrix(n, rank);
    for (std::size_t l = 0; l < rank; ++l) {
        std::copy(Q.col(l).begin(), Q.col(l).end(), out.Q.col(l).begin());
    }
    out.R = Matrix(rank, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = 0; l < rank; ++l) out.R(l, j) = R(l, j);
    return out;
}

struct LeastSquaresSolution {
    Vector nu;
    std::size_t rank = 0;
};

/// Minimum-norm least-squares solution of Y nu = b, i.e. nu = pinv(Y) b with
/// singular directions below tol_rank (relative) discarded.
///
/// Y P = Q [R11 R12] is followed by a second orthogonalization of
/// [R11 R12]^T, giving a complete orthogonal decomposition; the solution is
/// then confined to the row space of Y, which makes it minimal in norm.
inline LeastSquaresSolution min_norm_ls_detailed(const Matrix& Y, const Vector& b,
                                                 double tol_rank = std::sqrt(machine_epsilon()))
{
    if (Y.cols() == 0) throw std::invalid_argument("min_norm_ls: Y has no columns");
    if (b.size() != Y.rows()) throw std::invalid_argument("min_norm_ls: b has wrong length");

    const std::size_t m = Y.cols();
    LeastSquaresSolution sol{Vector(m), 0};

    const Orthogonalization first = orthogonalize(Y, tol_rank);
    const std::size_t r = first.rank;
    sol.rank = r;
    if (r == 0) return sol;

    // c = Q^T b
    const Vector c = first.Q.apply_transpose(b);

    // [R11 R12]^T P2 = Z T, so [R11 R12] = P2 T^T Z^T. Its rows are independent
    // by construction, so only exact breakdown is screened here.
    const Orthogonalization second =
        orthogonalize(first.R.transpose(), machine_epsilon() * static_cast<double>(m));
    const std::size_t r2 = second.rank;

    // Forward substitution T^T u = P2^T c.
    Vector u(r2);
    for (std::size_t i = 0; i < r2; ++i) {
        double acc = c[second.perm[i]];
        for (std::size_t l = 0; l < i; ++l) acc -= second.R(l, i) * u[l];
        u[i] = acc / second.R(i, i);
    }
    const Vector w = second.Q.apply(u);

    for (std::size_t i = 0; i < m; ++i) sol.nu[first.perm[i]] = w[i];
    return sol;
}

inline Vector min_norm_ls(const Matrix& Y, const Vector& b,
                          double tol_rank = std::sqrt(machine_epsilon()))
{
    return min_norm_ls_detailed(Y, b, tol_rank).nu;
}

struct AccelStep {
    Vector x;
    std::size_t columns = 0;
    std::size_t rank = 0;
    double nu_norm = 0.0;
};

/// Sequential-secant extrapolation x_trial - S nu, where nu is the
/// minimum-norm least-squares solution of Y nu = F(x_trial) and S, Y stack the
/// window pairs followed by the current trial pair (s_k, y_k). Evaluates no
/// residuals.
inline AccelStep accel_point(const SecantWindow& w, const Vector& s_k, const Vector& y_k,
                             const Vector& x_trial, const Vector& F_trial,
                             double tol_rank = std::sqrt(machine_epsilon()))
{
    const std::size_t n = x_trial.size();
    if (s_k.size() != n || y_k.size() != n || F_trial.size() != n) {
        throw std::invalid_argument("accel_point: length mismatch");
    }
    const std::size_t m = w.size() + 1;
    Matrix S(n, m);
    Matrix Y(n, m);
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (w.s(j).size() != n) throw std::invalid_argument("accel_point: window length mismatch");
        std::copy(w.s(j).begin(), w.s(j).end(), S.col(j).begin());
        std::copy(w.y(j).begin(), w.y(j).end(), Y.col(j).begin());
    }
    std::copy(s_k.begin(), s_k.end(), S.col(m - 1).begin());
    std::copy(y_k.begin(), y_k.end(), Y.col(m - 1).begin());

    LeastSquaresSolution ls = min_norm_ls_detailed(Y, F_trial, tol_rank);
    AccelStep step;
    step.x = x_trial - S.apply(ls.nu);
    step.columns = m;
    step.rank = ls.rank;
    step.nu_norm = norm2(ls.nu);
    return step;
}

}  // namespace dfsane
