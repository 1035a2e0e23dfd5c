#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "dfsane/core.hpp"

namespace dfsane {

/// The last M merit values f(x^k), ..., f(x^{k-M+1}).
class FWindow {
public:
    explicit FWindow(std::size_t capacity) : capacity_(capacity)
    {
        if (capacity_ == 0) throw std::invalid_argument("FWindow: capacity must be positive");
    }

    void push(double f)
    {
        if (values_.size() == capacity_) values_.pop_front();
        values_.push_back(f);
    }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] double newest() const { return values_.back(); }

    [[nodiscard]] double max() const
    {
        if (values_.empty()) throw std::logic_error("FWindow::max on empty window");
        return *std::max_element(values_.begin(), values_.end());
    }

private:
    std::size_t capacity_;
    std::deque<double> values_;
};

inline double barfk(const FWindow& w) { return w.max(); }

/// Nonmonotone acceptance test f_new <= fbar + eta - gamma * alpha^2 * f_k.
/// Non-finite f_new is always rejected.
inline bool armijo_ok(double f_new, double fbar, double eta_k, double gamma, double alpha,
                      double f_k) noexcept
{
    if (!std::isfinite(f_new)) return false;
    return f_new <= fbar + eta_k - gamma * alpha * alpha * f_k;
}

/// Safeguarded minimizer of the quadratic through f(x) and the probe, built
/// under the identity-Jacobian model. Always lands in [tau_min*alpha, tau_max*alpha].
inline double quad_new_alpha(double alpha, double f_k, double f_probe, double tau_min,
                             double tau_max) noexcept
{
    const double lo = tau_min * alpha;
    const double hi = tau_max * alpha;
    const double denom = f_probe + (2.0 * alpha - 1.0) * f_k;
    if (!std::isfinite(denom) || denom <= 0.0) return hi;
    const double raw = alpha * alpha * f_k / denom;
    if (!std::isfinite(raw)) return hi;
    return std::max(lo, std::min(raw, hi));
}

struct LineSearchOutcome {
    Vector d;
    double alpha = 1.0;
    Vector x_trial;
    Vector F_trial;
    double f_trial = 0.0;
    int evals = 0;
    /// -1 when d = -sigma*F was accepted, +1 for d = +sigma*F.
    int direction = -1;
};

struct LineSearchProbe {
    int direction;
    double alpha;
    double f;
    bool accepted;
};

using ProbeCallback = std::function<void(const LineSearchProbe&)>;

/// Double backtracking along -sigma*F and +sigma*F with independently
/// shrinking step sizes. Throws NumericalBreakdown when both step sizes drop
/// below machine epsilon.
inline LineSearchOutcome double_backtracking(CountedEvaluator& ev, const Vector& x,
                                             const Vector& F, double f_k, double sigma,
                                             double fbar, double eta_k, const SolverConfig& cfg,
                                             const ProbeCallback& on_probe = {})
{
    double alpha_plus = 1.0;
    double alpha_minus = 1.0;
    int evals = 0;

    auto probe = [&](int direction, double alpha) {
        Vector d = (direction < 0 ? -sigma : sigma) * F;
        Vector x_new = x;
        axpy(alpha, d.span(), x_new.span());
        Evaluation e = ev.eval(x_new);
        ++evals;
        const bool ok = armijo_ok(e.f, fbar, eta_k, cfg.gamma, alpha, f_k);
        if (on_probe) on_probe({direction, alpha, e.f, ok});
        return std::make_tuple(ok, std::move(d), std::move(x_new), std::move(e));
    };

    const double eps = machine_epsilon();
    for (;;) {
        auto [ok_m, d_m, x_m, e_m] = probe(-1, alpha_plus);
        if (ok_m) {
            return {std::move(d_m), alpha_plus, std::move(x_m), std::move(e_m.F), e_m.f, evals, -1};
        }
        auto [ok_p, d_p, x_p, e_p] = probe(+1, alpha_minus);
        if (ok_p) {
            return {std::move(d_p), alpha_minus, std::move(x_p), std::move(e_p.F), e_p.f, evals, +1};
        }
        alpha_plus = quad_new_alpha(alpha_plus, f_k, e_m.f, cfg.tau_min, cfg.tau_max);
        alpha_minus = quad_new_alpha(alpha_minus, f_k, e_p.f, cfg.tau_min, cfg.tau_max);
        if (alpha_plus < eps && alpha_minus < eps) {
            throw NumericalBreakdown("line search step size underflow");
        }
    }
}

}  // namespace dfsane
