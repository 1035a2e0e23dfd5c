#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "dfsane/linalg.hpp"

namespace dfsane {

/// Raised when the iteration cannot continue: the residual evaluator failed,
/// or the line search step sizes underflowed. The solver maps it to
/// StopCode::breakdown.
class NumericalBreakdown : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Residual = std::function<Vector(const Vector&)>;

/// A square nonlinear system F(x) = 0 with a default starting point.
struct Problem {
    std::string name;
    std::size_t n = 0;
    Residual residual;
    Vector x0;
    /// Known root, when one is available in closed form.
    std::optional<Vector> reference_root;
    std::string description;

    Problem() = default;
    Problem(std::string name_, std::size_t n_, Residual residual_, Vector x0_,
            std::optional<Vector> root = std::nullopt, std::string description_ = {})
        : name(std::move(name_)),
          n(n_),
          residual(std::move(residual_)),
          x0(std::move(x0_)),
          reference_root(std::move(root)),
          description(std::move(description_))
    {
        if (n == 0) throw std::invalid_argument("Problem '" + name + "': n must be positive");
        if (x0.size() != n) {
            throw std::invalid_argument("Problem '" + name + "': x0 has length " +
                                        std::to_string(x0.size()) + ", expected " +
                                        std::to_string(n));
        }
        if (!residual) throw std::invalid_argument("Problem '" + name + "': empty residual");
        if (reference_root && reference_root->size() != n) {
            throw std::invalid_argument("Problem '" + name + "': reference root has wrong length");
        }
    }
};

enum class Mode { accelerated, plain };

inline const char* to_string(Mode m) noexcept
{
    return m == Mode::accelerated ? "accelerated" : "plain";
}

inline std::optional<Mode> parse_mode(const std::string& s)
{
    if (s == "accelerated" || s == "accel") return Mode::accelerated;
    if (s == "plain") return Mode::plain;
    return std::nullopt;
}

enum class StopCode : int {
    converged = 0,
    iteration_limit = 1,
    time_limit = 2,
    breakdown = 3,
};

inline const char* describe(StopCode c) noexcept
{
    switch (c) {
    case StopCode::converged: return "success!";
    case StopCode::iteration_limit: return "maximum number of iterations reached";
    case StopCode::time_limit: return "time budget exceeded";
    case StopCode::breakdown: return "numerical breakdown";
    }
    return "unknown";
}

inline double machine_epsilon() noexcept { return std::numeric_limits<double>::epsilon(); }

/// Stopping tolerance used throughout the benchmarks: 1e-6 * sqrt(n).
inline double default_epsf(std::size_t n) { return 1.0e-6 * std::sqrt(static_cast<double>(n)); }

/// Algorithm parameters. Defaults follow the published experiments; call
/// validate() (the solver does) to reject inconsistent settings.
struct SolverConfig {
    double gamma = 1.0e-4;
    double sigma_min = std::sqrt(machine_epsilon());
    double sigma_max = 1.0 / std::sqrt(machine_epsilon());
    double tau_min = 0.1;
    double tau_max = 0.5;
    /// Nonmonotone memory M.
    int memory = 10;
    /// Secant window holds nhlim - 1 pairs.
    int nhlim = 6;
    /// Absent means default_epsf(n).
    std::optional<double> epsf;
    /// Absent means unbounded.
    std::optional<std::int64_t> maxit;
    std::optional<double> time_budget_seconds;
    /// Cap on residual evaluations; reaching it stops with StopCode::iteration_limit.
    std::optional<std::int64_t> max_fevals;
    Mode mode = Mode::accelerated;
    int iprint = -1;
    /// Relative rank tolerance for the secant least-squares solve.
    double tol_rank = std::sqrt(machine_epsilon());

    [[nodiscard]] int window_capacity() const noexcept { return nhlim - 1; }

    [[nodiscard]] double resolved_epsf(std::size_t n) const
    {
        return epsf ? *epsf : default_epsf(n);
    }

    void validate() const
    {
        auto fail = [](const std::string& what) {
            throw std::invalid_argument("SolverConfig: " + what);
        };
        if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0,1)");
        if (!(sigma_min > 0.0 && sigma_min < sigma_max)) fail("need 0 < sigma_min < sigma_max");
        if (!(tau_min > 0.0 && tau_min < tau_max && tau_max < 1.0)) {
            fail("need 0 < tau_min < tau_max < 1");
        }
        if (memory < 1) fail("memory M must be positive");
        if (nhlim < 2) fail("nhlim must be at least 2");
        if (epsf && !(*epsf > 0.0)) fail("epsf must be positive");
        if (maxit && *maxit < 0) fail("maxit must be nonnegative");
        if (time_budget_seconds && !(*time_budget_seconds > 0.0)) {
            fail("time budget must be positive");
        }
        if (max_fevals && *max_fevals < 1) fail("max_fevals must be positive");
        if (iprint < -1 || iprint > 2) fail("iprint must be one of -1, 0, 1, 2");
        if (!(tol_rank > 0.0 && tol_rank < 1.0)) fail("tol_rank must lie in (0,1)");
    }
};

struct Evaluation {
    Vector F;
    /// ||F||_2^2, or +inf when any component of F is not finite.
    double f = 0.0;
};

/// Wraps a problem's residual and counts every evaluation.
class CountedEvaluator {
public:
    explicit CountedEvaluator(const Problem& problem) : problem_(&problem) {}

    Evaluation eval(const Vector& x)
    {
        if (x.size() != problem_->n) {
            throw std::invalid_argument("eval: x has length " + std::to_string(x.size()) +
                                        ", problem '" + problem_->name + "' has n = " +
                                        std::to_string(problem_->n));
        }
        ++fcnt_;
        Vector F;
        try {
            F = problem_->residual(x);
        } catch (const std::exception& e) {
            throw NumericalBreakdown("residual evaluation failed: " + std::string(e.what()));
        }
        if (F.size() != problem_->n) {
            throw NumericalBreakdown("residual of '" + problem_->name + "' returned length " +
                                     std::to_string(F.size()));
        }
        double f = all_finite(F.span()) ? norm2_squared(F) : std::numeric_limits<double>::infinity();
        if (!std::isfinite(f)) f = std::numeric_limits<double>::infinity();
        return {std::move(F), f};
    }

    [[nodiscard]] std::int64_t fcnt() const noexcept { return fcnt_; }
    [[nodiscard]] const Problem& problem() const noexcept { return *problem_; }

private:
    const Problem* problem_;
    std::int64_t fcnt_ = 0;
};

inline Evaluation eval_counted(CountedEvaluator& ev, const Vector& x) { return ev.eval(x); }

struct SolveReport {
    Vector x;
    Vector res;
    /// f(x) = ||F(x)||_2^2 at the returned point.
    double normF = 0.0;
    std::int64_t iter = 0;
    std::int64_t fcnt = 0;
    StopCode istop = StopCode::converged;
    double wall_seconds = 0.0;
    /// Tolerance the run was judged against.
    double epsf = 0.0;
};

}  // namespace dfsane
