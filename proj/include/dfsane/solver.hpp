#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>

#include "dfsane/accel.hpp"
#include "dfsane/core.hpp"
#include "dfsane/format.hpp"
#include "dfsane/linesearch.hpp"
#include "dfsane/steps.hpp"

namespace dfsane {

struct IterationEvent {
    std::int64_t k;
    const Vector& x;
    const Vector& F;
    double f;
};

struct LineSearchEvent {
    std::int64_t k;
    const LineSearchOutcome& outcome;
    double f_k;
    double fbar;
    double eta;
    double sigma;
    double gamma;
    std::int64_t fcnt_before;
    std::int64_t fcnt_after;
};

struct AccelEvent {
    std::int64_t k;
    const AccelStep& step;
    double f_trial;
    double f_accel;
    bool took_accel;
    std::int64_t fcnt_before;
    std::int64_t fcnt_after;
};

/// Optional instrumentation hooks; any member may be left empty.
struct SolveObserver {
    std::function<void(const IterationEvent&)> on_iteration;
    std::function<void(const LineSearchEvent&)> on_linesearch;
    std::function<void(const AccelEvent&)> on_accel;
};

struct SolveOptions {
    /// Destination of the iprint-controlled trace.
    std::ostream* log = &std::cout;
    const SolveObserver* observer = nullptr;
};

/// Accelerated DF-SANE (or plain DF-SANE when cfg.mode == Mode::plain).
///
/// Each iteration runs the nonmonotone double backtracking along the residual
/// direction. In accelerated mode the trial point is then extrapolated with
/// the secant window and the better of the two candidates (by ||F||, ties to
/// the trial point) becomes the next iterate. Stops with istop = 0 once
/// ||F(x)||_2 <= epsf.
inline SolveReport solve(const Problem& problem, const SolverConfig& cfg,
                         const std::optional<Vector>& x_start = std::nullopt,
                         const SolveOptions& opts = {})
{
    using clock = std::chrono::steady_clock;
    cfg.validate();
    const auto started = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - started).count(); };

    Vector x = x_start ? *x_start : problem.x0;
    if (x.size() != problem.n) {
        throw std::invalid_argument("solve: start point has length " + std::to_string(x.size()) +
                                    ", problem has n = " + std::to_string(problem.n));
    }

    std::ostream* log = cfg.iprint >= 0 ? opts.log : nullptr;
    const SolveObserver* obs = opts.observer;
    const bool accelerated = cfg.mode == Mode::accelerated;

    CountedEvaluator ev(problem);
    SolveReport rep;
    rep.epsf = cfg.resolved_epsf(problem.n);

    auto finish = [&](Vector xf, Vector Ff, double ff, std::int64_t k, StopCode code) {
        rep.x = std::move(xf);
        rep.res = std::move(Ff);
        rep.normF = ff;
        rep.iter = k;
        rep.fcnt = ev.fcnt();
        rep.istop = code;
        rep.wall_seconds = elapsed();
        if (log) *log << describe(code) << '\n';
        return rep;
    };

    Evaluation cur;
    try {
        cur = ev.eval(x);
    } catch (const NumericalBreakdown&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return finish(x, Vector(problem.n, nan), std::numeric_limits<double>::infinity(), 0,
                      StopCode::breakdown);
    }
    Vector F = std::move(cur.F);
    double f = cur.f;

    const EtaSchedule schedule(std::sqrt(f));
    FWindow fwindow(static_cast<std::size_t>(cfg.memory));
    fwindow.push(f);
    SpectralState spectral;
    SecantWindow window(static_cast<std::size_t>(cfg.window_capacity()));

    ProbeCallback on_probe;
    if (log && cfg.iprint >= 1) {
        on_probe = [log](const LineSearchProbe& p) {
            *log << "    ls: dir = " << (p.direction < 0 ? '-' : '+')
                 << "  alpha = " << format_double(p.alpha) << "  f = " << format_double(p.f)
                 << (p.accepted ? "  accepted" : "") << '\n';
        };
    }

    for (std::int64_t k = 0;; ++k) {
        if (log) *log << "Iter:  " << k << "  f =  " << format_double(f) << '\n';
        if (obs && obs->on_iteration) obs->on_iteration({k, x, F, f});

        if (!std::isfinite(f)) return finish(x, F, f, k, StopCode::breakdown);
        if (std::sqrt(f) <= rep.epsf) return finish(x, F, f, k, StopCode::converged);
        if (cfg.maxit && k >= *cfg.maxit) return finish(x, F, f, k, StopCode::iteration_limit);
        if (cfg.time_budget_seconds && elapsed() > *cfg.time_budget_seconds) {
            return finish(x, F, f, k, StopCode::time_limit);
        }
        if (cfg.max_fevals && ev.fcnt() >= *cfg.max_fevals) {
            return finish(x, F, f, k, StopCode::iteration_limit);
        }

        const double sigma = sigma_k(spectral, x, F, cfg);
        const double fbar = barfk(fwindow);
        const double eta_k = schedule(k);

        const std::int64_t before_ls = ev.fcnt();
        LineSearchOutcome ls;
        try {
            ls = double_backtracking(ev, x, F, f, sigma, fbar, eta_k, cfg, on_probe);
        } catch (const NumericalBreakdown&) {
            return finish(x, F, f, k, StopCode::breakdown);
        }
        if (obs && obs->on_linesearch) {
            obs->on_linesearch({k, ls, f, fbar, eta_k, sigma, cfg.gamma, before_ls, ev.fcnt()});
        }

        Vector x_next = std::move(ls.x_trial);
        Vector F_next = std::move(ls.F_trial);
        double f_next = ls.f_trial;

        if (accelerated) {
            const Vector s_k = x_next - x;
            const Vector y_k = F_next - F;
            const AccelStep step = accel_point(window, s_k, y_k, x_next, F_next, cfg.tol_rank);
            const std::int64_t before_acc = ev.fcnt();
            Evaluation ea;
            try {
                ea = ev.eval(step.x);
            } catch (const NumericalBreakdown&) {
                if (f_next < f) return finish(x_next, F_next, f_next, k + 1, StopCode::breakdown);
                return finish(x, F, f, k, StopCode::breakdown);
            }
            const bool take = ea.f < f_next;
            if (obs && obs->on_accel) {
                obs->on_accel({k, step, f_next, ea.f, take, before_acc, ev.fcnt()});
            }
            if (log && cfg.iprint >= 2) {
                *log << "    accel: m = " << step.columns << "  rank = " << step.rank
                     << "  |nu| = " << format_double(step.nu_norm)
                     << "  f_trial = " << format_double(f_next)
                     << "  f_accel = " << format_double(ea.f)
                     << "  chosen = " << (take ? "accel" : "trial") << '\n';
            }
            if (take) {
                x_next = step.x;
                F_next = std::move(ea.F);
                f_next = ea.f;
            }
            window.push_pair(x_next - x, F_next - F);
        }

        spectral.advance(x, F);
        x = std::move(x_next);
        F = std::move(F_next);
        f = f_next;
        fwindow.push(f);
    }
}

inline SolveReport solve_plain(const Problem& problem, SolverConfig cfg,
                               const std::optional<Vector>& x_start = std::nullopt,
                               const SolveOptions& opts = {})
{
    cfg.mode = Mode::plain;
    return solve(problem, cfg, x_start, opts);
}

}  // namespace dfsane
