#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "dfsane/core.hpp"

namespace dfsane {

/// Summable forcing sequence eta_k = 2^-k * min{ ||F(x0)||/2, sqrt(||F(x0)||) }.
class EtaSchedule {
public:
    explicit EtaSchedule(double norm_F0)
        : eta0_(std::min(0.5 * norm_F0, std::sqrt(norm_F0)))
    {
    }

    [[nodiscard]] double eta0() const noexcept { return eta0_; }

    // Clamped at the smallest subnormal so the term stays positive for very long runs.
    [[nodiscard]] double operator()(std::int64_t k) const noexcept
    {
        const int e = static_cast<int>(std::min<std::int64_t>(k, 1L << 20));
        return std::max(std::ldexp(eta0_, -e), std::numeric_limits<double>::denorm_min());
    }

private:
    double eta0_;
};

inline double eta(const EtaSchedule& sched, std::int64_t k) { return sched(k); }

/// Previous accepted iterate and its residual; empty before the first step.
struct SpectralState {
    std::optional<Vector> prev_x;
    std::optional<Vector> prev_F;

    void advance(const Vector& x, const Vector& F)
    {
        prev_x = x;
        prev_F = F;
    }
};

/// Safeguarded fallback max{sigma_min, min{rho/||F||, sigma_max}} with
/// rho = ||x|| (or 1 when x = 0).
inline double sigma_fallback(const Vector& x, const Vector& F, const SolverConfig& cfg)
{
    const double nx = norm2(x);
    const double rho = nx > 0.0 ? nx : 1.0;
    const double nF = norm2(F);
    double ratio = rho / nF;
    if (!std::isfinite(ratio)) ratio = cfg.sigma_max;
    return std::max(cfg.sigma_min, std::min(ratio, cfg.sigma_max));
}

/// Spectral step s's/s'y, accepted (sign included) when its magnitude lies in
/// [sigma_min, min{1, sigma_max}]; otherwise the fallback.
inline double sigma_k(const SpectralState& state, const Vector& x, const Vector& F,
                      const SolverConfig& cfg)
{
    if (state.prev_x && state.prev_F) {
        const Vector s = x - *state.prev_x;
        const Vector y = F - *state.prev_F;
        const double sty = dot(s, y);
        if (sty != 0.0) {
            const double spg = dot(s, s) / sty;
            const double mag = std::abs(spg);
            if (std::isfinite(spg) && mag >= cfg.sigma_min && mag <= std::min(1.0, cfg.sigma_max)) {
                return spg;
            }
        }
    }
    return sigma_fallback(x, F, cfg);
}

}  // namespace dfsane
