// Solves a small user-defined system with both solver modes.

#include <cmath>
#include <iostream>

#include "dfsane/solver.hpp"

int main()
{
    using dfsane::Vector;

    // Intersection of the unit circle with the line x1 = x2.
    dfsane::Problem circle{
        "circle_line", 2,
        [](const Vector& x) { return Vector{x[0] * x[0] + x[1] * x[1] - 1.0, x[0] - x[1]}; },
        Vector{2.0, 0.5}};

    for (auto mode : {dfsane::Mode::accelerated, dfsane::Mode::plain}) {
        dfsane::SolverConfig cfg;
        cfg.mode = mode;
        cfg.epsf = 1e-10;
        const auto r = dfsane::solve(circle, cfg);
        std::cout << dfsane::to_string(mode) << ": istop=" << static_cast<int>(r.istop)
                  << " iter=" << r.iter << " fcnt=" << r.fcnt << " x=(" << r.x[0] << ", "
                  << r.x[1] << ")\n";
    }
}
