#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfsane/core.hpp"
#include "dfsane/linalg.hpp"

namespace dfsane {

class RegistryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace problems {

/// Exponential Function 2 (La Cruz and Raydan):
///   F_1 = e^{x_1} - 1,
///   F_i = (i/10) (e^{x_i} + x_{i-1} - 1),  i = 2..n,
/// started from x0 = (1/n^2, ..., 1/n^2). The root is x = 0.
///
/// A variant with e^{x_1} in every F_i also circulates. The e^{x_i} form is
/// the one whose starting merit value for n = 3 is 0.02060606.
inline Problem expfun2(std::size_t n)
{
    if (n < 2) throw std::invalid_argument("expfun2: n must be at least 2");
    auto residual = [n](const Vector& x) {
        Vector F(n);
        F[0] = std::exp(x[0]) - 1.0;
        for (std::size_t i = 1; i < n; ++i) {
            F[i] = static_cast<double>(i + 1) / 10.0 * (std::exp(x[i]) + x[i - 1] - 1.0);
        }
        return F;
    };
    const double start = 1.0 / static_cast<double>(n * n);
    return {"expfun2", n, residual, Vector(n, start), Vector(n, 0.0),
            "Exponential Function 2; root at the origin"};
}

/// Booth: x1 + 2 x2 - 7 = 0, 2 x1 + x2 - 5 = 0 from (0,0); root (1,3).
inline Problem booth()
{
    auto residual = [](const Vector& x) {
        return Vector{x[0] + 2.0 * x[1] - 7.0, 2.0 * x[0] + x[1] - 5.0};
    };
    return {"booth", 2, residual, Vector{0.0, 0.0}, Vector{1.0, 3.0},
            "Booth linear system; root (1,3)"};
}

/// F(x) = A x - b for a dense row-major A.
inline Problem linear_system(std::string name, std::vector<std::vector<double>> A, Vector b,
                             Vector x0, std::optional<Vector> root = std::nullopt)
{
    const std::size_t n = b.size();
    if (A.size() != n) throw std::invalid_argument("linear_system: A must have n rows");
    for (const auto& row : A) {
        if (row.size() != n) throw std::invalid_argument("linear_system: A must be square");
    }
    auto shared = std::make_shared<const std::vector<std::vector<double>>>(std::move(A));
    auto residual = [shared, b, n](const Vector& x) {
        Vector F(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = -b[i];
            const auto& row = (*shared)[i];
            for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
            F[i] = acc;
        }
        return F;
    };
    return {std::move(name), n, residual, std::move(x0), std::move(root), "dense linear system"};
}

/// Nonsymmetric, strictly diagonally dominant tridiagonal system with root (1, ..., 1)
/// started from the origin.
inline Problem linear_tridiagonal(std::size_t n)
{
    if (n < 2) throw std::invalid_argument("linear: n must be at least 2");
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        A[i][i] = 4.0 + static_cast<double>(i) / static_cast<double>(n);
        if (i + 1 < n) A[i][i + 1] = 1.0;
        if (i > 0) A[i][i - 1] = -2.0;
    }
    Vector b(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (double a : A[i]) s += a;
        b[i] = s;
    }
    Problem p = linear_system("linear", std::move(A), std::move(b), Vector(n, 0.0), Vector(n, 1.0));
    p.description = "nonsymmetric diagonally dominant tridiagonal linear system; root (1,...,1)";
    return p;
}

/// Extended Rosenbrock in residual form, n even:
///   F_{2i-1} = 10 (x_{2i} - x_{2i-1}^2),  F_{2i} = 1 - x_{2i-1};
/// x0 = (-1.2, 1, -1.2, 1, ...), root (1, ..., 1).
inline Problem extended_rosenbrock(std::size_t n)
{
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("rosenbrock: n must be even and >= 2");
    auto residual = [n](const Vector& x) {
        Vector F(n);
        for (std::size_t i = 0; i < n; i += 2) {
            F[i] = 10.0 * (x[i + 1] - x[i] * x[i]);
            F[i + 1] = 1.0 - x[i];
        }
        return F;
    };
    Vector x0(n);
    for (std::size_t i = 0; i < n; i += 2) {
        x0[i] = -1.2;
        x0[i + 1] = 1.0;
    }
    return {"rosenbrock", n, residual, std::move(x0), Vector(n, 1.0),
            "extended Rosenbrock residual; root (1,...,1)"};
}

/// Broyden tridiagonal: F_i = (3 - 2 x_i) x_i - x_{i-1} - 2 x_{i+1} + 1 with
/// x_0 = x_{n+1} = 0, started from (-1, ..., -1). No closed-form root.
inline Problem broyden_tridiagonal(std::size_t n)
{
    if (n < 2) throw std::invalid_argument("broyden_tridiag: n must be at least 2");
    auto residual = [n](const Vector& x) {
        Vector F(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double left = i > 0 ? x[i - 1] : 0.0;
            const double right = i + 1 < n ? x[i + 1] : 0.0;
            F[i] = (3.0 - 2.0 * x[i]) * x[i] - left - 2.0 * right + 1.0;
        }
        return F;
    };
    return {"broyden_tridiag", n, residual, Vector(n, -1.0), std::nullopt,
            "Broyden tridiagonal system"};
}

/// Discrete two-point boundary value problem u'' = (u + t + 1)^3 / 2,
/// u(0) = u(1) = 0, on a uniform grid with h = 1/(n+1):
///   F_i = 2 x_i - x_{i-1} - x_{i+1} + h^2 (x_i + t_i + 1)^3 / 2,
/// started from x_i = t_i (t_i - 1). No closed-form root.
inline Problem discrete_bvp(std::size_t n)
{
    if (n < 1) throw std::invalid_argument("bvp: n must be positive");
    const double h = 1.0 / static_cast<double>(n + 1);
    auto residual = [n, h](const Vector& x) {
        Vector F(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i + 1) * h;
            const double left = i > 0 ? x[i - 1] : 0.0;
            const double right = i + 1 < n ? x[i + 1] : 0.0;
            const double u = x[i] + t + 1.0;
            F[i] = 2.0 * x[i] - left - right + h * h * u * u * u / 2.0;
        }
        return F;
    };
    Vector x0(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1) * h;
        x0[i] = t * (t - 1.0);
    }
    return {"bvp", n, residual, std::move(x0), std::nullopt,
            "discrete boundary value problem"};
}

/// F_i = x_i^2 + x_i x_{i+1} - c_i (x_{n+1} = 0), c_i = i/n, started at the
/// origin where the Jacobian vanishes entirely. A root is obtained by back
/// substitution from x_n = sqrt(c_n).
inline Problem singular_start(std::size_t n)
{
    if (n < 1) throw std::invalid_argument("singular_start: n must be positive");
    auto c = [n](std::size_t i) { return static_cast<double>(i + 1) / static_cast<double>(n); };
    auto residual = [n, c](const Vector& x) {
        Vector F(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double right = i + 1 < n ? x[i + 1] : 0.0;
            F[i] = x[i] * x[i] + x[i] * right - c(i);
        }
        return F;
    };
    // x_i^2 + x_{i+1} x_i - c_i = 0, positive branch.
    Vector root(n);
    for (std::size_t i = n; i-- > 0;) {
        const double b = i + 1 < n ? root[i + 1] : 0.0;
        root[i] = 0.5 * (-b + std::sqrt(b * b + 4.0 * c(i)));
    }
    return {"singular_start", n, residual, Vector(n, 0.0), std::move(root),
            "coupled quadratic system; Jacobian is zero at the start point"};
}

/// Trigonometric function (More, Garbow, Hillstrom):
///   F_i = n - sum_j cos x_j + i (1 - cos x_i) - sin x_i,  x0 = (1/n, ..., 1/n).
/// x = 0 is a root.
inline Problem trigonometric(std::size_t n)
{
    if (n < 1) throw std::invalid_argument("trigonometric: n must be positive");
    auto residual = [n](const Vector& x) {
        double sum_cos = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum_cos += std::cos(x[j]);
        Vector F(n);
        for (std::size_t i = 0; i < n; ++i) {
            F[i] = static_cast<double>(n) - sum_cos +
                   static_cast<double>(i + 1) * (1.0 - std::cos(x[i])) - std::sin(x[i]);
        }
        return F;
    };
    return {"trigonometric", n, residual, Vector(n, 1.0 / static_cast<double>(n)),
            Vector(n, 0.0), "trigonometric function; root at the origin"};
}

/// Powell singular function, n = 4, x0 = (3, -1, 0, 1). The Jacobian is
/// singular at the root x = 0.
inline Problem powell_singular()
{
    auto residual = [](const Vector& x) {
        const double s5 = std::sqrt(5.0);
        const double s10 = std::sqrt(10.0);
        const double a = x[1] - 2.0 * x[2];
        const double b = x[0] - x[3];
        return Vector{x[0] + 10.0 * x[1], s5 * (x[2] - x[3]), a * a, s10 * b * b};
    };
    return {"powell_singular", 4, residual, Vector{3.0, -1.0, 0.0, 1.0}, Vector(4, 0.0),
            "Powell singular function; singular Jacobian at the root"};
}

/// Brown almost-linear function:
///   F_i = x_i + sum_j x_j - (n+1),  i < n;   F_n = prod_j x_j - 1,
/// x0 = (1/2, ..., 1/2); root (1, ..., 1).
inline Problem brown_almost_linear(std::size_t n)
{
    if (n < 2) throw std::invalid_argument("brown_almost_linear: n must be at least 2");
    auto residual = [n](const Vector& x) {
        double sum = 0.0;
        double prod = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            sum += x[j];
            prod *= x[j];
        }
        Vector F(n);
        for (std::size_t i = 0; i + 1 < n; ++i) F[i] = x[i] + sum - static_cast<double>(n + 1);
        F[n - 1] = prod - 1.0;
        return F;
    };
    return {"brown_almost_linear", n, residual, Vector(n, 0.5), Vector(n, 1.0),
            "Brown almost-linear function; root (1,...,1)"};
}

}  // namespace problems

/// Parses the linear fixture format:
///   line 1: n
///   n lines: a_i1 ... a_in b_i
///   1 line : x0_1 ... x0_n
/// Tokens are whitespace-separated; line breaks are not significant.
inline Problem parse_linear_fixture(std::istream& in, std::string name)
{
    auto fail = [&](const std::string& what) {
        throw std::runtime_error("linear fixture '" + name + "': " + what);
    };
    long long n_raw = 0;
    if (!(in >> n_raw) || n_raw <= 0) fail("first token must be a positive dimension");
    const auto n = static_cast<std::size_t>(n_raw);

    auto read = [&](const char* what) {
        double v = 0.0;
        if (!(in >> v)) fail(std::string("expected a number while reading ") + what);
        return v;
    };
    std::vector<std::vector<double>> A(n, std::vector<double>(n));
    Vector b(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) A[i][j] = read("matrix row");
        b[i] = read("right-hand side");
    }
    Vector x0(n);
    for (std::size_t j = 0; j < n; ++j) x0[j] = read("x0");
    std::string extra;
    if (in >> extra) fail("unexpected trailing token '" + extra + "'");
    return problems::linear_system(std::move(name), std::move(A), std::move(b), std::move(x0));
}

inline Problem load_linear_fixture(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture file " + path.string());
    return parse_linear_fixture(in, path.stem().string());
}

/// All fixtures in a directory (regular files, sorted by name).
inline std::vector<Problem> load_fixture_dir(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error("fixture directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Problem> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(load_linear_fixture(f));
    return out;
}

/// Name -> constructor map standing in for an external problem collection:
/// lookup() plays the role of init/getn/getx0 and Problem::residual of evalr.
class ProblemRegistry {
public:
    struct Entry {
        std::string name;
        std::string summary;
        /// Absent for fixed-dimension problems.
        std::optional<std::size_t> default_n;
        std::function<Problem(std::size_t)> make;
        std::size_t fixed_n = 0;
    };

    void add(Entry e)
    {
        const std::string key = lower(e.name);
        if (entries_.count(key)) throw RegistryError("duplicate problem name '" + e.name + "'");
        entries_.emplace(key, std::move(e));
    }

    [[nodiscard]] Problem lookup(const std::string& name,
                                 std::optional<std::size_t> n = std::nullopt) const
    {
        auto it = entries_.find(lower(name));
        if (it == entries_.end()) throw RegistryError("unknown problem '" + name + "'");
        const Entry& e = it->second;
        if (!e.default_n) {
            if (n && *n != e.fixed_n) {
                throw RegistryError("problem '" + e.name + "' has fixed dimension " +
                                    std::to_string(e.fixed_n));
            }
            return e.make(e.fixed_n);
        }
        try {
            return e.make(n.value_or(*e.default_n));
        } catch (const std::invalid_argument& ex) {
            throw RegistryError(ex.what());
        }
    }

    [[nodiscard]] bool contains(const std::string& name) const
    {
        return entries_.count(lower(name)) != 0;
    }

    [[nodiscard]] std::vector<const Entry*> entries() const
    {
        std::vector<const Entry*> out;
        for (const auto& [_, e] : entries_) out.push_back(&e);
        return out;
    }

private:
    static std::string lower(std::string s)
    {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return s;
    }

    std::map<std::string, Entry> entries_;
};

inline const ProblemRegistry& builtin_registry()
{
    static const ProblemRegistry registry = [] {
        ProblemRegistry r;
        using problems::booth;
        r.add({"expfun2", "Exponential Function 2", 3, problems::expfun2});
        r.add({"booth", "Booth linear 2x2 system", std::nullopt,
               [](std::size_t) { return booth(); }, 2});
        r.add({"linear", "diagonally dominant tridiagonal linear system", 10,
               problems::linear_tridiagonal});
        r.add({"rosenbrock", "extended Rosenbrock residual (n even)", 10,
               problems::extended_rosenbrock});
        r.add({"broyden_tridiag", "Broyden tridiagonal", 100, problems::broyden_tridiagonal});
        r.add({"bvp", "discrete two-point boundary value problem", 50, problems::discrete_bvp});
        r.add({"singular_start", "quadratic system with zero Jacobian at x0", 10,
               problems::singular_start});
        r.add({"trigonometric", "trigonometric function", 10, problems::trigonometric});
        r.add({"powell_singular", "Powell singular function", std::nullopt,
               [](std::size_t) { return problems::powell_singular(); }, 4});
        r.add({"brown_almost_linear", "Brown almost-linear function", 10,
               problems::brown_almost_linear});
        return r;
    }();
    return registry;
}

/// Built-in benchmark suite: every registered problem at its default size,
/// with Exponential Function 2 also at n = 100 and n = 1000.
inline std::vector<Problem> suite_builtin()
{
    const auto& r = builtin_registry();
    return {
        r.lookup("expfun2", 3),
        r.lookup("expfun2", 100),
        r.lookup("expfun2", 1000),
        r.lookup("booth"),
        r.lookup("linear"),
        r.lookup("rosenbrock"),
        r.lookup("broyden_tridiag"),
        r.lookup("bvp"),
        r.lookup("singular_start"),
        r.lookup("trigonometric"),
        r.lookup("powell_singular"),
        r.lookup("brown_almost_linear"),
    };
}

}  // namespace dfsane
