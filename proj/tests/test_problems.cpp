#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "dfsane/problems.hpp"
#include "dfsane/solver.hpp"

using namespace dfsane;
using Catch::Approx;

namespace {

double merit(const Problem& p, const Vector& x) { return norm2_squared(p.residual(x)); }

bool bitwise_equal(const Vector& a, const Vector& b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("Exponential Function 2 values", "[problems][expfun2]")
{
    const Problem p3 = problems::expfun2(3);
    REQUIRE(p3.n == 3);
    REQUIRE(p3.x0 == Vector(3, 1.0 / 9.0));
    REQUIRE(merit(p3, p3.x0) == Approx(0.020606060206103352).epsilon(1e-13));
    REQUIRE(merit(p3, Vector(3, 0.0)) == 0.0);

    // n = 2 at (0, 1): F = (0, 0.2 (e - 1)).
    const Problem p2 = problems::expfun2(2);
    const Vector F2 = p2.residual(Vector{0.0, 1.0});
    REQUIRE(F2[0] == 0.0);
    REQUIRE(F2[1] == Approx(0.3436564).margin(1e-7));
    REQUIRE(merit(p2, Vector{0.0, 1.0}) == Approx(0.04 * (std::numbers::e - 1) * (std::numbers::e - 1)).epsilon(1e-14));

    REQUIRE_THROWS_AS(problems::expfun2(1), std::invalid_argument);
}

TEST_CASE("Booth values", "[problems][booth]")
{
    const Problem p = problems::booth();
    REQUIRE(p.residual(Vector{1.0, 0.0}) == Vector{-6.0, -3.0});
    REQUIRE(merit(p, Vector{1.0, 0.0}) == 45.0);
    REQUIRE(merit(p, Vector{1.0, 3.0}) == 0.0);
    REQUIRE(p.x0 == Vector{0.0, 0.0});
}

TEST_CASE("registry lookup", "[problems][registry]")
{
    const auto& reg = builtin_registry();
    REQUIRE(reg.entries().size() >= 10);
    REQUIRE(reg.lookup("expfun2").n == 3);
    REQUIRE(reg.lookup("ExpFun2", 7).n == 7);
    REQUIRE(reg.lookup("BOOTH").n == 2);
    REQUIRE(reg.lookup("booth", 2).n == 2);
    REQUIRE(reg.contains("Powell_Singular"));
    REQUIRE_FALSE(reg.contains("nope"));
    REQUIRE_THROWS_AS(reg.lookup("nope"), RegistryError);
    REQUIRE_THROWS_AS(reg.lookup("booth", 3), RegistryError);
    REQUIRE_THROWS_AS(reg.lookup("rosenbrock", 3), RegistryError);
    REQUIRE_THROWS_AS(reg.lookup("expfun2", 1), RegistryError);
}

TEST_CASE("builtin suite shape", "[problems][suite]")
{
    const auto suite = suite_builtin();
    REQUIRE(suite.size() >= 10);
    for (const auto& p : suite) {
        CAPTURE(p.name, p.n);
        REQUIRE(p.x0.size() == p.n);
        const Vector F = p.residual(p.x0);
        REQUIRE(F.size() == p.n);
        REQUIRE(all_finite(F));
        REQUIRE(bitwise_equal(F, p.residual(p.x0)));
        if (p.reference_root) {
            REQUIRE(norm2(p.residual(*p.reference_root)) <= 1e-12 * std::sqrt(double(p.n)));
        }
    }
}

TEST_CASE("problems without a closed-form root have a numerical one", "[problems][certificate]")
{
    for (const char* name : {"broyden_tridiag", "bvp"}) {
        const Problem p = builtin_registry().lookup(name);
        SolverConfig cfg;
        cfg.mode = Mode::plain;
        cfg.epsf = 1e-10;
        cfg.max_fevals = 200000;
        const auto r = solve(p, cfg);
        CAPTURE(name, r.normF, r.fcnt);
        REQUIRE(r.istop == StopCode::converged);
        REQUIRE(r.normF <= 1e-20);
    }
}

TEST_CASE("singular_start root by back substitution", "[problems][singular]")
{
    const Problem p = problems::singular_start(10);
    REQUIRE(norm2(p.residual(p.x0)) > 0.0);
    REQUIRE(norm2(p.residual(*p.reference_root)) <= 1e-14);
}

TEST_CASE("linear fixture parsing", "[problems][fixture]")
{
    std::istringstream in("2\n2 1 3\n1 3 4\n0 0\n");
    const Problem p = parse_linear_fixture(in, "two");
    REQUIRE(p.name == "two");
    REQUIRE(p.n == 2);
    REQUIRE(p.x0 == Vector{0.0, 0.0});
    REQUIRE(p.residual(Vector{1.0, 1.0}) == Vector{0.0, 0.0});

    auto bad = [](const char* text) {
        std::istringstream s(text);
        REQUIRE_THROWS_AS(parse_linear_fixture(s, "bad"), std::runtime_error);
    };
    bad("");
    bad("0\n");
    bad("-1\n");
    bad("2\n1 0 1\n0 1\n");
    bad("1\n1 1\n0 extra\n");
    bad("1\n1 x\n0\n");

    REQUIRE_THROWS_AS(load_linear_fixture("/nonexistent/fixture.txt"), std::runtime_error);
    REQUIRE_THROWS_AS(load_fixture_dir("/nonexistent"), std::runtime_error);
}
