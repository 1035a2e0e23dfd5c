#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "dfsane/bench.hpp"
#include "dfsane/json_io.hpp"
#include "dfsane/problems.hpp"

using namespace dfsane;
namespace fs = std::filesystem;

namespace {

const double inf = std::numeric_limits<double>::infinity();

fs::path scratch_dir()
{
    const fs::path dir = fs::temp_directory_path() / "dfsane_bench_test";
    fs::create_directories(dir);
    return dir;
}

std::vector<SolverSpec> both_modes()
{
    SolverSpec acc{"accelerated", {}};
    SolverSpec plain{"plain", {}};
    plain.config.mode = Mode::plain;
    return {acc, plain};
}

}  // namespace

TEST_CASE("run_suite produces one record per pair in problem-major order", "[bench][suite]")
{
    const std::vector<Problem> problems{problems::booth(), problems::expfun2(3),
                                        problems::linear_tridiagonal(5)};
    SuiteOptions opts;
    opts.time_budget_seconds = 5.0;
    const auto recs = run_suite(problems, both_modes(), opts);
    REQUIRE(recs.size() == 6);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        REQUIRE(recs[i].problem == problems[i / 2].name);
        REQUIRE(recs[i].solver == (i % 2 == 0 ? "accelerated" : "plain"));
        REQUIRE(recs[i].solved);
        REQUIRE(recs[i].istop == 0);
    }

    // feval is the solver's own fcnt.
    SolverConfig cfg;
    cfg.epsf = default_epsf(3);
    REQUIRE(recs[2].feval == solve(problems::expfun2(3), cfg).fcnt);

    opts.jobs = 3;
    const auto parallel = run_suite(problems, both_modes(), opts);
    REQUIRE(parallel.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        REQUIRE(parallel[i].problem == recs[i].problem);
        REQUIRE(parallel[i].solver == recs[i].solver);
        REQUIRE(parallel[i].feval == recs[i].feval);
    }

    REQUIRE_THROWS_AS(run_suite({}, both_modes()), std::invalid_argument);
    REQUIRE_THROWS_AS(run_suite(problems, {}), std::invalid_argument);
}

TEST_CASE("an unsolvable problem is recorded as unsolved", "[bench][suite]")
{
    const Problem p{"no_root", 1,
                    [](const Vector& x) { return Vector{x[0] * x[0] + 1.0}; }, Vector{0.5}};
    SuiteOptions opts;
    opts.time_budget_seconds = 1.0;
    const auto t0 = std::chrono::steady_clock::now();
    const auto recs = run_suite({p}, both_modes(), opts);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(recs.size() == 2);
    for (const auto& r : recs) {
        REQUIRE_FALSE(r.solved);
        REQUIRE(r.istop != 0);
    }
    REQUIRE(elapsed < 5.0);
}

TEST_CASE("perf_profile fixture", "[bench][profile]")
{
    const auto curves = perf_profile({{1, 2}, {2, 1}}, {"A", "B"}, false);
    REQUIRE(curves.size() == 2);
    REQUIRE(curves[0].method == "A");
    REQUIRE(curves[0].value_at(1.0) == 0.5);
    REQUIRE(curves[0].value_at(2.0) == 1.0);
    REQUIRE(curves[0].value_at(0.5) == 0.0);
    REQUIRE(curves[0].tau == std::vector<double>{1.0, 2.0});

    const auto with_fail = perf_profile({{1, inf}, {2, 1}}, {"A", "B"}, false);
    REQUIRE(with_fail[0].value_at(1e9) == 0.5);
    REQUIRE(with_fail[1].value_at(1.0) == 0.5);
    REQUIRE(with_fail[1].value_at(2.0) == 1.0);

    const auto restricted = perf_profile({{1, inf}, {2, 1}}, {"A", "B"}, true);
    REQUIRE(restricted[0].value_at(1.0) == 1.0);
    REQUIRE(restricted[1].value_at(1.0) == 0.0);
    REQUIRE(restricted[1].value_at(2.0) == 1.0);

    REQUIRE_THROWS_AS(perf_profile({{inf}, {inf}}, {"A", "B"}, true), ProfileError);
    REQUIRE_THROWS_AS(perf_profile({}, {}, false), ProfileError);
    REQUIRE_THROWS_AS(perf_profile({{0.0}}, {"A"}, false), std::invalid_argument);
    REQUIRE_THROWS_AS(perf_profile({{1.0}, {1.0, 2.0}}, {"A", "B"}, false), std::invalid_argument);
}

TEST_CASE("profiles are monotone and bounded", "[bench][profile][property]")
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> U(0.01, 100.0);
    std::uniform_int_distribution<int> coin(0, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t methods = 2 + trial % 3;
        const std::size_t problems = 1 + trial % 9;
        std::vector<std::vector<double>> t(methods, std::vector<double>(problems));
        for (auto& row : t)
            for (auto& v : row) v = coin(rng) == 0 ? inf : U(rng);
        std::vector<std::string> names;
        for (std::size_t i = 0; i < methods; ++i) names.push_back("m" + std::to_string(i));

        for (bool restrict : {false, true}) {
            std::vector<ProfileCurve> curves;
            try {
                curves = perf_profile(t, names, restrict);
            } catch (const ProfileError&) {
                continue;
            }
            double best_at_one = 0.0;
            for (const auto& c : curves) {
                REQUIRE(c.tau.front() == 1.0);
                for (std::size_t k = 0; k < c.gamma.size(); ++k) {
                    REQUIRE(c.gamma[k] >= 0.0);
                    REQUIRE(c.gamma[k] <= 1.0);
                    if (k > 0) {
                        REQUIRE(c.tau[k] > c.tau[k - 1]);
                        REQUIRE(c.gamma[k] >= c.gamma[k - 1]);
                    }
                }
                best_at_one += c.value_at(1.0);
            }
            // Every problem some method solves has at least one winner at tau = 1.
            REQUIRE(best_at_one >= (restrict ? 1.0 : 0.0) - 1e-12);
        }
    }
}

TEST_CASE("time costs are floored at 0.01 s", "[bench][profile]")
{
    REQUIRE(floor_time(0.001) == kTimeFloorSeconds);
    REQUIRE(floor_time(0.5) == 0.5);
    std::vector<BenchRecord> recs(2);
    recs[0] = {"p", 2, "A", 0.0, 1, 3, 0.0001, true};
    recs[1] = {"p", 2, "B", 0.0, 1, 3, 0.02, true};
    const auto cm = build_cost_matrix(recs, Metric::time);
    REQUIRE(cm.t[0][0] == 0.01);
    REQUIRE(cm.t[1][0] == 0.02);
    const auto curves = perf_profile(cm.t, cm.methods, false);
    REQUIRE(curves[1].value_at(1.0) == 0.0);
    REQUIRE(curves[1].value_at(2.0) == 1.0);
}

TEST_CASE("cost matrix treats unsolved and missing pairs as failures", "[bench][profile]")
{
    std::vector<BenchRecord> recs{
        {"p", 2, "A", 0.0, 3, 10, 0.1, true},
        {"p", 2, "B", 1.0, 3, 50, 0.1, false},
        {"q", 4, "A", 0.0, 2, 7, 0.1, true},
    };
    const auto cm = build_cost_matrix(recs, Metric::feval);
    REQUIRE(cm.methods == std::vector<std::string>{"A", "B"});
    REQUIRE(cm.problems == std::vector<std::string>{"p/2", "q/4"});
    REQUIRE(cm.t[0] == std::vector<double>{10.0, 7.0});
    REQUIRE(std::isinf(cm.t[1][0]));
    REQUIRE(std::isinf(cm.t[1][1]));
    REQUIRE(parse_metric("iter") == Metric::iter);
    REQUIRE_FALSE(parse_metric("bogus").has_value());
}

TEST_CASE("records CSV", "[bench][io]")
{
    std::vector<BenchRecord> recs{
        {"booth", 2, "accelerated", 1e-16, 2, 5, 0.001, true},
        {"a,b", 3, "plain", inf, 9, 100, 0.5, false},
    };
    std::ostringstream out;
    write_records_csv(recs, out);
    std::istringstream lines(out.str());
    std::string line;
    int count = 0;
    std::getline(lines, line);
    REQUIRE(line == kRecordsHeader);
    ++count;
    while (std::getline(lines, line)) ++count;
    REQUIRE(count == 3);

    std::istringstream in(out.str());
    const auto back = read_records_csv(in);
    REQUIRE(back.size() == 2);
    REQUIRE(back[0].problem == "booth");
    REQUIRE(back[0].normF_final == 1e-16);
    REQUIRE(back[0].solved);
    REQUIRE(back[1].problem == "a,b");
    REQUIRE(std::isinf(back[1].normF_final));
    REQUIRE_FALSE(back[1].solved);
    REQUIRE(back[1].feval == 100);

    std::istringstream bad("problem,n\nx,1\n");
    REQUIRE_THROWS(read_records_csv(bad));
}

TEST_CASE("profile CSV round trip and SVG output", "[bench][io]")
{
    const auto curves = perf_profile({{1, 2, 4}, {2, 1, inf}}, {"accelerated", "plain"}, false);
    std::ostringstream out;
    write_profile_csv(curves, out);
    REQUIRE(out.str().rfind("method,tau,gamma\n", 0) == 0);
    std::istringstream in(out.str());
    const auto back = read_profile_csv(in);
    REQUIRE(back.size() == curves.size());
    for (std::size_t i = 0; i < curves.size(); ++i) {
        REQUIRE(back[i].method == curves[i].method);
        REQUIRE(back[i].tau == curves[i].tau);
        REQUIRE(back[i].gamma == curves[i].gamma);
    }

    std::ostringstream svg;
    write_profile_svg(curves, svg, "a < b");
    REQUIRE(svg.str().find("<svg") != std::string::npos);
    REQUIRE(svg.str().find("a &lt; b") != std::string::npos);

    const fs::path dir = scratch_dir();
    write_profile(curves, dir / "p.csv", dir / "p.svg");
    REQUIRE(fs::file_size(dir / "p.csv") > 0);
    REQUIRE(fs::file_size(dir / "p.svg") > 0);
}

TEST_CASE("unwritable output paths raise IoError", "[bench][io]")
{
    const std::vector<BenchRecord> recs{{"booth", 2, "a", 0.0, 1, 1, 0.1, true}};
    REQUIRE_THROWS_AS(write_records_csv(recs, fs::path("/nonexistent/dir/out.csv")), IoError);
    const auto curves = perf_profile({{1}, {2}}, {"A", "B"}, false);
    REQUIRE_THROWS_AS(write_profile(curves, "/nonexistent/dir/p.csv", ""), IoError);
    REQUIRE_THROWS_AS(read_records_csv(fs::path("/nonexistent/in.csv")), IoError);
}

TEST_CASE("solve JSON reports feed the record reader", "[bench][io][json]")
{
    const Problem p = problems::booth();
    const auto r = solve(p, SolverConfig{});
    const auto j = report_to_json(p, "accelerated", r);
    REQUIRE(j.at("istop") == 0);
    REQUIRE(j.at("x").size() == 2);

    const fs::path dir = scratch_dir();
    {
        std::ofstream f(dir / "one.json");
        f << j.dump();
    }
    {
        std::ofstream f(dir / "many.jsonl");
        f << j.dump() << "\n\n" << j.dump() << '\n';
    }
    const auto one = read_records(dir / "one.json");
    REQUIRE(one.size() == 1);
    REQUIRE(one[0].problem == "booth");
    REQUIRE(one[0].solved);
    REQUIRE(one[0].feval == r.fcnt);
    REQUIRE(read_records(dir / "many.jsonl").size() == 2);

    // Infinite norms survive the trip as strings.
    SolveReport failed = r;
    failed.normF = inf;
    failed.istop = StopCode::breakdown;
    const auto jf = report_to_json(p, "plain", failed);
    REQUIRE(jf.at("normF").is_string());
    const auto rec = record_from_json(jf);
    REQUIRE(std::isinf(rec.normF_final));
    REQUIRE_FALSE(rec.solved);
}
