// Command-line front end: solve a problem, run the benchmark suite, build
// performance profiles.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dfsane/bench.hpp"
#include "dfsane/json_io.hpp"
#include "dfsane/problems.hpp"
#include "dfsane/solver.hpp"

namespace fs = std::filesystem;
using namespace dfsane;

namespace {

constexpr const char* kFixtureEnv = "DFSANE_FIXTURE_DIR";
constexpr std::size_t kMaxPrinted = 10;

std::optional<fs::path> fixture_dir_from_env()
{
    if (const char* v = std::getenv(kFixtureEnv); v && *v) return fs::path(v);
    return std::nullopt;
}

/// Builtin name first, then <fixture dir>/<name>[.txt].
Problem resolve_problem(const std::string& name, std::optional<std::size_t> n)
{
    const auto& reg = builtin_registry();
    if (reg.contains(name)) return reg.lookup(name, n);
    if (auto dir = fixture_dir_from_env()) {
        for (const fs::path candidate : {*dir / name, *dir / (name + ".txt")}) {
            if (fs::is_regular_file(candidate)) return load_linear_fixture(candidate);
        }
    }
    return reg.lookup(name, n);  // throws the registry's unknown-problem error
}

Vector read_x0_file(const fs::path& path, std::size_t n)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<double> values;
    double v = 0.0;
    while (in >> v) values.push_back(v);
    if (!in.eof()) throw std::runtime_error("x0 file " + path.string() + ": non-numeric token");
    if (values.size() != n) {
        throw std::runtime_error("x0 file " + path.string() + " has " +
                                 std::to_string(values.size()) + " values, expected " +
                                 std::to_string(n));
    }
    return Vector(std::move(values));
}

void print_vector(std::ostream& out, const Vector& v)
{
    const std::size_t shown = std::min(v.size(), kMaxPrinted);
    for (std::size_t i = 0; i < shown; ++i) out << ' ' << format_double(v[i]);
    if (v.size() > shown) out << " ... (" << v.size() - shown << " more)";
    out << '\n';
}

void print_report(std::ostream& out, const SolveReport& r)
{
    out << "\n$x\n";
    print_vector(out, r.x);
    out << "\n$res\n";
    print_vector(out, r.res);
    out << "\n$normF\n " << format_double(r.normF) << '\n';
    out << "\n$iter\n " << r.iter << '\n';
    out << "\n$fcnt\n " << r.fcnt << '\n';
    out << "\n$istop\n " << static_cast<int>(r.istop) << '\n';
}

struct SolveArgs {
    std::string problem;
    std::optional<std::size_t> n;
    int nhlim = 6;
    std::optional<double> epsf;
    std::optional<std::int64_t> maxit;
    int iprint = -1;
    std::string mode = "accelerated";
    std::string x0_file;
    std::optional<double> budget;
    std::optional<std::int64_t> max_fevals;
    bool json = false;
};

int run_solve(const SolveArgs& a)
{
    Problem p = resolve_problem(a.problem, a.n);
    SolverConfig cfg;
    cfg.nhlim = a.nhlim;
    cfg.epsf = a.epsf;
    cfg.maxit = a.maxit;
    cfg.iprint = a.iprint;
    cfg.time_budget_seconds = a.budget;
    cfg.max_fevals = a.max_fevals;
    cfg.mode = *parse_mode(a.mode);

    std::optional<Vector> x0;
    if (!a.x0_file.empty()) x0 = read_x0_file(a.x0_file, p.n);

    SolveOptions opts;
    opts.log = a.json ? &std::cerr : &std::cout;
    const SolveReport r = solve(p, cfg, x0, opts);
    if (a.json) {
        std::cout << report_to_json(p, to_string(cfg.mode), r).dump(2) << '\n';
    } else {
        print_report(std::cout, r);
    }
    return 0;
}

struct BenchArgs {
    std::string suite = "builtin";
    std::string fixture_dir;
    std::vector<std::string> problems;
    std::vector<std::string> solvers{"accelerated", "plain"};
    double budget = 10.0;
    std::optional<std::int64_t> max_fevals;
    unsigned jobs = 1;
    std::string out;
};

/// "accelerated", "plain" or "<mode>:<nhlim>".
SolverSpec parse_solver_spec(const std::string& text)
{
    const auto colon = text.find(':');
    const std::string mode_name = text.substr(0, colon);
    const auto mode = parse_mode(mode_name);
    if (!mode) throw CLI::ValidationError("--solvers", "unknown solver '" + text + "'");
    SolverSpec spec{text, {}};
    spec.config.mode = *mode;
    if (colon != std::string::npos) spec.config.nhlim = std::stoi(text.substr(colon + 1));
    return spec;
}

int run_bench(const BenchArgs& a)
{
    std::vector<Problem> problems;
    std::string dir = a.fixture_dir;
    if (dir.empty() && a.suite == "fixtures") {
        if (auto env = fixture_dir_from_env()) dir = env->string();
    }
    if (!dir.empty()) {
        problems = load_fixture_dir(dir);
    } else if (!a.problems.empty()) {
        for (const auto& name : a.problems) problems.push_back(resolve_problem(name, std::nullopt));
    } else if (a.suite == "builtin") {
        problems = suite_builtin();
    } else {
        throw CLI::ValidationError("--suite", "expected 'builtin' or 'fixtures'");
    }

    std::vector<SolverSpec> solvers;
    for (const auto& s : a.solvers) {
        SolverSpec spec = parse_solver_spec(s);
        spec.config.max_fevals = a.max_fevals;
        spec.config.validate();
        solvers.push_back(std::move(spec));
    }

    SuiteOptions opts;
    opts.time_budget_seconds = a.budget;
    opts.jobs = a.jobs;
    const auto records = run_suite(problems, solvers, opts);
    if (a.out.empty() || a.out == "-") {
        write_records_csv(records, std::cout);
    } else {
        write_records_csv(records, fs::path(a.out));
    }
    return 0;
}

struct ProfileArgs {
    std::vector<std::string> inputs;
    std::string metric = "feval";
    bool restrict = false;
    std::string out_csv;
    std::string out_svg;
};

int run_profile(const ProfileArgs& a)
{
    std::vector<BenchRecord> records;
    for (const auto& in : a.inputs) {
        auto part = read_records(in);
        records.insert(records.end(), part.begin(), part.end());
    }
    const auto metric = parse_metric(a.metric);
    const CostMatrix cm = build_cost_matrix(records, *metric);
    if (cm.methods.size() < 2) {
        throw std::runtime_error("profile needs records from at least two solvers");
    }
    const auto curves = perf_profile(cm.t, cm.methods, a.restrict);
    if (a.out_csv.empty() || a.out_csv == "-") {
        write_profile_csv(curves, std::cout);
        if (!a.out_svg.empty()) {
            std::ofstream svg(a.out_svg);
            if (!svg) throw IoError("cannot write " + a.out_svg);
            write_profile_svg(curves, svg);
        }
    } else {
        write_profile(curves, a.out_csv, a.out_svg);
    }
    return 0;
}

int run_list()
{
    for (const auto* e : builtin_registry().entries()) {
        std::cout << e->name << "  n="
                  << (e->default_n ? std::to_string(*e->default_n) + " (default)"
                                   : std::to_string(e->fixed_n) + " (fixed)")
                  << "  " << e->summary << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Derivative-free spectral residual solver with sequential-secant acceleration"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "Solve one problem and print the report");
    solve_cmd->add_option("--problem", sa.problem, "Problem name (see 'list') or fixture name")
        ->required();
    solve_cmd->add_option("--n", sa.n, "Dimension for resizable problems");
    solve_cmd->add_option("--nhlim", sa.nhlim, "Secant window size plus one")
        ->check(CLI::Range(2, 1000))
        ->capture_default_str();
    solve_cmd->add_option("--epsf", sa.epsf, "Stop when ||F||_2 <= epsf (default 1e-6*sqrt(n))")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--maxit", sa.maxit, "Iteration limit (default unbounded)")
        ->check(CLI::NonNegativeNumber);
    solve_cmd->add_option("--iprint", sa.iprint, "Trace level -1..2")
        ->check(CLI::Range(-1, 2))
        ->capture_default_str();
    solve_cmd->add_option("--mode", sa.mode, "accelerated or plain")
        ->check(CLI::IsMember({"accelerated", "plain"}))
        ->capture_default_str();
    solve_cmd->add_option("--x0-file", sa.x0_file, "Whitespace-separated start point")
        ->check(CLI::ExistingFile);
    solve_cmd->add_option("--budget", sa.budget, "Wall-clock budget in seconds")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--max-fevals", sa.max_fevals, "Residual evaluation cap")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_flag("--json", sa.json, "Emit the report as JSON");

    BenchArgs ba;
    auto* bench_cmd = app.add_subcommand("bench", "Run solvers over a problem suite, write CSV");
    bench_cmd->add_option("--suite", ba.suite, "builtin or fixtures")
        ->check(CLI::IsMember({"builtin", "fixtures"}))
        ->capture_default_str();
    bench_cmd->add_option("--fixture-dir", ba.fixture_dir, "Directory of linear fixtures")
        ->check(CLI::ExistingDirectory);
    bench_cmd->add_option("--problem", ba.problems, "Restrict to these builtin problems");
    bench_cmd->add_option("--solvers", ba.solvers, "Solvers: accelerated, plain, or mode:nhlim")
        ->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--budget", ba.budget, "Per-run wall-clock budget in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_cmd->add_option("--max-fevals", ba.max_fevals, "Per-run residual evaluation cap")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--jobs", ba.jobs, "Parallel runs")->check(CLI::Range(1u, 256u));
    bench_cmd->add_option("--out", ba.out, "Output CSV (default stdout)");

    ProfileArgs pa;
    auto* profile_cmd = app.add_subcommand("profile", "Performance profiles from bench outputs");
    profile_cmd->add_option("--inputs", pa.inputs, "Bench CSV or solve --json files")
        ->required()
        ->check(CLI::ExistingFile);
    profile_cmd->add_option("--metric", pa.metric, "feval, time or iter")
        ->check(CLI::IsMember({"feval", "time", "iter"}))
        ->capture_default_str();
    profile_cmd->add_flag("--restrict", pa.restrict, "Only problems solved by every method");
    profile_cmd->add_option("--out-csv", pa.out_csv, "Profile CSV (default stdout)");
    profile_cmd->add_option("--out-svg", pa.out_svg, "Staircase plot");

    auto* list_cmd = app.add_subcommand("list", "List builtin problems");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return run_solve(sa);
        if (bench_cmd->parsed()) return run_bench(ba);
        if (profile_cmd->parsed()) return run_profile(pa);
        if (list_cmd->parsed()) return run_list();
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
