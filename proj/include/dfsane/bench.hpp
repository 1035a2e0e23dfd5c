#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dfsane/core.hpp"
#include "dfsane/format.hpp"
#include "dfsane/solver.hpp"

namespace dfsane {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ProfileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One solver x problem result row.
struct BenchRecord {
    std::string problem;
    std::size_t n = 0;
    std::string solver;
    /// ||F(x*)||_2, not squared.
    double normF_final = 0.0;
    std::int64_t iter = 0;
    std::int64_t feval = 0;
    double time_seconds = 0.0;
    bool solved = false;
    /// Stop code of the run; -1 when unknown (e.g. read back from CSV).
    int istop = -1;
};

struct SolverSpec {
    std::string name;
    SolverConfig config;
};

struct SuiteOptions {
    /// Per-run wall-clock budget; overrides the configs' own budgets when set.
    std::optional<double> time_budget_seconds;
    /// Stopping tolerance as a function of n; default 1e-6 * sqrt(n).
    std::function<double(std::size_t)> epsf_rule;
    unsigned jobs = 1;
};

inline BenchRecord make_record(const Problem& p, const std::string& solver, const SolveReport& r)
{
    BenchRecord rec;
    rec.problem = p.name;
    rec.n = p.n;
    rec.solver = solver;
    rec.normF_final = std::sqrt(r.normF);
    rec.iter = r.iter;
    rec.feval = r.fcnt;
    rec.time_seconds = r.wall_seconds;
    rec.solved = rec.normF_final <= r.epsf;
    rec.istop = static_cast<int>(r.istop);
    return rec;
}

/// Runs every (problem, solver) pair in isolation. Records come back in
/// problem-major, solver-minor order whatever the completion order; runs may
/// be spread across `jobs` threads.
inline std::vector<BenchRecord> run_suite(const std::vector<Problem>& problems,
                                          const std::vector<SolverSpec>& solvers,
                                          const SuiteOptions& opts = {})
{
    if (problems.empty()) throw std::invalid_argument("run_suite: no problems");
    if (solvers.empty()) throw std::invalid_argument("run_suite: no solver configurations");

    const std::size_t total = problems.size() * solvers.size();
    std::vector<BenchRecord> out(total);

    auto run_one = [&](std::size_t idx) {
        const Problem& p = problems[idx / solvers.size()];
        const SolverSpec& spec = solvers[idx % solvers.size()];
        SolverConfig cfg = spec.config;
        cfg.iprint = -1;
        if (opts.time_budget_seconds) cfg.time_budget_seconds = opts.time_budget_seconds;
        cfg.epsf = opts.epsf_rule ? opts.epsf_rule(p.n) : default_epsf(p.n);

        const auto t0 = std::chrono::steady_clock::now();
        try {
            out[idx] = make_record(p, spec.name, solve(p, cfg));
        } catch (const std::exception&) {
            BenchRecord rec;
            rec.problem = p.name;
            rec.n = p.n;
            rec.solver = spec.name;
            rec.normF_final = std::numeric_limits<double>::infinity();
            rec.time_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            rec.solved = false;
            rec.istop = static_cast<int>(StopCode::breakdown);
            out[idx] = rec;
        }
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(total)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < total; ++i) run_one(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < total; i = next++) run_one(i);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

// ---------------------------------------------------------------------------
// Performance profiles

/// Gamma_i(tau): fraction of problems that method i solves within tau times
/// the best method's cost. Right-continuous step function stored at its
/// breakpoints.
struct ProfileCurve {
    std::string method;
    std::vector<double> tau;
    std::vector<double> gamma;

    [[nodiscard]] double value_at(double t) const
    {
        auto it = std::upper_bound(tau.begin(), tau.end(), t);
        if (it == tau.begin()) return 0.0;
        return gamma[static_cast<std::size_t>(std::distance(tau.begin(), it)) - 1];
    }
};

inline constexpr double kTimeFloorSeconds = 0.01;

/// Times below 0.01 s are treated as 0.01 s.
inline double floor_time(double seconds) { return std::max(seconds, kTimeFloorSeconds); }

/// Costs t[i][j] (method i, problem j), each positive or +inf for a failure.
/// With restrict_to_solved_by_all, problems any method failed are dropped
/// before n_P is counted.
inline std::vector<ProfileCurve> perf_profile(const std::vector<std::vector<double>>& t,
                                              const std::vector<std::string>& methods,
                                              bool restrict_to_solved_by_all)
{
    if (t.empty()) throw ProfileError("perf_profile: no methods");
    if (methods.size() != t.size()) throw std::invalid_argument("perf_profile: names/rows mismatch");
    const std::size_t problems = t.front().size();
    for (const auto& row : t) {
        if (row.size() != problems) throw std::invalid_argument("perf_profile: ragged cost matrix");
        for (double v : row) {
            if (std::isnan(v) || !(v > 0.0)) {
                throw std::invalid_argument("perf_profile: costs must be positive or +inf");
            }
        }
    }

    std::vector<std::size_t> columns;
    for (std::size_t j = 0; j < problems; ++j) {
        bool all_finite_col = true;
        for (const auto& row : t) all_finite_col = all_finite_col && std::isfinite(row[j]);
        if (!restrict_to_solved_by_all || all_finite_col) columns.push_back(j);
    }
    if (columns.empty()) throw ProfileError("perf_profile: no problems left to profile");
    const double n_p = static_cast<double>(columns.size());

    // ratios[i] holds method i's finite performance ratios.
    std::vector<std::vector<double>> ratios(t.size());
    std::set<double> breakpoints{1.0};
    for (std::size_t j : columns) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& row : t) best = std::min(best, row[j]);
        if (!std::isfinite(best)) continue;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!std::isfinite(t[i][j])) continue;
            const double r = t[i][j] / best;
            ratios[i].push_back(r);
            breakpoints.insert(r);
        }
    }

    std::vector<ProfileCurve> curves;
    curves.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::sort(ratios[i].begin(), ratios[i].end());
        ProfileCurve c;
        c.method = methods[i];
        for (double tau : breakpoints) {
            const auto count = std::upper_bound(ratios[i].begin(), ratios[i].end(), tau) -
                               ratios[i].begin();
            c.tau.push_back(tau);
            c.gamma.push_back(static_cast<double>(count) / n_p);
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

enum class Metric { feval, time, iter };

inline std::optional<Metric> parse_metric(const std::string& s)
{
    if (s == "feval") return Metric::feval;
    if (s == "time") return Metric::time;
    if (s == "iter") return Metric::iter;
    return std::nullopt;
}

struct CostMatrix {
    std::vector<std::string> methods;
    /// "name/n" keys in first-seen order.
    std::vector<std::string> problems;
    std::vector<std::vector<double>> t;
};

/// Arranges records into a methods x problems cost matrix. Unsolved runs and
/// missing pairs cost +inf; times are floored at 0.01 s.
inline CostMatrix build_cost_matrix(const std::vector<BenchRecord>& records, Metric metric)
{
    CostMatrix cm;
    std::map<std::string, std::size_t> method_index;
    std::map<std::string, std::size_t> problem_index;
    for (const auto& r : records) {
        if (method_index.emplace(r.solver, cm.methods.size()).second) cm.methods.push_back(r.solver);
        const std::string key = r.problem + "/" + std::to_string(r.n);
        if (problem_index.emplace(key, cm.problems.size()).second) cm.problems.push_back(key);
    }
    const double inf = std::numeric_limits<double>::infinity();
    cm.t.assign(cm.methods.size(), std::vector<double>(cm.problems.size(), inf));
    for (const auto& r : records) {
        if (!r.solved) continue;
        double cost = 0.0;
        switch (metric) {
        case Metric::feval: cost = static_cast<double>(r.feval); break;
        case Metric::iter: cost = static_cast<double>(std::max<std::int64_t>(r.iter, 1)); break;
        case Metric::time: cost = floor_time(r.time_seconds); break;
        }
        const std::size_t i = method_index.at(r.solver);
        const std::size_t j = problem_index.at(r.problem + "/" + std::to_string(r.n));
        cm.t[i][j] = std::min(cm.t[i][j], cost);
    }
    return cm;
}

// ---------------------------------------------------------------------------
// CSV / SVG output

namespace detail {

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::ofstream open_for_write(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

inline void check_written(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline bool parse_bool(const std::string& s)
{
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw std::runtime_error("invalid boolean '" + s + "'");
}

}  // namespace detail

inline constexpr const char* kRecordsHeader = "problem,n,solver,normF,iter,feval,time,solved";

inline void write_records_csv(const std::vector<BenchRecord>& records, std::ostream& out)
{
    out << kRecordsHeader << '\n';
    for (const auto& r : records) {
        out << detail::csv_field(r.problem) << ',' << r.n << ',' << detail::csv_field(r.solver)
            << ',' << format_double(r.normF_final) << ',' << r.iter << ',' << r.feval << ','
            << format_double(r.time_seconds) << ',' << (r.solved ? "true" : "false") << '\n';
    }
}

inline void write_records_csv(const std::vector<BenchRecord>& records,
                              const std::filesystem::path& path)
{
    if (records.empty()) throw std::invalid_argument("write_records_csv: no records");
    auto out = detail::open_for_write(path);
    write_records_csv(records, out);
    detail::check_written(out, path);
}

inline std::vector<BenchRecord> read_records_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("records CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kRecordsHeader) throw std::runtime_error("records CSV: unexpected header '" + line + "'");
    std::vector<BenchRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = detail::csv_split(line);
        if (f.size() != 8) {
            throw std::runtime_error("records CSV line " + std::to_string(lineno) +
                                     ": expected 8 fields");
        }
        try {
            BenchRecord r;
            r.problem = f[0];
            r.n = static_cast<std::size_t>(std::stoull(f[1]));
            r.solver = f[2];
            r.normF_final = parse_double(f[3]);
            r.iter = std::stoll(f[4]);
            r.feval = std::stoll(f[5]);
            r.time_seconds = parse_double(f[6]);
            r.solved = detail::parse_bool(f[7]);
            out.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw std::runtime_error("records CSV line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<BenchRecord> read_records_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_records_csv(in);
}

inline void write_profile_csv(const std::vector<ProfileCurve>& curves, std::ostream& out)
{
    out << "method,tau,gamma\n";
    for (const auto& c : curves) {
        for (std::size_t k = 0; k < c.tau.size(); ++k) {
            out << detail::csv_field(c.method) << ',' << format_double(c.tau[k]) << ','
                << format_double(c.gamma[k]) << '\n';
        }
    }
}

inline std::vector<ProfileCurve> read_profile_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("profile CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "method,tau,gamma") throw std::runtime_error("profile CSV: unexpected header");
    std::vector<ProfileCurve> curves;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = detail::csv_split(line);
        if (f.size() != 3) throw std::runtime_error("profile CSV: expected 3 fields");
        if (curves.empty() || curves.back().method != f[0]) curves.push_back({f[0], {}, {}});
        curves.back().tau.push_back(parse_double(f[1]));
        curves.back().gamma.push_back(parse_double(f[2]));
    }
    return curves;
}

/// Staircase plot of the curves on a log10 tau axis.
inline void write_profile_svg(const std::vector<ProfileCurve>& curves, std::ostream& out,
                              const std::string& title = "Performance profile")
{
    constexpr double W = 640, H = 420, left = 60, right = 150, top = 40, bottom = 50;
    const double pw = W - left - right;
    const double ph = H - top - bottom;

    double tau_max = 1.0;
    for (const auto& c : curves)
        for (double t : c.tau) tau_max = std::max(tau_max, t);
    double log_max = std::log10(tau_max) * 1.05;
    if (log_max < std::log10(2.0)) log_max = std::log10(2.0);

    auto px = [&](double tau) { return left + std::log10(tau) / log_max * pw; };
    auto py = [&](double g) { return top + (1.0 - g) * ph; };

    static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << detail::xml_escape(title) << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int g = 0; g <= 4; ++g) {
        const double v = g / 4.0;
        out << "<line x1=\"" << left - 4 << "\" y1=\"" << py(v) << "\" x2=\"" << left
            << "\" y2=\"" << py(v) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << v
            << "</text>\n";
    }
    for (int e = 0; e <= static_cast<int>(std::floor(log_max)); ++e) {
        const double x = px(std::pow(10.0, e));
        out << "<line x1=\"" << x << "\" y1=\"" << top + ph << "\" x2=\"" << x << "\" y2=\""
            << top + ph + 4 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">1e"
            << e << "</text>\n";
    }
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\">tau (log scale)</text>\n";

    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        const char* color = palette[i % std::size(palette)];
        std::ostringstream pts;
        double prev = 0.0;
        pts << px(1.0) << ',' << py(0.0);
        for (std::size_t k = 0; k < c.tau.size(); ++k) {
            pts << ' ' << px(c.tau[k]) << ',' << py(prev) << ' ' << px(c.tau[k]) << ','
                << py(c.gamma[k]);
            prev = c.gamma[k];
        }
        pts << ' ' << left + pw << ',' << py(prev);
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
            << pts.str() << "\"/>\n";
        const double ly = top + 16 + 18 * static_cast<double>(i);
        out << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + pw + 36 << "\" y=\"" << ly + 4 << "\">"
            << detail::xml_escape(c.method) << "</text>\n";
    }
    out << "</svg>\n";
}

inline void write_profile(const std::vector<ProfileCurve>& curves,
                          const std::filesystem::path& path_csv,
                          const std::filesystem::path& path_svg)
{
    if (curves.empty()) throw std::invalid_argument("write_profile: no curves");
    auto csv = detail::open_for_write(path_csv);
    write_profile_csv(curves, csv);
    detail::check_written(csv, path_csv);
    if (!path_svg.empty()) {
        auto svg = detail::open_for_write(path_svg);
        write_profile_svg(curves, svg);
        detail::check_written(svg, path_svg);
    }
}

}  // namespace dfsane
