#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dfsane/bench.hpp"
#include "dfsane/core.hpp"

namespace dfsane {

namespace detail {

// JSON has no infinities or NaNs; encode them as strings.
inline nlohmann::json json_number(double v)
{
    if (std::isfinite(v)) return v;
    return format_double(v);
}

inline double json_to_double(const nlohmann::json& j)
{
    if (j.is_string()) return parse_double(j.get<std::string>());
    return j.get<double>();
}

}  // namespace detail

/// Solve report as a stable-keyed JSON object. Carries the same fields as the
/// text report plus enough context (problem, n, solver, time, epsf) to be
/// read back as a BenchRecord.
inline nlohmann::json report_to_json(const Problem& p, const std::string& solver,
                                     const SolveReport& r)
{
    nlohmann::json x = nlohmann::json::array();
    for (double v : r.x) x.push_back(detail::json_number(v));
    nlohmann::json res = nlohmann::json::array();
    for (double v : r.res) res.push_back(detail::json_number(v));
    return {
        {"problem", p.name},
        {"n", p.n},
        {"solver", solver},
        {"x", x},
        {"res", res},
        {"normF", detail::json_number(r.normF)},
        {"iter", r.iter},
        {"fcnt", r.fcnt},
        {"istop", static_cast<int>(r.istop)},
        {"time", r.wall_seconds},
        {"epsf", r.epsf},
    };
}

/// Reads an object produced by report_to_json. normF there is the squared
/// norm; the record stores ||F||_2.
inline BenchRecord record_from_json(const nlohmann::json& j)
{
    BenchRecord r;
    r.problem = j.at("problem").get<std::string>();
    r.n = j.at("n").get<std::size_t>();
    r.solver = j.at("solver").get<std::string>();
    r.normF_final = std::sqrt(detail::json_to_double(j.at("normF")));
    r.iter = j.at("iter").get<std::int64_t>();
    r.feval = j.at("fcnt").get<std::int64_t>();
    r.time_seconds = j.at("time").get<double>();
    r.istop = j.at("istop").get<int>();
    const double epsf = j.contains("epsf") ? j.at("epsf").get<double>() : default_epsf(r.n);
    r.solved = r.normF_final <= epsf;
    return r;
}

/// Loads records from a bench CSV or from `solve --json` output (a single
/// object, an array of objects, or one object per line).
inline std::vector<BenchRecord> read_records(const std::filesystem::path& path)
{
    if (path.extension() != ".json" && path.extension() != ".jsonl") {
        return read_records_csv(path);
    }
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<BenchRecord> out;
    if (path.extension() == ".jsonl") {
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        }
        return out;
    }
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.is_array()) {
        for (const auto& item : j) out.push_back(record_from_json(item));
    } else {
        out.push_back(record_from_json(j));
    }
    return out;
}

}  // namespace dfsane
