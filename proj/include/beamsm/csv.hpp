#pragma once

// CSV artifacts of an experiment:
//   sinr_trace.csv  algorithm,run,snapshot,sinr_db,updated,lambda1,delta
//   summary.csv     algorithm,mean_update_rate,final_sinr_db
// Numbers use the shortest representation that round-trips exactly.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "beamsm/errors.hpp"
#include "beamsm/harness.hpp"

namespace beamsm {

inline constexpr std::string_view kTraceFile = "sinr_trace.csv";
inline constexpr std::string_view kSummaryFile = "summary.csv";

[[nodiscard]] inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

[[nodiscard]] inline double parse_number(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError("malformed number '" + std::string(s) + "' in CSV");
    return v;
}

struct CsvPaths {
    std::filesystem::path trace;
    std::filesystem::path summary;
};

namespace detail {
inline std::ofstream open_for_write(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    return out;
}
} // namespace detail

inline CsvPaths write_csv(const ExperimentResult& result, const std::filesystem::path& dir) {
    if (result.algorithms.empty()) throw ConfigError("nothing to write: algorithm list is empty");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

    CsvPaths paths{dir / kTraceFile, dir / kSummaryFile};
    {
        auto out = detail::open_for_write(paths.trace);
        out << "algorithm,run,snapshot,sinr_db,updated,lambda1,delta\n";
        for (const auto& alg : result.algorithms)
            for (const auto& run : alg.runs)
                for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
                    const auto& s = run.snapshots[i];
                    out << alg.config.label << ',' << run.run << ',' << (i + 1) << ',' << format_number(s.sinr_db)
                        << ',' << (s.updated ? 1 : 0) << ',' << format_number(s.lambda1) << ','
                        << format_number(s.delta) << '\n';
                }
        if (!out) throw IoError("write failed for '" + paths.trace.string() + "'");
    }
    {
        auto out = detail::open_for_write(paths.summary);
        out << "algorithm,mean_update_rate,final_sinr_db\n";
        for (const auto& alg : result.algorithms)
            out << alg.config.label << ',' << format_number(alg.mean_update_rate) << ','
                << format_number(alg.final_sinr_db()) << '\n';
        if (!out) throw IoError("write failed for '" + paths.summary.string() + "'");
    }
    return paths;
}

struct TraceRow {
    std::string algorithm;
    std::size_t run = 0;
    std::size_t snapshot = 0;
    SnapshotRecord record;
};

namespace detail {
inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i)
        if (i == line.size() || line[i] == sep) {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    return out;
}

inline std::size_t parse_count(std::string_view s) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError("malformed integer '" + std::string(s) + "' in CSV");
    return v;
}
} // namespace detail

[[nodiscard]] inline std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "algorithm,run,snapshot,sinr_db,updated,lambda1,delta")
        throw IoError("'" + path.string() + "' lacks the trace header");
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 7) throw IoError("trace row has " + std::to_string(f.size()) + " fields: " + line);
        TraceRow r;
        r.algorithm = std::string(f[0]);
        r.run = detail::parse_count(f[1]);
        r.snapshot = detail::parse_count(f[2]);
        r.record.sinr_db = parse_number(f[3]);
        r.record.updated = detail::parse_count(f[4]) != 0;
        r.record.lambda1 = parse_number(f[5]);
        r.record.delta = parse_number(f[6]);
        rows.push_back(std::move(r));
    }
    return rows;
}

// Mean SINR per algorithm and snapshot from a trace file (dB domain).
[[nodiscard]] inline std::map<std::string, std::vector<double>> mean_traces(const std::vector<TraceRow>& rows) {
    std::map<std::string, std::vector<double>> sums;
    std::map<std::string, std::vector<std::size_t>> counts;
    for (const auto& r : rows) {
        auto& s = sums[r.algorithm];
        auto& c = counts[r.algorithm];
        if (s.size() < r.snapshot) {
            s.resize(r.snapshot, 0.0);
            c.resize(r.snapshot, 0);
        }
        s[r.snapshot - 1] += r.record.sinr_db;
        ++c[r.snapshot - 1];
    }
    for (auto& [name, s] : sums)
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = counts[name][i] ? s[i] / static_cast<double>(counts[name][i]) : 0.0;
    return sums;
}

} // namespace beamsm
