#pragma once

// Text formats for debugging and replay.
//
// Volumetric snapshot (touchloc-volumetric/1):
//   format = touchloc-volumetric/1
//   dims = 20 20
//   q = 9,1
//   po = <first-bit> <run> <run> ...     runs over grid indices, alternating values
//   record = <x,y[,z]> <dir>              one per history entry, oldest first
//
// Value table dump (touchloc-values/1): one "<key> <v_ad|-> <v_inad|->" line per
// key, sorted by key so dumps diff cleanly.
//
// Episode trace (touchloc-episode/1): planner, mode, seed, the embedded
// scenario between "begin scenario" / "end scenario", one "step" line per
// executed action and the final record row.

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "touchloc/harness.hpp"
#include "touchloc/planner.hpp"
#include "touchloc/scenario.hpp"
#include "touchloc/volumetric_belief.hpp"

namespace touchloc {

inline constexpr const char* kSnapshotFormat = "touchloc-volumetric/1";
inline constexpr const char* kValuesFormat = "touchloc-values/1";
inline constexpr const char* kEpisodeFormat = "touchloc-episode/1";

namespace detail {

inline std::pair<std::string, std::string> split_key(const std::string& line) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidScenario, "expected key = value: " + line);
    return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

}  // namespace detail

/// Run-length encoding of a voxel set over all grid indices.
inline std::string encode_runs(const VoxelSet& s) {
    std::ostringstream out;
    const bool first = s.universe() > 0 && s.contains(0);
    out << (first ? 1 : 0);
    bool cur = first;
    std::size_t run = 0;
    for (std::size_t i = 0; i < s.universe(); ++i) {
        if (s.contains(i) == cur) {
            ++run;
        } else {
            out << ' ' << run;
            cur = !cur;
            run = 1;
        }
    }
    out << ' ' << run;
    return out.str();
}

inline VoxelSet decode_runs(const std::string& text, std::size_t size) {
    const auto tok = detail::split_ws(text);
    if (tok.empty()) throw Error(ErrorKind::InvalidScenario, "empty run-length encoding");
    bool cur = detail::parse_int(tok[0]) != 0;
    VoxelSet s(size);
    std::size_t at = 0;
    for (std::size_t t = 1; t < tok.size(); ++t) {
        const long run = detail::parse_int(tok[t]);
        if (run < 0 || at + static_cast<std::size_t>(run) > size) {
            throw Error(ErrorKind::InvalidScenario, "run-length encoding overflows the grid");
        }
        if (cur)
            for (long i = 0; i < run; ++i) s.insert(at + static_cast<std::size_t>(i));
        at += static_cast<std::size_t>(run);
        cur = !cur;
    }
    if (at != size) throw Error(ErrorKind::InvalidScenario, "run-length encoding does not cover the grid");
    return s;
}

inline void write_snapshot(std::ostream& out, const GridWorkspace& grid, const VolumetricBelief& b) {
    const int rank = grid.rank();
    out << "format = " << kSnapshotFormat << "\n";
    out << "dims =";
    for (int a = 0; a < rank; ++a) out << ' ' << grid.extent(a);
    out << "\nq = " << detail::format_cell(b.q.cell, rank) << "\n";
    out << "po = " << encode_runs(b.po) << "\n";
    for (const auto& r : b.history) {
        out << "record = " << detail::format_cell(r.config.cell, rank) << ' ' << r.action.dir.name()
            << "\n";
    }
}

inline VolumetricBelief read_snapshot(std::istream& in, const GridWorkspace& grid) {
    VolumetricBelief b;
    bool have_format = false;
    bool have_po = false;
    std::string line;
    int line_no = 0;
    try {
        while (std::getline(in, line)) {
            ++line_no;
            line = detail::trim(line);
            if (line.empty() || line[0] == '#') continue;
            const auto [key, value] = detail::split_key(line);
            if (key == "format") {
                if (value != kSnapshotFormat) throw Error(ErrorKind::InvalidScenario, "unsupported format " + value);
                have_format = true;
            } else if (key == "dims") {
                const auto tok = detail::split_ws(value);
                if (static_cast<int>(tok.size()) != grid.rank()) {
                    throw Error(ErrorKind::InvalidScenario, "snapshot rank does not match the grid");
                }
                for (int a = 0; a < grid.rank(); ++a) {
                    if (detail::parse_int(tok[a]) != grid.extent(a)) {
                        throw Error(ErrorKind::InvalidScenario, "snapshot dims do not match the grid");
                    }
                }
            } else if (key == "q") {
                b.q = Config{detail::parse_cell(value)};
            } else if (key == "po") {
                b.po = decode_runs(value, grid.size());
                have_po = true;
            } else if (key == "record") {
                const auto tok = detail::split_ws(value);
                if (tok.size() != 2) throw Error(ErrorKind::InvalidScenario, "record needs a cell and a direction");
                b.history.push_back({Config{detail::parse_cell(tok[0])},
                                     ActionSpec{parse_direction(tok[1]), 1}});
            } else {
                throw Error(ErrorKind::InvalidScenario, "unknown key '" + key + "'");
            }
        }
    } catch (const std::exception& e) {
        throw Error(ErrorKind::InvalidScenario, "snapshot line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_format || !have_po) throw Error(ErrorKind::InvalidScenario, "snapshot is missing format or po");
    return b;
}

inline void write_values(std::ostream& out, const ValueTable& table) {
    std::map<std::string, std::pair<std::string, std::string>> rows;
    for (const auto& [k, v] : table.v_ad) rows[k.hex()].first = fixed6(v);
    for (const auto& [k, v] : table.v_inad) rows[k.hex()].second = fixed6(v);
    out << "# " << kValuesFormat << "\n";
    for (const auto& [k, v] : rows) {
        out << k << ' ' << (v.first.empty() ? "-" : v.first) << ' '
            << (v.second.empty() ? "-" : v.second) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Episode traces.

struct EpisodeTrace {
    Scenario scenario;
    PlannerKind planner = PlannerKind::Rtdp;
    EpisodeMode mode = EpisodeMode::Full;
    std::uint64_t seed = 0;
    std::vector<StepTrace> steps;
    RunRecord record;
};

inline std::string format_step(const StepTrace& s) {
    std::ostringstream out;
    out << "step = " << s.phase << ' ' << s.action.dir.name() << ' ' << s.action.length << ' '
        << (s.obs.collision ? "collision" : "free") << ' ' << s.obs.rest;
    return out.str();
}

inline void write_trace(std::ostream& out, const Scenario& sc, PlannerKind planner, EpisodeMode mode,
                        const Episode& ep) {
    out << "format = " << kEpisodeFormat << "\n";
    out << "planner = " << planner_name(planner) << "\n";
    out << "mode = " << mode_name(mode) << "\n";
    out << "seed = " << ep.record.seed << "\n";
    out << "begin scenario\n" << format_scenario(sc) << "end scenario\n";
    for (const auto& s : ep.steps) out << format_step(s) << "\n";
    out << "record = " << format_record(ep.record, 0) << "\n";
}

inline EpisodeTrace read_trace(std::istream& in, const std::string& origin) {
    EpisodeTrace t;
    std::string line;
    int line_no = 0;
    bool have_format = false;
    bool have_scenario = false;
    bool have_record = false;
    try {
        while (std::getline(in, line)) {
            ++line_no;
            line = detail::trim(line);
            if (line.empty() || line[0] == '#') continue;
            if (line == "begin scenario") {
                std::ostringstream body;
                while (std::getline(in, line)) {
                    ++line_no;
                    if (detail::trim(line) == "end scenario") break;
                    body << line << "\n";
                }
                std::istringstream sin(body.str());
                t.scenario = parse_scenario(sin, origin + " (embedded scenario)");
                have_scenario = true;
                continue;
            }
            const auto [key, value] = detail::split_key(line);
            if (key == "format") {
                if (value != kEpisodeFormat) throw Error(ErrorKind::InvalidScenario, "unsupported format " + value);
                have_format = true;
            } else if (key == "planner") {
                t.planner = parse_planner(value);
            } else if (key == "mode") {
                t.mode = parse_mode(value);
            } else if (key == "seed") {
                t.seed = std::stoull(value);
            } else if (key == "step") {
                const auto tok = detail::split_ws(value);
                if (tok.size() != 5) throw Error(ErrorKind::InvalidScenario, "step needs 5 fields");
                StepTrace s;
                s.phase = static_cast<int>(detail::parse_int(tok[0]));
                s.action = {parse_direction(tok[1]), static_cast<int>(detail::parse_int(tok[2]))};
                if (tok[3] != "free" && tok[3] != "collision") {
                    throw Error(ErrorKind::InvalidScenario, "observation must be free or collision");
                }
                s.obs = {tok[3] == "collision", static_cast<int>(detail::parse_int(tok[4]))};
                t.steps.push_back(s);
            } else if (key == "record") {
                t.record = parse_record(value).second;
                have_record = true;
            } else {
                throw Error(ErrorKind::InvalidScenario, "unknown key '" + key + "'");
            }
        }
    } catch (const std::exception& e) {
        throw Error(ErrorKind::InvalidScenario, origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_format || !have_scenario || !have_record) {
        throw Error(ErrorKind::InvalidScenario, origin + ": trace is missing format, scenario or record");
    }
    return t;
}

struct ReplayReport {
    bool steps_match = false;
    bool record_match = false;
    std::size_t first_divergence = 0;  // index of the first differing step when !steps_match
    Episode replayed;

    bool ok() const { return steps_match && record_match; }
};

/// Re-executes a traced episode and compares observations and metrics.
inline ReplayReport replay(const EpisodeTrace& t) {
    ReplayReport r;
    r.replayed = run_episode(t.scenario, t.planner, t.seed, t.mode);
    const auto& got = r.replayed.steps;
    r.steps_match = got == t.steps;
    if (!r.steps_match) {
        const auto n = std::min(got.size(), t.steps.size());
        r.first_divergence = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(got[i] == t.steps[i])) {
                r.first_divergence = i;
                break;
            }
        }
    }
    // Compare the persisted form so float formatting cannot cause a false mismatch.
    r.record_match = format_record(r.replayed.record, 0) == format_record(t.record, 0);
    return r;
}

}  // namespace touchloc
