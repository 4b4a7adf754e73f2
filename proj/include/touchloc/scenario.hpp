#pragma once

// Scenario files: a versioned "key = value" text format. Lines starting with
// '#' are comments. Cells are written as comma-separated integers ("3,4" or
// "3,4,5"); lists are whitespace-separated.
//
//   format = touchloc-scenario/1
//   id = shelf
//   dims = 50 50
//   probe = 0,0
//   rotation = 0,0 1,0 2,0 1,1 ; dock 1,2      (repeat once per orientation)
//   volume = 15,15 34,34                       (inclusive box corners)
//   start = 24,8
//   true_pose = random | <x,y[,z]> r<rotation>
//   lengths = 1 2 3 4 6 8
//   delta = auto | <count>
//   d_max = auto | <real>
//   eps_hist = 0.1
//   planner.budget_kind = backups | ms
//   planner.budget = 200
//   planner.horizon = 50
//   planner.schedule_fraction = 0.5
//   planner.weight = 1
//   baseline.tbl_samples = 32
//   baseline.ig_epsilon = 1e-9
//   seed = 1

#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "touchloc/baselines.hpp"
#include "touchloc/particle_belief.hpp"
#include "touchloc/planner.hpp"
#include "touchloc/volumetric_belief.hpp"

namespace touchloc {

inline constexpr std::string_view kScenarioFormat = "touchloc-scenario/1";

struct Box {
    Cell lo{0, 0, 0};
    Cell hi{0, 0, 0};

    bool contains(const Cell& c) const {
        for (int a = 0; a < 3; ++a)
            if (c[a] < lo[a] || c[a] > hi[a]) return false;
        return true;
    }
    VoxelSet voxels(const GridWorkspace& grid) const {
        VoxelSet s(grid.size());
        for (int z = lo[2]; z <= hi[2]; ++z)
            for (int y = lo[1]; y <= hi[1]; ++y)
                for (int x = lo[0]; x <= hi[0]; ++x)
                    if (grid.contains({x, y, z})) s.insert(grid.index({x, y, z}));
        return s;
    }
    friend bool operator==(const Box&, const Box&) = default;
};

struct Scenario {
    std::string id = "scenario";
    World world;
    ObjectTemplate object;
    std::optional<PoseHypothesis> true_pose;  // nullopt: drawn from the run seed
    Box volume;
    Config start;
    std::vector<int> lengths{1, 2, 3, 4};
    std::optional<std::size_t> delta;
    std::optional<double> d_max;
    double eps_hist = 0.1;
    PlannerConfig planner;
    BaselineConfig baseline;
    std::uint64_t seed = 1;

    VolumetricParams volumetric_params() const {
        auto p = VolumetricParams::from_template(object, world.grid.rank());
        if (delta) p.delta = *delta;
        if (d_max) p.d_max = *d_max;
        p.eps_hist = eps_hist;
        return p;
    }

    /// Initial possibly-occupied set: the hypothesis volume minus the probe's own footprint.
    VoxelSet initial_po() const {
        return volume.voxels(world.grid) - probe_voxels(world.grid, start, world.probe);
    }

    /// Placeable poses lying wholly inside the hypothesis volume and clear of the start footprint.
    std::vector<PoseHypothesis> admissible_truths() const {
        return generate_hypotheses(world, initial_po(), {}, object);
    }

    PoseHypothesis resolve_truth(std::uint64_t run_seed) const {
        if (true_pose) return *true_pose;
        const auto poses = admissible_truths();
        std::mt19937_64 rng(run_seed * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
        std::uniform_int_distribution<std::size_t> pick(0, poses.size() - 1);
        return poses[pick(rng)];
    }

    void validate() const {
        world.probe.validate();
        object.validate();
        if (!footprint_fits(world.grid, start, world.probe)) {
            throw Error(ErrorKind::InvalidScenario, "start footprint is outside the grid");
        }
        if (lengths.empty()) throw Error(ErrorKind::InvalidScenario, "no action lengths");
        for (int l : lengths)
            if (l < 1) throw Error(ErrorKind::InvalidScenario, "action lengths must be >= 1");
        volumetric_params().validate(object.diameter());
        planner.validate();
        baseline.validate();
        if (true_pose) {
            if (true_pose->rotation < 0 ||
                true_pose->rotation >= static_cast<int>(object.rotation_count()) ||
                !pose_placeable(world, object, *true_pose)) {
                throw Error(ErrorKind::InvalidScenario, "true pose is not placeable");
            }
            if (!pose_voxel_set(world.grid, object, *true_pose).subset_of(initial_po())) {
                throw Error(ErrorKind::InvalidScenario,
                            "true pose must lie inside the hypothesis volume");
            }
        } else {
            (void)admissible_truths();  // throws NoFeasiblePose when nothing fits
        }
    }
};

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

inline int parse_int(const std::string& s) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidScenario, "expected integer, got '" + s + "'");
    }
    if (pos != s.size()) throw Error(ErrorKind::InvalidScenario, "expected integer, got '" + s + "'");
    return v;
}

inline double parse_real(const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidScenario, "expected number, got '" + s + "'");
    }
    if (pos != s.size()) throw Error(ErrorKind::InvalidScenario, "expected number, got '" + s + "'");
    return v;
}

inline Cell parse_cell(const std::string& s) {
    Cell c{0, 0, 0};
    std::size_t axis = 0;
    std::size_t begin = 0;
    while (true) {
        const auto comma = s.find(',', begin);
        if (axis >= 3) throw Error(ErrorKind::InvalidScenario, "too many coordinates in '" + s + "'");
        c[axis++] = parse_int(s.substr(begin, comma - begin));
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    if (axis < 2) throw Error(ErrorKind::InvalidScenario, "cell needs 2 or 3 coordinates: '" + s + "'");
    return c;
}

inline std::vector<Cell> parse_cells(const std::string& s) {
    std::vector<Cell> out;
    for (const auto& w : split_ws(s)) out.push_back(parse_cell(w));
    return out;
}

inline std::string format_cell(const Cell& c, int rank) {
    std::string s = std::to_string(c[0]) + "," + std::to_string(c[1]);
    if (rank == 3) s += "," + std::to_string(c[2]);
    return s;
}

/// Shortest text that parses back to the same double.
inline std::string format_real(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

inline Scenario parse_scenario(std::istream& in, const std::string& origin = "<stream>") {
    Scenario sc;
    bool saw_format = false;
    bool saw_dims = false;
    bool saw_volume = false;
    bool saw_start = false;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw Error(ErrorKind::InvalidScenario, origin + ":" + std::to_string(lineno) + ": " + msg);
    };
    auto bad = [](const std::string& msg) { throw Error(ErrorKind::InvalidScenario, msg); };
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        try {
            if (key == "format") {
                if (value != kScenarioFormat) bad("unsupported format '" + value + "'");
                saw_format = true;
            } else if (key == "id") {
                sc.id = value;
            } else if (key == "dims") {
                std::vector<int> dims;
                for (const auto& w : detail::split_ws(value)) dims.push_back(detail::parse_int(w));
                sc.world.grid = GridWorkspace(dims);
                saw_dims = true;
            } else if (key == "probe") {
                sc.world.probe.offsets = detail::parse_cells(value);
            } else if (key == "rotation") {
                const auto semi = value.find(';');
                if (semi == std::string::npos) bad("rotation needs '; dock x,y'");
                sc.object.rotations.push_back(detail::parse_cells(value.substr(0, semi)));
                const auto dock = detail::split_ws(value.substr(semi + 1));
                if (dock.size() != 2 || dock[0] != "dock") bad("rotation needs '; dock x,y'");
                sc.object.docks.push_back(detail::parse_cell(dock[1]));
            } else if (key == "volume") {
                const auto corners = detail::parse_cells(value);
                if (corners.size() != 2) bad("volume needs two corners");
                sc.volume = {corners[0], corners[1]};
                saw_volume = true;
            } else if (key == "start") {
                sc.start = {detail::parse_cell(value)};
                saw_start = true;
            } else if (key == "true_pose") {
                if (value == "random") {
                    sc.true_pose.reset();
                } else {
                    const auto parts = detail::split_ws(value);
                    if (parts.size() != 2 || parts[1].empty() || parts[1][0] != 'r') {
                        bad("true_pose must be 'random' or '<cell> r<rotation>'");
                    }
                    sc.true_pose = PoseHypothesis{detail::parse_cell(parts[0]),
                                                  detail::parse_int(parts[1].substr(1))};
                }
            } else if (key == "lengths") {
                sc.lengths.clear();
                for (const auto& w : detail::split_ws(value)) sc.lengths.push_back(detail::parse_int(w));
            } else if (key == "delta") {
                if (value == "auto") sc.delta.reset();
                else sc.delta = static_cast<std::size_t>(detail::parse_int(value));
            } else if (key == "d_max") {
                if (value == "auto") sc.d_max.reset();
                else sc.d_max = detail::parse_real(value);
            } else if (key == "eps_hist") {
                sc.eps_hist = detail::parse_real(value);
            } else if (key == "planner.budget_kind") {
                if (value == "backups") sc.planner.budget_kind = BudgetKind::Backups;
                else if (value == "ms") sc.planner.budget_kind = BudgetKind::Milliseconds;
                else bad("budget_kind must be 'backups' or 'ms'");
            } else if (key == "planner.budget") {
                sc.planner.budget = detail::parse_int(value);
            } else if (key == "planner.horizon") {
                sc.planner.horizon = detail::parse_int(value);
            } else if (key == "planner.schedule_fraction") {
                sc.planner.schedule_fraction = detail::parse_real(value);
            } else if (key == "planner.weight") {
                sc.planner.weight = detail::parse_real(value);
            } else if (key == "baseline.tbl_samples") {
                sc.baseline.tbl_samples = detail::parse_int(value);
            } else if (key == "baseline.ig_epsilon") {
                sc.baseline.ig_epsilon = detail::parse_real(value);
            } else if (key == "seed") {
                sc.seed = static_cast<std::uint64_t>(std::stoull(value));
            } else {
                bad("unknown key '" + key + "'");
            }
        } catch (const std::exception& e) {
            fail(e.what());
        }
    }
    if (!saw_format) fail("missing 'format = " + std::string(kScenarioFormat) + "'");
    if (!saw_dims || !saw_volume || !saw_start) fail("dims, volume and start are required");
    if (sc.object.rotations.empty()) fail("at least one rotation is required");
    sc.validate();
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open scenario file '" + path + "'");
    return parse_scenario(in, path);
}

inline std::string format_scenario(const Scenario& sc) {
    const int rank = sc.world.grid.rank();
    std::ostringstream out;
    out << "format = " << kScenarioFormat << "\n";
    out << "id = " << sc.id << "\n";
    out << "dims =";
    for (int a = 0; a < rank; ++a) out << ' ' << sc.world.grid.extent(a);
    out << "\nprobe =";
    for (const auto& o : sc.world.probe.offsets) out << ' ' << detail::format_cell(o, rank);
    out << "\n";
    for (std::size_t r = 0; r < sc.object.rotations.size(); ++r) {
        out << "rotation =";
        for (const auto& c : sc.object.rotations[r]) out << ' ' << detail::format_cell(c, rank);
        out << " ; dock " << detail::format_cell(sc.object.docks[r], rank) << "\n";
    }
    out << "volume = " << detail::format_cell(sc.volume.lo, rank) << ' '
        << detail::format_cell(sc.volume.hi, rank) << "\n";
    out << "start = " << detail::format_cell(sc.start.cell, rank) << "\n";
    out << "true_pose = ";
    if (sc.true_pose) {
        out << detail::format_cell(sc.true_pose->translation, rank) << " r" << sc.true_pose->rotation;
    } else {
        out << "random";
    }
    out << "\nlengths =";
    for (int l : sc.lengths) out << ' ' << l;
    out << "\ndelta = " << (sc.delta ? std::to_string(*sc.delta) : std::string("auto")) << "\n";
    out << "d_max = " << (sc.d_max ? detail::format_real(*sc.d_max) : std::string("auto")) << "\n";
    out << "eps_hist = " << detail::format_real(sc.eps_hist) << "\n";
    out << "planner.budget_kind = "
        << (sc.planner.budget_kind == BudgetKind::Backups ? "backups" : "ms") << "\n";
    out << "planner.budget = " << sc.planner.budget << "\n";
    out << "planner.horizon = " << sc.planner.horizon << "\n";
    out << "planner.schedule_fraction = " << detail::format_real(sc.planner.schedule_fraction) << "\n";
    out << "planner.weight = " << detail::format_real(sc.planner.weight) << "\n";
    out << "baseline.tbl_samples = " << sc.baseline.tbl_samples << "\n";
    out << "baseline.ig_epsilon = " << detail::format_real(sc.baseline.ig_epsilon) << "\n";
    out << "seed = " << sc.seed << "\n";
    return out.str();
}

/// T-shaped plug: a bar of three cells with a one-cell stem; the dock sits
/// against the stem tip.
inline ObjectTemplate plug_template(int rotations = 4) {
    return ObjectTemplate::planar_rotations({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {1, 1, 0}},
                                            {1, 2, 0}, rotations);
}

}  // namespace touchloc
