#pragma once

// Phase-2 belief: a uniform set of discrete target poses. Each pose predicts
// exactly one observation per action, so a transition partitions the set.

#include <algorithm>
#include <array>
#include <compare>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "touchloc/object_template.hpp"
#include "touchloc/volumetric_belief.hpp"
#include "touchloc/workspace.hpp"

namespace touchloc {

struct PoseHypothesis {
    Cell translation{0, 0, 0};
    int rotation = 0;

    friend auto operator<=>(const PoseHypothesis&, const PoseHypothesis&) = default;
};

inline std::vector<Cell> pose_voxels(const ObjectTemplate& t, const PoseHypothesis& h) {
    std::vector<Cell> cells;
    cells.reserve(t.rotations[h.rotation].size());
    for (const auto& o : t.rotations[h.rotation]) cells.push_back(h.translation + o);
    return cells;
}

inline VoxelSet pose_voxel_set(const GridWorkspace& grid, const ObjectTemplate& t,
                               const PoseHypothesis& h) {
    VoxelSet s(grid.size());
    for (const auto& c : pose_voxels(t, h)) s.insert(grid.index(c));
    return s;
}

inline Config dock_config(const ObjectTemplate& t, const PoseHypothesis& h) {
    return {h.translation + t.docks[h.rotation]};
}

/// A pose is placeable when the object is in the grid and the probe fits at
/// its dock without touching it.
inline bool pose_placeable(const World& world, const ObjectTemplate& t, const PoseHypothesis& h) {
    const auto cells = pose_voxels(t, h);
    if (!std::all_of(cells.begin(), cells.end(), [&](auto& c) { return world.grid.contains(c); })) {
        return false;
    }
    const Config dock = dock_config(t, h);
    if (!footprint_fits(world.grid, dock, world.probe)) return false;
    for (const auto& o : world.probe.offsets) {
        if (std::find(cells.begin(), cells.end(), dock.cell + o) != cells.end()) return false;
    }
    return true;
}

struct ParticleBelief {
    Config q;
    std::vector<PoseHypothesis> hypotheses;  // sorted, unique

    friend bool operator==(const ParticleBelief&, const ParticleBelief&) = default;
};

struct ParticleOutcome {
    Observation obs;
    Config config;
    double probability = 0.0;
    ParticleBelief successor;
};

/// Every placeable pose whose voxels lie inside `po` and touch the contact
/// surface of every recorded collision, in canonical (translation, rotation) order.
inline std::vector<PoseHypothesis> generate_hypotheses(const World& world, const VoxelSet& po,
                                                       const std::vector<CollisionRecord>& history,
                                                       const ObjectTemplate& t) {
    std::vector<PoseHypothesis> out;
    if (!po.empty()) {
        Cell lo{world.grid.extent(0), world.grid.extent(1), world.grid.extent(2)};
        Cell hi{-1, -1, -1};
        po.for_each([&](std::size_t i) {
            const Cell c = world.grid.cell(i);
            for (int axis = 0; axis < 3; ++axis) {
                lo[axis] = std::min(lo[axis], c[axis]);
                hi[axis] = std::max(hi[axis], c[axis]);
            }
        });
        std::vector<VoxelSet> surfaces;
        for (const auto& r : history) {
            surfaces.push_back(contact_surface(world.grid, r.config, r.action.dir, world.probe));
        }
        for (int r = 0; r < static_cast<int>(t.rotation_count()); ++r) {
            Cell omin = t.rotations[r].front();
            Cell omax = omin;
            for (const auto& o : t.rotations[r]) {
                for (int axis = 0; axis < 3; ++axis) {
                    omin[axis] = std::min(omin[axis], o[axis]);
                    omax[axis] = std::max(omax[axis], o[axis]);
                }
            }
            for (int z = lo[2] - omin[2]; z <= hi[2] - omax[2]; ++z)
                for (int y = lo[1] - omin[1]; y <= hi[1] - omax[1]; ++y)
                    for (int x = lo[0] - omin[0]; x <= hi[0] - omax[0]; ++x) {
                        const PoseHypothesis h{{x, y, z}, r};
                        if (!pose_placeable(world, t, h)) continue;
                        const VoxelSet cells = pose_voxel_set(world.grid, t, h);
                        if (!cells.subset_of(po)) continue;
                        if (!std::all_of(surfaces.begin(), surfaces.end(),
                                         [&](const VoxelSet& s) { return s.intersects(cells); })) {
                            continue;
                        }
                        out.push_back(h);
                    }
        }
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw Error(ErrorKind::NoFeasiblePose, "no pose fits the remaining volume");
    return out;
}

/// Observation the action would produce if the target sat at pose h.
inline Observation expected_observation(const ObjectTemplate& t, const PoseHypothesis& h,
                                        const DiscretizedAction& action, const ProbeShape& shape) {
    const auto cells = pose_voxels(t, h);
    const int axis = action.spec.dir.axis;
    const int sign = action.spec.dir.sign;
    const Cell start = action.start.cell;
    int first_entry = action.steps() + 1;  // smallest k+1 whose footprint overlaps the object
    for (const auto& o : shape.offsets) {
        const Cell p = start + o;
        for (const auto& c : cells) {
            bool aligned = true;
            for (int other = 0; other < 3; ++other) {
                if (other != axis && c[other] != p[other]) aligned = false;
            }
            if (!aligned) continue;
            const int along = (c[axis] - p[axis]) * sign;
            if (along == 0) throw Error(ErrorKind::StartInCollision, "probe starts inside the object");
            if (along > 0) first_entry = std::min(first_entry, along);
        }
    }
    if (first_entry <= action.steps()) return {true, first_entry - 1};
    return {false, action.steps()};
}

/// Groups the hypotheses by predicted observation; probabilities are group fractions.
inline std::vector<ParticleOutcome> partition_by_observation(const ObjectTemplate& t,
                                                             const ProbeShape& shape,
                                                             const ParticleBelief& b,
                                                             const DiscretizedAction& action) {
    // Observation's natural order is the canonical outcome order.
    std::map<Observation, std::vector<PoseHypothesis>> groups;
    for (const auto& h : b.hypotheses) groups[expected_observation(t, h, action, shape)].push_back(h);
    std::vector<ParticleOutcome> out;
    const double total = static_cast<double>(b.hypotheses.size());
    for (auto& [obs, members] : groups) {
        const Config rest = action.at(obs.rest);
        const double p = static_cast<double>(members.size()) / total;
        out.push_back({obs, rest, p, ParticleBelief{rest, std::move(members)}});
    }
    return out;
}

inline std::optional<Config> shared_dock(const ObjectTemplate& t, const ParticleBelief& b) {
    if (b.hypotheses.empty()) return std::nullopt;
    const Config dock = dock_config(t, b.hypotheses.front());
    for (const auto& h : b.hypotheses) {
        if (dock_config(t, h) != dock) return std::nullopt;
    }
    return dock;
}

inline bool is_goal(const ParticleBelief& b, const ObjectTemplate& t) {
    const auto dock = shared_dock(t, b);
    return dock && *dock == b.q;
}

/// Axis-aligned route from `from` to `to` whose footprints avoid `blocked`.
/// Tries axis orders x-y-z first, then the other permutations, then a
/// breadth-first search; returns nullopt when no route exists.
inline std::optional<std::vector<ActionSpec>> axis_route(const World& world, const Config& from,
                                                         const Config& to,
                                                         const VoxelSet& blocked) {
    const int rank = world.grid.rank();
    const auto free_at = [&](const Cell& c) {
        if (!footprint_fits(world.grid, {c}, world.probe)) return false;
        for (const auto& o : world.probe.offsets) {
            if (blocked.contains(world.grid.index(c + o))) return false;
        }
        return true;
    };
    std::array<int, 3> order{0, 1, 2};
    do {
        if (rank == 2 && order[2] != 2) continue;
        std::vector<ActionSpec> route;
        Cell c = from.cell;
        bool ok = true;
        for (int i = 0; i < rank && ok; ++i) {
            const int axis = order[i];
            const int delta = to.cell[axis] - c[axis];
            if (delta == 0) continue;
            const Direction dir{axis, delta > 0 ? 1 : -1};
            for (int s = 0; s < std::abs(delta) && ok; ++s) {
                c = c + dir.step();
                ok = free_at(c);
            }
            route.push_back({dir, std::abs(delta)});
        }
        if (ok) return route;
    } while (std::next_permutation(order.begin(), order.end()));

    // Fallback: shortest grid path, compressed into straight runs.
    std::vector<int> parent(world.grid.size(), -1);
    std::deque<std::size_t> frontier{world.grid.index(from.cell)};
    parent[frontier.front()] = static_cast<int>(frontier.front());
    const auto goal = world.grid.index(to.cell);
    while (!frontier.empty() && parent[goal] < 0) {
        const auto cur = frontier.front();
        frontier.pop_front();
        for (int d = 0; d < 2 * rank; ++d) {
            const Cell n = world.grid.cell(cur) + Direction::from_order(d).step();
            if (!world.grid.contains(n) || !free_at(n)) continue;
            const auto ni = world.grid.index(n);
            if (parent[ni] >= 0) continue;
            parent[ni] = static_cast<int>(cur);
            frontier.push_back(ni);
        }
    }
    if (parent[goal] < 0) return std::nullopt;
    std::vector<Cell> path;
    for (auto i = goal; i != world.grid.index(from.cell); i = parent[i]) path.push_back(world.grid.cell(i));
    path.push_back(from.cell);
    std::reverse(path.begin(), path.end());
    std::vector<ActionSpec> route;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const Cell d = path[i] - path[i - 1];
        Direction dir{};
        for (int axis = 0; axis < 3; ++axis)
            if (d[axis] != 0) dir = {axis, d[axis]};
        if (!route.empty() && route.back().dir == dir) {
            ++route.back().length;
        } else {
            route.push_back({dir, 1});
        }
    }
    return route;
}

inline VoxelSet hypotheses_union(const GridWorkspace& grid, const ObjectTemplate& t,
                                 const std::vector<PoseHypothesis>& hs) {
    VoxelSet u(grid.size());
    for (const auto& h : hs) u |= pose_voxel_set(grid, t, h);
    return u;
}

/// Moves that bring the probe to the dock shared by every hypothesis without
/// touching any of them.
inline std::vector<ActionSpec> dock_action(const World& world, const ObjectTemplate& t,
                                           const ParticleBelief& b) {
    const auto dock = shared_dock(t, b);
    if (!dock) throw Error(ErrorKind::AmbiguousGoal, "hypotheses disagree on the dock");
    auto route = axis_route(world, b.q, *dock, hypotheses_union(world.grid, t, b.hypotheses));
    if (!route) throw Error(ErrorKind::DeadEnd, "dock is unreachable");
    return *route;
}

inline int route_length(const std::vector<ActionSpec>& route) {
    int n = 0;
    for (const auto& a : route) n += a.length;
    return n;
}

}  // namespace touchloc
