#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "touchloc/workspace.hpp"

namespace touchloc {

/// Known target shape: one voxel-offset set per discrete orientation, and per
/// orientation the probe offset that completes the insertion.
struct ObjectTemplate {
    std::vector<std::vector<Cell>> rotations;
    std::vector<Cell> docks;

    std::size_t rotation_count() const noexcept { return rotations.size(); }
    std::size_t voxel_count() const { return rotations.empty() ? 0 : rotations.front().size(); }

    void validate() const {
        if (rotations.empty()) throw Error(ErrorKind::InvalidScenario, "template has no rotations");
        if (docks.size() != rotations.size()) {
            throw Error(ErrorKind::InvalidScenario, "template needs exactly one dock per rotation");
        }
        for (std::size_t r = 0; r < rotations.size(); ++r) {
            auto cells = rotations[r];
            if (cells.size() != voxel_count() || cells.empty()) {
                throw Error(ErrorKind::InvalidScenario, "template rotations differ in voxel count");
            }
            std::sort(cells.begin(), cells.end());
            if (std::adjacent_find(cells.begin(), cells.end()) != cells.end()) {
                throw Error(ErrorKind::InvalidScenario, "template rotation repeats a voxel");
            }
            if (std::binary_search(cells.begin(), cells.end(), docks[r])) {
                throw Error(ErrorKind::InvalidScenario, "dock offset lies inside the object");
            }
        }
        // Rotations with the same shape but different docks can never be told
        // apart by touch.
        for (std::size_t r = 0; r < rotations.size(); ++r) {
            for (std::size_t s = r + 1; s < rotations.size(); ++s) {
                auto a = rotations[r];
                auto b = rotations[s];
                std::sort(a.begin(), a.end());
                std::sort(b.begin(), b.end());
                if (a == b) {
                    throw Error(ErrorKind::InvalidScenario,
                                "two rotations share a shape; merge them or drop one");
                }
            }
        }
    }

    /// Largest center distance between two voxels of the object.
    double diameter() const {
        double best = 0.0;
        for (const auto& cells : rotations)
            for (const auto& a : cells)
                for (const auto& b : cells) best = std::max(best, squared_distance(a, b));
        return std::sqrt(best);
    }

    /// Largest bounding-box side over all rotations and axes.
    int max_extent() const {
        int best = 1;
        for (const auto& cells : rotations) {
            for (int axis = 0; axis < 3; ++axis) {
                auto [lo, hi] = std::minmax_element(cells.begin(), cells.end(),
                                                    [&](auto& a, auto& b) { return a[axis] < b[axis]; });
                best = std::max(best, (*hi)[axis] - (*lo)[axis] + 1);
            }
        }
        return best;
    }

    /// Builds `count` quarter-turn rotations about z from one base orientation.
    /// Every rotation is shifted so its voxel offsets start at zero on each axis.
    static ObjectTemplate planar_rotations(std::vector<Cell> base, Cell dock, int count) {
        ObjectTemplate t;
        for (int r = 0; r < count; ++r) {
            Cell lo = base.front();
            for (const auto& c : base)
                for (int axis = 0; axis < 3; ++axis) lo[axis] = std::min(lo[axis], c[axis]);
            std::vector<Cell> shifted;
            for (const auto& c : base) shifted.push_back(c - lo);
            t.rotations.push_back(shifted);
            t.docks.push_back(dock - lo);
            for (auto& c : base) c = {-c[1], c[0], c[2]};
            dock = {-dock[1], dock[0], dock[2]};
        }
        return t;
    }
};

}  // namespace touchloc
