#pragma once

// Built-in desk-scale setups.

#include <string>
#include <vector>

#include "touchloc/scenario.hpp"

namespace touchloc {

/// 2D shelf analogue: unknown in-plane translation and four orientations.
inline Scenario shelf_scenario() {
    Scenario sc;
    sc.id = "shelf";
    sc.world.grid = GridWorkspace{50, 50};
    sc.world.probe = ProbeShape::box(1, 1);
    sc.object = plug_template(4);
    sc.volume = {{15, 15, 0}, {34, 34, 0}};
    sc.start = {{24, 10, 0}};
    sc.lengths = {1, 2, 3, 4, 6, 8, 12, 16};
    sc.planner.budget = 3000;
    return sc;
}

/// 2D movable-base analogue: a wider hypothesis volume.
inline Scenario movable_scenario() {
    Scenario sc = shelf_scenario();
    sc.id = "movable";
    sc.world.grid = GridWorkspace{60, 60};
    sc.volume = {{10, 10, 0}, {49, 49, 0}};
    sc.start = {{29, 4, 0}};
    sc.lengths = {1, 2, 4, 8, 16, 24};
    return sc;
}

/// 3D grid with translation-only uncertainty.
inline Scenario cube_scenario() {
    Scenario sc;
    sc.id = "cube";
    sc.world.grid = GridWorkspace{16, 16, 16};
    sc.world.probe = ProbeShape::box(1, 1, 1);
    sc.object.rotations = {{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}};
    sc.object.docks = {{0, 0, 1}};
    sc.volume = {{4, 4, 4}, {11, 11, 11}};
    sc.start = {{7, 7, 14}};
    sc.lengths = {1, 2, 3, 4, 6, 8};
    return sc;
}

/// Small 2D setup with an L-shaped plug, used for fast property suites.
inline Scenario desk_scenario() {
    Scenario sc;
    sc.id = "desk";
    sc.world.grid = GridWorkspace{20, 20};
    sc.world.probe = ProbeShape::box(1, 1);
    sc.object = ObjectTemplate::planar_rotations({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {2, 0, 0}, 4);
    sc.volume = {{5, 5, 0}, {14, 14, 0}};
    sc.start = {{9, 1, 0}};
    sc.lengths = {1, 2, 3, 4, 6, 8};
    sc.planner.budget = 60;
    return sc;
}

inline std::vector<Scenario> default_scenarios() {
    return {shelf_scenario(), movable_scenario(), cube_scenario()};
}

inline Scenario preset_scenario(const std::string& name) {
    if (name == "shelf") return shelf_scenario();
    if (name == "movable") return movable_scenario();
    if (name == "cube") return cube_scenario();
    if (name == "desk") return desk_scenario();
    throw Error(ErrorKind::InvalidScenario, "unknown preset '" + name + "'");
}

}  // namespace touchloc
