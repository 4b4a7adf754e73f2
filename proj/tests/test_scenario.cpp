#include <sstream>

#include <gtest/gtest.h>

#include "touchloc/presets.hpp"
#include "touchloc/scenario.hpp"

using namespace touchloc;

namespace {

const char* kSmall = R"(format = touchloc-scenario/1
# comments and blank lines are ignored

id = small
dims = 12 12
probe = 0,0
rotation = 0,0 1,0 ; dock 0,-1
rotation = 0,0 0,1 ; dock -1,0
volume = 4,4 8,8
start = 6,1
true_pose = 5,5 r0
lengths = 1 2 4
delta = 6
planner.budget = 50
)";

Scenario parse(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in, "test");
}

ErrorKind kind_of(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Io;  // sentinel: nothing thrown
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
    text.replace(text.find(from), from.size(), to);
    return text;
}

}  // namespace

TEST(ScenarioFile, ParsesEveryField) {
    const auto sc = parse(kSmall);
    EXPECT_EQ(sc.id, "small");
    EXPECT_EQ(sc.world.grid.size(), 144u);
    EXPECT_EQ(sc.object.rotation_count(), 2u);
    EXPECT_EQ(sc.object.docks[1], (Cell{-1, 0, 0}));
    EXPECT_EQ(sc.volume.hi, (Cell{8, 8, 0}));
    EXPECT_EQ(sc.start.cell, (Cell{6, 1, 0}));
    ASSERT_TRUE(sc.true_pose.has_value());
    EXPECT_EQ(*sc.true_pose, (PoseHypothesis{{5, 5, 0}, 0}));
    EXPECT_EQ(sc.lengths, (std::vector<int>{1, 2, 4}));
    EXPECT_EQ(sc.volumetric_params().delta, 6u);
    EXPECT_EQ(sc.planner.budget, 50);
}

TEST(ScenarioFile, FormatRoundTrips) {
    for (const auto& sc : {parse(kSmall), shelf_scenario(), movable_scenario(), cube_scenario(), desk_scenario()}) {
        const auto text = format_scenario(sc);
        EXPECT_EQ(format_scenario(parse(text)), text) << sc.id;
    }
}

TEST(ScenarioFile, RejectsBadInput) {
    EXPECT_EQ(kind_of(replace(kSmall, "touchloc-scenario/1", "touchloc-scenario/9")), ErrorKind::InvalidScenario);
    EXPECT_EQ(kind_of(replace(kSmall, "format = touchloc-scenario/1\n", "")), ErrorKind::InvalidScenario);
    EXPECT_EQ(kind_of(replace(kSmall, "id = small", "colour = red")), ErrorKind::InvalidScenario);
    EXPECT_EQ(kind_of(replace(kSmall, "start = 6,1", "start = 6,x")), ErrorKind::InvalidScenario);
    EXPECT_EQ(kind_of(replace(kSmall, "start = 6,1\n", "")), ErrorKind::InvalidScenario);
    EXPECT_EQ(kind_of(replace(kSmall, " ; dock -1,0", "")), ErrorKind::InvalidScenario);
    EXPECT_EQ(kind_of(replace(kSmall, "lengths = 1 2 4", "lengths = 0 2")), ErrorKind::InvalidScenario);
    EXPECT_EQ(kind_of(replace(kSmall, "planner.budget = 50", "planner.budget = 0")), ErrorKind::InvalidScenario);
    // Truth outside the hypothesis volume, and truth overlapping the grid edge.
    EXPECT_EQ(kind_of(replace(kSmall, "true_pose = 5,5 r0", "true_pose = 8,8 r0")), ErrorKind::InvalidScenario);
    EXPECT_EQ(kind_of(replace(kSmall, "true_pose = 5,5 r0", "true_pose = 5,5 r7")), ErrorKind::InvalidScenario);
    // Rotations of different sizes.
    EXPECT_EQ(kind_of(replace(kSmall, "rotation = 0,0 0,1 ; dock", "rotation = 0,0 0,1 0,2 ; dock")),
              ErrorKind::InvalidScenario);
}

TEST(ScenarioFile, MissingFileIsIoError) {
    try {
        load_scenario("/nonexistent/scenario.txt");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

TEST(ObjectTemplateValidation, RejectsIndistinguishableRotations) {
    // A straight bar turned by 180 degrees occupies the same cells.
    const auto bar = ObjectTemplate::planar_rotations({{0, 0, 0}, {1, 0, 0}}, {0, -1, 0}, 4);
    EXPECT_THROW(bar.validate(), Error);
    const auto half = ObjectTemplate::planar_rotations({{0, 0, 0}, {1, 0, 0}}, {0, -1, 0}, 2);
    EXPECT_NO_THROW(half.validate());
    ObjectTemplate inside;
    inside.rotations = {{{0, 0, 0}, {1, 0, 0}}};
    inside.docks = {{1, 0, 0}};
    EXPECT_THROW(inside.validate(), Error);
}

TEST(ObjectTemplateValidation, PlanarRotationsAreNormalized) {
    const auto t = plug_template(4);
    for (const auto& cells : t.rotations) {
        Cell lo{100, 100, 100};
        for (const auto& c : cells)
            for (int a = 0; a < 3; ++a) lo[a] = std::min(lo[a], c[a]);
        EXPECT_EQ(lo, (Cell{0, 0, 0}));
    }
    EXPECT_EQ(t.voxel_count(), 4u);
    EXPECT_EQ(t.max_extent(), 3);
}

TEST(Truth, RandomTruthIsSeededAndAdmissible) {
    auto sc = parse(kSmall);
    sc.true_pose.reset();
    const auto poses = sc.admissible_truths();
    ASSERT_FALSE(poses.empty());
    for (std::uint64_t seed = 1; seed < 20; ++seed) {
        const auto h = sc.resolve_truth(seed);
        EXPECT_EQ(h, sc.resolve_truth(seed));
        EXPECT_TRUE(std::binary_search(poses.begin(), poses.end(), h));
        EXPECT_TRUE(pose_voxel_set(sc.world.grid, sc.object, h).subset_of(sc.initial_po()));
    }
}

TEST(Presets, AllValidate) {
    for (const auto& sc : default_scenarios()) EXPECT_NO_THROW(sc.validate()) << sc.id;
    EXPECT_NO_THROW(desk_scenario().validate());
    EXPECT_EQ(shelf_scenario().world.grid.size(), 2500u);
    EXPECT_EQ(shelf_scenario().object.rotation_count(), 4u);
    EXPECT_EQ(cube_scenario().world.grid.rank(), 3);
    EXPECT_THROW(preset_scenario("attic"), Error);
}

TEST(Presets, AutoParameters) {
    const auto sc = shelf_scenario();
    const auto p = sc.volumetric_params();
    EXPECT_EQ(p.n_object, 4);
    EXPECT_EQ(p.delta, 36u);
    EXPECT_GE(p.d_max, sc.object.diameter());
    EXPECT_FALSE(sc.initial_po().contains(sc.world.grid.index(sc.start.cell)));
}
