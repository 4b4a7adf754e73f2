#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "touchloc/workspace.hpp"

using namespace touchloc;

namespace {

Cell c2(int x, int y) { return {x, y, 0}; }

VoxelSet cells(const GridWorkspace& g, std::initializer_list<Cell> cs) {
    VoxelSet s(g.size());
    for (const auto& c : cs) s.insert(g.index(c));
    return s;
}

std::vector<Cell> members(const GridWorkspace& g, const VoxelSet& s) {
    std::vector<Cell> out;
    s.for_each([&](std::size_t i) { out.push_back(g.cell(i)); });
    return out;
}

const Direction kPlusX{0, 1};
const Direction kMinusX{0, -1};
const Direction kPlusY{1, 1};

}  // namespace

TEST(Grid, ExtentsAndIndexRoundTrip) {
    GridWorkspace g{4, 3, 2};
    EXPECT_EQ(g.size(), 24u);
    EXPECT_EQ(g.rank(), 3);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.index(g.cell(i)), i);
    EXPECT_FALSE(g.contains({4, 0, 0}));
    EXPECT_FALSE(g.contains({0, -1, 0}));
    EXPECT_THROW((GridWorkspace{0, 3}), Error);
}

TEST(VoxelSetOps, SetAlgebraIsExact) {
    GridWorkspace g{10, 10};
    auto a = cells(g, {c2(1, 1), c2(2, 2), c2(3, 3)});
    auto b = cells(g, {c2(2, 2), c2(4, 4)});
    EXPECT_EQ((a | b).count(), 4u);
    EXPECT_EQ((a & b).count(), 1u);
    EXPECT_EQ((a - b).count(), 2u);
    EXPECT_EQ(a.intersection_count(b), 1u);
    EXPECT_EQ(a.complement().count(), 97u);
    EXPECT_TRUE((a & b).subset_of(a));
    EXPECT_EQ(VoxelSet::full(70).count(), 70u);
}

TEST(DiscretizeAction, UnitSteps) {
    GridWorkspace g{10, 10};
    const auto d = discretize_action(g, ProbeShape{}, {c2(2, 2)}, {kPlusX, 3});
    ASSERT_EQ(d.steps(), 3);
    EXPECT_EQ(d.waypoints[0].cell, c2(3, 2));
    EXPECT_EQ(d.waypoints[1].cell, c2(4, 2));
    EXPECT_EQ(d.waypoints[2].cell, c2(5, 2));
    EXPECT_EQ(d.at(0).cell, c2(2, 2));
}

TEST(DiscretizeAction, ImmediatelyOutOfBoundsIsInvalid) {
    GridWorkspace g{10, 10};
    try {
        discretize_action(g, ProbeShape{}, {c2(0, 0)}, {kMinusX, 2});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidAction);
    }
}

TEST(DiscretizeAction, ClipsAtBoundary) {
    GridWorkspace g{10, 10};
    const auto d = discretize_action(g, ProbeShape{}, {c2(8, 0)}, {kPlusX, 5});
    ASSERT_EQ(d.steps(), 1);
    EXPECT_EQ(d.waypoints[0].cell, c2(9, 0));
    EXPECT_EQ(d.spec.length, 1);
}

TEST(DiscretizeAction, RejectsAxisBeyondRank) {
    GridWorkspace g{10, 10};
    EXPECT_THROW(discretize_action(g, ProbeShape{}, {c2(2, 2)}, {{2, 1}, 1}), Error);
}

TEST(ProbeVoxels, Footprints) {
    GridWorkspace g{10, 10};
    EXPECT_EQ(members(g, probe_voxels(g, {c2(2, 3)}, ProbeShape{})), std::vector<Cell>{c2(2, 3)});
    EXPECT_EQ(members(g, probe_voxels(g, {c2(4, 4)}, ProbeShape::box(2, 1))),
              (std::vector<Cell>{c2(4, 4), c2(5, 4)}));
    EXPECT_EQ(members(g, probe_voxels(g, {c2(0, 0)}, ProbeShape{})), std::vector<Cell>{c2(0, 0)});
}

TEST(SweptVoxels, Examples) {
    GridWorkspace g{10, 10};
    const auto a = discretize_action(g, ProbeShape{}, {c2(2, 2)}, {kPlusX, 2});
    EXPECT_EQ(members(g, swept_voxels(g, a, ProbeShape{})), (std::vector<Cell>{c2(3, 2), c2(4, 2)}));

    const auto b = discretize_action(g, ProbeShape::box(2, 1), {c2(0, 0)}, {kPlusX, 1});
    EXPECT_EQ(members(g, swept_voxels(g, b, ProbeShape::box(2, 1))),
              (std::vector<Cell>{c2(1, 0), c2(2, 0)}));

    const auto c = discretize_action(g, ProbeShape{}, {c2(0, 1)}, {kPlusX, 3});
    EXPECT_EQ(swept_voxels(g, c, ProbeShape{}).count(), 3u);
}

TEST(SweptVoxels, MatchesBruteForceUnion) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const int rank = 2 + static_cast<int>(rng() % 2);
        GridWorkspace g = rank == 3 ? GridWorkspace{12, 11, 10} : GridWorkspace{20, 17};
        const auto shape = ProbeShape::box(1 + rng() % 3, 1 + rng() % 2, rank == 3 ? 1 + rng() % 2 : 1);
        Config q{{static_cast<int>(rng() % 8), static_cast<int>(rng() % 8),
                  rank == 3 ? static_cast<int>(rng() % 8) : 0}};
        const Direction dir = Direction::from_order(static_cast<int>(rng() % (2 * rank)));
        const int len = 1 + static_cast<int>(rng() % 12);
        DiscretizedAction d;
        try {
            d = discretize_action(g, shape, q, {dir, len});
        } catch (const Error&) {
            continue;
        }
        VoxelSet brute(g.size());
        Cell cur = q.cell;
        for (int i = 0; i < d.steps(); ++i) {
            cur = cur + dir.step();
            for (const auto& o : shape.offsets) brute.insert(g.index(cur + o));
        }
        EXPECT_EQ(swept_voxels(g, d, shape), brute);
    }
}

TEST(ContactSurface, Examples) {
    GridWorkspace g{10, 10};
    EXPECT_EQ(members(g, contact_surface(g, {c2(4, 2)}, kPlusX, ProbeShape{})),
              std::vector<Cell>{c2(5, 2)});
    EXPECT_EQ(members(g, contact_surface(g, {c2(3, 3)}, kPlusY, ProbeShape::box(2, 2))),
              (std::vector<Cell>{c2(3, 5), c2(4, 5)}));
    try {
        contact_surface(g, {c2(9, 0)}, kPlusX, ProbeShape{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptySurface);
    }
}

TEST(ContactSurface, LeadingFaceIsOneStepBeyondFootprint) {
    GridWorkspace g{12, 12, 12};
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto shape = ProbeShape::box(1 + rng() % 3, 1 + rng() % 3, 1 + rng() % 2);
        Config q{{static_cast<int>(rng() % 9), static_cast<int>(rng() % 9), static_cast<int>(rng() % 9)}};
        const Direction dir = Direction::from_order(static_cast<int>(rng() % 6));
        if (!footprint_fits(g, q, shape)) continue;
        VoxelSet s;
        try {
            s = contact_surface(g, q, dir, shape);
        } catch (const Error&) {
            continue;
        }
        const auto fp = probe_voxels(g, q, shape);
        EXPECT_FALSE(s.intersects(fp));
        Config next{q.cell + dir.step()};
        VoxelSet next_fp(g.size());
        for (const auto& o : shape.offsets)
            if (g.contains(next.cell + o)) next_fp.insert(g.index(next.cell + o));
        EXPECT_TRUE(s.subset_of(next_fp));
    }
}

TEST(EliminationSet, DistanceThreshold) {
    GridWorkspace g{11, 11};
    const auto u = elimination_set(g, cells(g, {c2(5, 5)}), 2.0);
    EXPECT_TRUE(u.contains(g.index(c2(8, 5))));
    EXPECT_FALSE(u.contains(g.index(c2(5, 7))));
    EXPECT_TRUE(elimination_set(g, cells(g, {c2(5, 5)}), 15.0).empty());
    EXPECT_TRUE(elimination_set(g, VoxelSet::full(g.size()), 1.0).empty());
}

TEST(EliminationSet, MatchesBruteForceAndIsAntitone) {
    GridWorkspace g{14, 13};
    std::mt19937 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        VoxelSet s(g.size());
        const int n = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) s.insert(rng() % g.size());
        const double d1 = 0.5 + (rng() % 50) / 10.0;
        const double d2 = d1 + (rng() % 30) / 10.0;
        VoxelSet brute(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            double best = 1e18;
            s.for_each([&](std::size_t j) { best = std::min(best, squared_distance(g.cell(i), g.cell(j))); });
            if (std::sqrt(best) > d1) brute.insert(i);
        }
        EXPECT_EQ(elimination_set(g, s, d1), brute);
        EXPECT_TRUE(elimination_set(g, s, d2).subset_of(elimination_set(g, s, d1)));
    }
}

TEST(SetDistance, Examples) {
    GridWorkspace g{10, 10};
    EXPECT_DOUBLE_EQ(set_distance(g, cells(g, {c2(0, 0)}), cells(g, {c2(3, 4)})), 5.0);
    EXPECT_DOUBLE_EQ(set_distance(g, cells(g, {c2(0, 0), c2(1, 1)}), cells(g, {c2(1, 1)})), 0.0);
    EXPECT_DOUBLE_EQ(set_distance(g, cells(g, {c2(0, 0)}), cells(g, {c2(0, 2)})), 2.0);
    try {
        set_distance(g, VoxelSet(g.size()), cells(g, {c2(0, 2)}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
    }
}

TEST(SetDistance, SymmetricAndZeroIffIntersecting) {
    GridWorkspace g{9, 9};
    std::mt19937 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        VoxelSet a(g.size());
        VoxelSet b(g.size());
        for (int i = 0; i < 1 + static_cast<int>(rng() % 3); ++i) a.insert(rng() % g.size());
        for (int i = 0; i < 1 + static_cast<int>(rng() % 3); ++i) b.insert(rng() % g.size());
        const double ab = set_distance(g, a, b);
        EXPECT_DOUBLE_EQ(ab, set_distance(g, b, a));
        EXPECT_EQ(ab == 0.0, a.intersects(b));
    }
}

TEST(Actions, CanonicalOrder) {
    EXPECT_TRUE(action_order_less({kMinusX, 1}, {kPlusX, 2}));
    EXPECT_TRUE(action_order_less({kPlusX, 2}, {kMinusX, 2}));
    EXPECT_FALSE(action_order_less({kPlusY, 2}, {kMinusX, 2}));
    EXPECT_EQ(parse_direction("-y"), (Direction{1, -1}));
    EXPECT_THROW(parse_direction("+w"), Error);
}

TEST(Observations, CanonicalOrderPutsFreeFirst) {
    EXPECT_TRUE(outcome_order_less({false, 5}, {true, 0}));
    EXPECT_TRUE(outcome_order_less({true, 0}, {true, 2}));
    EXPECT_FALSE(outcome_order_less({true, 2}, {false, 1}));
}
