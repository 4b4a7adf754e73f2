#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "touchloc/harness.hpp"
#include "touchloc/presets.hpp"

using namespace touchloc;
namespace fs = std::filesystem;

namespace {

Cell c2(int x, int y) { return {x, y, 0}; }

ObjectTemplate bar2() {
    ObjectTemplate t;
    t.rotations = {{c2(0, 0), c2(1, 0)}, {c2(0, 0), c2(0, 1)}};
    t.docks = {c2(0, -1), c2(-1, 0)};
    return t;
}

// 20x20 grid, 2x1 plug, 10x10 hypothesis volume.
Scenario bar_scenario() {
    Scenario sc;
    sc.id = "bar";
    sc.world = {GridWorkspace{20, 20}, ProbeShape{}};
    sc.object = bar2();
    sc.volume = {c2(5, 5), c2(14, 14)};
    sc.start = {c2(9, 1)};
    sc.lengths = {1, 2, 4, 8};
    sc.planner.budget = 80;
    return sc;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "touchloc_harness_test";
    fs::create_directories(dir);
    const auto p = dir / name;
    fs::remove(p);
    return p;
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

}  // namespace

TEST(SimulateObservation, SameFunctionAsTheParticlePredictor) {
    std::mt19937 rng(1);
    const World w{GridWorkspace{14, 14}, ProbeShape{}};
    const auto t = plug_template(4);
    int checked = 0;
    while (checked < 1000) {
        const PoseHypothesis h{c2(rng() % 11, rng() % 11), static_cast<int>(rng() % 4)};
        const Config q{c2(rng() % 14, rng() % 14)};
        const auto cells = pose_voxels(t, h);
        if (std::find(cells.begin(), cells.end(), q.cell) != cells.end()) continue;
        const ActionSpec a{Direction::from_order(static_cast<int>(rng() % 4)), 1 + static_cast<int>(rng() % 8)};
        DiscretizedAction da;
        try {
            da = discretize_action(w.grid, w.probe, q, a);
        } catch (const Error&) {
            continue;
        }
        const auto obs = simulate_observation(w, t, h, q, a);
        EXPECT_EQ(obs, expected_observation(t, h, da, w.probe));
        EXPECT_EQ(obs, simulate_observation(w, t, h, q, a));
        ++checked;
    }
}

TEST(RunEpisode, VolumeEqualToTruthDocksDirectly) {
    Scenario sc;
    sc.id = "tight";
    sc.world = {GridWorkspace{10, 10}, ProbeShape{}};
    sc.object = bar2();
    sc.volume = {c2(4, 4), c2(5, 4)};
    sc.start = {c2(1, 1)};
    sc.true_pose = PoseHypothesis{c2(4, 4), 0};
    sc.validate();
    const auto ep = run_episode(sc, PlannerKind::Rtdp, 1);
    EXPECT_TRUE(ep.record.success) << ep.record.failure;
    EXPECT_EQ(ep.record.phase1_steps, 0);
    EXPECT_EQ(ep.record.phase2_steps, 0);
    EXPECT_EQ(ep.record.initial_h, 1);
    EXPECT_DOUBLE_EQ(ep.record.cost, 5.0);  // (1,1) -> dock (4,3)
    EXPECT_DOUBLE_EQ(ep.record.dock_cost, 5.0);
}

TEST(RunEpisode, EveryPlannerSucceedsWithoutLosingTheTruth) {
    const auto sc = bar_scenario();
    sc.validate();
    for (auto kind : {PlannerKind::Rtdp, PlannerKind::RtdpInadmissible, PlannerKind::Tbl, PlannerKind::Frontier}) {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            const auto ep = run_episode(sc, kind, seed);
            EXPECT_TRUE(ep.record.success) << planner_name(kind) << " seed " << seed << ": " << ep.record.failure;
            EXPECT_EQ(ep.record.violations, 0);
            EXPECT_GE(ep.record.initial_h, ep.record.final_h);
        }
    }
}

TEST(RunEpisode, CostIsTheSumOfTravel) {
    const auto ep = run_episode(bar_scenario(), PlannerKind::Rtdp, 3);
    double travel = 0.0;
    double by_phase[4] = {0, 0, 0, 0};
    for (const auto& s : ep.steps) {
        travel += s.obs.rest;
        by_phase[s.phase] += s.obs.rest;
    }
    EXPECT_DOUBLE_EQ(ep.record.cost, travel);
    EXPECT_DOUBLE_EQ(ep.record.phase1_cost, by_phase[1]);
    EXPECT_DOUBLE_EQ(ep.record.phase2_cost, by_phase[2]);
    EXPECT_DOUBLE_EQ(ep.record.dock_cost, by_phase[3]);
}

TEST(RunEpisode, SeparatePhasesSucceed) {
    const auto sc = bar_scenario();
    for (auto mode : {EpisodeMode::Volumetric, EpisodeMode::Particle}) {
        for (auto kind : {PlannerKind::Rtdp, PlannerKind::Tbl}) {
            const auto ep = run_episode(sc, kind, 2, mode);
            EXPECT_TRUE(ep.record.success) << mode_name(mode) << " " << ep.record.failure;
            EXPECT_EQ(ep.record.mode, mode_name(mode));
            EXPECT_EQ(mode == EpisodeMode::Volumetric ? ep.record.phase2_steps : ep.record.phase1_steps, 0);
        }
    }
}

TEST(RunEpisode, DeterministicUnderBackupBudgets) {
    const auto sc = bar_scenario();
    for (auto kind : {PlannerKind::Rtdp, PlannerKind::Tbl}) {
        const auto a = run_episode(sc, kind, 7);
        const auto b = run_episode(sc, kind, 7);
        EXPECT_EQ(format_record(a.record, 0), format_record(b.record, 0));
        EXPECT_EQ(a.steps, b.steps);
    }
}

TEST(Records, RowRoundTrip) {
    const auto ep = run_episode(bar_scenario(), PlannerKind::Frontier, 5);
    const auto row = format_record(ep.record, 42);
    const auto [id, back] = parse_record(row);
    EXPECT_EQ(id, 42);
    EXPECT_EQ(format_record(back, 42), row);
    EXPECT_THROW(parse_record("1,2,3"), Error);
}

TEST(Aggregate, Examples) {
    RunRecord a;
    a.scenario = "s";
    a.planner = "rtdp";
    a.cost = 10.0;
    a.effort = 100;
    a.iterations = 4;
    RunRecord b = a;
    b.planner = "tbl";
    b.cost = 21.2;
    b.effort = 10;
    b.iterations = 10;

    const auto self = aggregate({a});
    ASSERT_EQ(self.rows.size(), 1u);
    EXPECT_DOUBLE_EQ(self.rows[0].cost, 1.0);
    EXPECT_DOUBLE_EQ(self.rows[0].total_effort, 1.0);
    EXPECT_DOUBLE_EQ(self.rows[0].effort_per_iteration, 1.0);

    const auto t = aggregate({a, b});
    EXPECT_NEAR(t.row("tbl").cost, 2.12, 1e-12);
    EXPECT_NEAR(t.row("tbl").total_effort, 0.1, 1e-12);
    EXPECT_NEAR(t.row("tbl").iterations, 2.5, 1e-12);
    EXPECT_NEAR(t.row("tbl").effort_per_iteration, (10.0 / 10.0) / (100.0 / 4.0), 1e-12);
    EXPECT_EQ(t.rows.front().planner, "rtdp");

    try {
        aggregate({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
    }
    RunRecord other = b;
    other.seed = 99;
    try {
        aggregate({a, other});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MismatchedScenarioSets);
    }
}

TEST(Suite, CountsAppendsAndKeepsRows) {
    auto sc = bar_scenario();
    sc.planner.budget = 20;
    const auto results = scratch("results.csv");
    const auto summary = scratch("summary.txt");
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
    const std::vector<PlannerKind> planners{PlannerKind::Rtdp, PlannerKind::Tbl, PlannerKind::Frontier};

    const auto first = run_suite({sc}, planners, seeds, results.string(), summary.string());
    EXPECT_EQ(first.records.size(), 30u);
    EXPECT_EQ(first.run_id, 1);
    EXPECT_EQ(count_lines(results), 31u);
    EXPECT_DOUBLE_EQ(first.table.row("rtdp").cost, 1.0);

    const auto second = run_suite({sc}, planners, seeds, results.string(), summary.string());
    EXPECT_EQ(second.run_id, 2);
    const auto rows = read_records(results.string());
    ASSERT_EQ(rows.size(), 60u);
    for (std::size_t i = 0; i < 30; ++i) {
        EXPECT_EQ(rows[i].first, 1);
        EXPECT_EQ(format_record(rows[i].second, 0), format_record(rows[i + 30].second, 0));
    }
    EXPECT_GT(count_lines(summary), 0u);
}

TEST(Suite, UnwritablePathIsIoError) {
    try {
        run_suite({bar_scenario()}, {PlannerKind::Tbl}, {1}, "/nonexistent/dir/results.csv", "");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

TEST(Ablation, IdenticalSchedulesGiveIdenticalRows) {
    auto sc = bar_scenario();
    sc.planner.schedule_fraction = 0.0;
    const auto results = scratch("ablation.csv");
    const auto r = ablation_heuristics({sc}, {1, 2, 3}, results.string(), "");
    const auto& inad = r.table.row("rtdp-inad");
    EXPECT_DOUBLE_EQ(inad.cost, 1.0);
    EXPECT_DOUBLE_EQ(inad.total_effort, 1.0);
    EXPECT_DOUBLE_EQ(inad.effort_per_iteration, 1.0);
}
