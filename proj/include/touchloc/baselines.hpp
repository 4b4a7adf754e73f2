#pragma once

// Greedy one-step comparison planners. TBL executes the best of K sampled
// actions by information gain; Frontier executes the cheapest action with any
// information gain at all.

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <vector>

#include "touchloc/belief_models.hpp"

namespace touchloc {

struct BaselineConfig {
    int tbl_samples = 32;
    std::uint64_t seed = 0;
    double ig_epsilon = 1e-9;

    void validate() const {
        if (tbl_samples < 1) throw Error(ErrorKind::InvalidScenario, "tbl_samples must be >= 1");
        if (ig_epsilon <= 0.0) throw Error(ErrorKind::InvalidScenario, "ig_epsilon must be > 0");
    }
};

template <typename Belief>
double information_gain(double prior_size, const std::vector<Transition<Belief>>& ts,
                        const auto& size_of) {
    const double before = std::log2(std::max(1.0, prior_size));
    double after = 0.0;
    for (const auto& t : ts) after += t.probability * std::log2(std::max(1.0, size_of(t.successor)));
    return std::max(0.0, before - after);
}

/// Expected entropy reduction of the uniform belief, in bits.
template <BeliefModel Model>
double information_gain(const Model& model, const typename Model::Belief& b, const ActionSpec& a) {
    return information_gain(model.uncertainty(b), model.transitions(b, a),
                            [&](const auto& s) { return model.uncertainty(s); });
}

struct BaselineStep {
    ActionSpec action;
    double gain = 0.0;
    long evaluations = 0;
};

/// Used when no action from the current configuration is informative: the
/// first straight leg of a shortest known-free path to the nearest
/// configuration that has an informative action.
template <BeliefModel Model>
BaselineStep reposition_step(const Model& model, const typename Model::Belief& b,
                             const BaselineConfig& config) {
    const World& world = model.world();
    const auto& grid = world.grid;
    const VoxelSet occupied = model.possibly_occupied(b);
    const auto free_at = [&](const Cell& c) {
        if (!footprint_fits(grid, {c}, world.probe)) return false;
        for (const auto& o : world.probe.offsets)
            if (occupied.contains(grid.index(c + o))) return false;
        return true;
    };
    BaselineStep step{};
    std::vector<long> parent(grid.size(), -1);
    std::deque<std::size_t> frontier{grid.index(b.q.cell)};
    parent[frontier.front()] = static_cast<long>(frontier.front());
    std::optional<std::size_t> target;
    while (!frontier.empty() && !target) {
        const auto cur = frontier.front();
        frontier.pop_front();
        if (cur != grid.index(b.q.cell)) {
            auto moved = b;
            moved.q = Config{grid.cell(cur)};
            for (const auto& a : model.actions(moved)) {
                ++step.evaluations;
                if (information_gain(model, moved, a) >= config.ig_epsilon) {
                    target = cur;
                    break;
                }
            }
            if (target) break;
        }
        for (int d = 0; d < 2 * grid.rank(); ++d) {
            const Cell n = grid.cell(cur) + Direction::from_order(d).step();
            if (!grid.contains(n) || !free_at(n)) continue;
            const auto ni = grid.index(n);
            if (parent[ni] >= 0) continue;
            parent[ni] = static_cast<long>(cur);
            frontier.push_back(ni);
        }
    }
    if (!target) throw Error(ErrorKind::NoInformativeAction, "no reachable informative configuration");
    std::vector<std::size_t> path{*target};
    while (path.back() != grid.index(b.q.cell)) path.push_back(static_cast<std::size_t>(parent[path.back()]));
    std::reverse(path.begin(), path.end());
    const Cell first = grid.cell(path[1]) - grid.cell(path[0]);
    Direction dir{};
    for (int axis = 0; axis < 3; ++axis)
        if (first[axis] != 0) dir = {axis, first[axis]};
    int run = 0;
    while (run + 1 < static_cast<int>(path.size()) &&
           grid.cell(path[run + 1]) - grid.cell(path[run]) == first) {
        ++run;
    }
    step.action = {dir, run};
    return step;
}

template <BeliefModel Model>
BaselineStep tbl_step(const Model& model, const typename Model::Belief& b,
                      const BaselineConfig& config, std::mt19937_64& rng) {
    const auto actions = model.actions(b);
    if (actions.empty()) throw Error(ErrorKind::NoInformativeAction, "no valid action");
    BaselineStep best{};
    bool found = false;
    const auto consider = [&](const ActionSpec& a) {
        const double g = information_gain(model, b, a);
        ++best.evaluations;
        if (!found || g > best.gain || (g == best.gain && action_order_less(a, best.action))) {
            best.action = a;
            best.gain = g;
            found = true;
        }
    };
    std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
    for (int i = 0; i < config.tbl_samples; ++i) consider(actions[pick(rng)]);
    if (best.gain < config.ig_epsilon) {
        for (const auto& a : actions) consider(a);
    }
    if (best.gain < config.ig_epsilon) {
        auto moved = reposition_step(model, b, config);
        moved.evaluations += best.evaluations;
        return moved;
    }
    return best;
}

template <BeliefModel Model>
BaselineStep frontier_step(const Model& model, const typename Model::Belief& b,
                           const BaselineConfig& config) {
    BaselineStep best{};
    double best_cost = std::numeric_limits<double>::infinity();
    long evaluations = 0;
    for (const auto& a : model.actions(b)) {
        const auto ts = model.transitions(b, a);
        ++evaluations;
        const double g = information_gain(model.uncertainty(b), ts,
                                          [&](const auto& s) { return model.uncertainty(s); });
        if (g < config.ig_epsilon) continue;
        const double c = expected_travel(ts);
        // Actions arrive in canonical order, so a strict improvement rule keeps the first.
        if (c < best_cost || (c == best_cost && g > best.gain)) {
            best = {a, g, 0};
            best_cost = c;
        }
    }
    if (!std::isfinite(best_cost)) {
        auto moved = reposition_step(model, b, config);
        moved.evaluations += evaluations;
        return moved;
    }
    best.evaluations = evaluations;
    return best;
}

}  // namespace touchloc
