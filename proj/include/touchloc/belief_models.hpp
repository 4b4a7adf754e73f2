#pragma once

// Adapters exposing each belief phase through one interface so the planner
// and the baselines stay phase-agnostic.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <optional>
#include <vector>

#include "touchloc/belief_key.hpp"
#include "touchloc/particle_belief.hpp"
#include "touchloc/volumetric_belief.hpp"

namespace touchloc {

template <typename Belief>
struct Transition {
    Observation obs;
    double probability = 0.0;
    int travel = 0;  // unit steps the probe moves before resting
    Belief successor;
};

template <typename M>
concept BeliefModel = requires(const M& m, const typename M::Belief& b, const ActionSpec& a) {
    { m.key(b) } -> std::same_as<BeliefKey>;
    { m.is_terminal(b) } -> std::same_as<bool>;
    { m.terminal_cost(b) } -> std::convertible_to<double>;
    { m.actions(b) } -> std::same_as<std::vector<ActionSpec>>;
    { m.transitions(b, a) } -> std::same_as<std::vector<Transition<typename M::Belief>>>;
    { m.heuristic_admissible(b) } -> std::convertible_to<double>;
    { m.heuristic_inadmissible(b) } -> std::convertible_to<double>;
    { m.uncertainty(b) } -> std::convertible_to<double>;
    { m.observe(b, a, Observation{}) } -> std::same_as<typename M::Belief>;
    { m.possibly_occupied(b) } -> std::same_as<VoxelSet>;
    { m.world() } -> std::convertible_to<const World&>;
};

/// Straight moves from q in canonical order (shorter first, then direction),
/// one per distinct clipped length.
inline std::vector<ActionSpec> candidate_actions(const World& world, const Config& q,
                                                 const std::vector<int>& lengths) {
    std::vector<ActionSpec> out;
    for (int d = 0; d < 2 * world.grid.rank(); ++d) {
        const Direction dir = Direction::from_order(d);
        for (int len : lengths) {
            try {
                const auto da = discretize_action(world.grid, world.probe, q, {dir, len});
                const ActionSpec clipped = da.spec;
                if (std::find(out.begin(), out.end(), clipped) == out.end()) out.push_back(clipped);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::InvalidAction) throw;
            }
        }
    }
    std::sort(out.begin(), out.end(), action_order_less);
    return out;
}

template <typename Belief>
double expected_travel(const std::vector<Transition<Belief>>& ts) {
    double c = 0.0;
    for (const auto& t : ts) c += t.probability * t.travel;
    return c;
}

class VolumetricModel {
public:
    using Belief = VolumetricBelief;

    VolumetricModel(World world, VolumetricParams params, std::vector<int> lengths,
                    double weight = 1.0)
        : world_(std::move(world)), params_(params), lengths_(std::move(lengths)), weight_(weight) {
        std::sort(lengths_.begin(), lengths_.end());
        cross_section_ = static_cast<double>(world_.probe.max_cross_section(world_.grid.rank()));
    }

    const World& world() const noexcept { return world_; }
    const VolumetricParams& params() const noexcept { return params_; }
    double weight() const noexcept { return weight_; }

    BeliefKey key(const Belief& b) const {
        KeyBuilder k;
        k.add(1).add(b.q.cell[0]).add(b.q.cell[1]).add(b.q.cell[2]).add(b.po.words());
        k.add(static_cast<std::uint64_t>(b.history.size()));
        for (const auto& r : b.history) {
            k.add(r.config.cell[0]).add(r.config.cell[1]).add(r.config.cell[2]).add(r.action.dir.order());
        }
        return k.finish();
    }

    bool is_terminal(const Belief& b) const { return is_phase1_terminal(b, params_); }
    double terminal_cost(const Belief&) const { return 0.0; }

    std::vector<ActionSpec> actions(const Belief& b) const {
        return candidate_actions(world_, b.q, lengths_);
    }

    std::vector<Transition<Belief>> transitions(const Belief& b, const ActionSpec& a) const {
        const auto da = discretize_action(world_.grid, world_.probe, b.q, a);
        std::vector<Transition<Belief>> out;
        for (auto& o : enumerate_outcomes(world_, params_, b, da)) {
            out.push_back({o.obs, o.probability, o.obs.rest, std::move(o.successor)});
        }
        return out;
    }

    /// Belief after actually observing `obs`, whether or not the model gave it mass.
    Belief observe(const Belief& b, const ActionSpec& a, const Observation& obs) const {
        const auto da = discretize_action(world_.grid, world_.probe, b.q, a);
        return obs.collision ? apply_collision(world_, params_, b, da, obs.rest)
                             : apply_no_collision(world_, b, da);
    }

    /// Distance the probe must cover before any observation can change the
    /// belief (it has to sweep a PO voxel or be blocked by one).
    double heuristic_admissible(const Belief& b) const {
        if (is_terminal(b) || b.po.empty()) return 0.0;
        const auto d = set_distance(world_.grid, probe_voxels(world_.grid, b.q, world_.probe), b.po);
        return std::max(0.0, d - 1.0);
    }

    double heuristic_inadmissible(const Belief& b) const {
        if (is_terminal(b)) return 0.0;
        const double excess = static_cast<double>(b.po.count()) - static_cast<double>(params_.delta);
        return heuristic_admissible(b) + weight_ * std::max(0.0, excess) / cross_section_;
    }

    double uncertainty(const Belief& b) const { return static_cast<double>(b.po.count()); }

    /// Voxels the target might occupy; everything else is known free.
    VoxelSet possibly_occupied(const Belief& b) const { return b.po; }

private:
    World world_;
    VolumetricParams params_;
    std::vector<int> lengths_;
    double weight_;
    double cross_section_ = 1.0;
};

class ParticleModel {
public:
    using Belief = ParticleBelief;

    ParticleModel(World world, ObjectTemplate object, std::vector<int> lengths, double weight = 1.0)
        : world_(std::move(world)), object_(std::move(object)), lengths_(std::move(lengths)),
          weight_(weight) {
        std::sort(lengths_.begin(), lengths_.end());
    }

    const World& world() const noexcept { return world_; }
    const ObjectTemplate& object() const noexcept { return object_; }
    double weight() const noexcept { return weight_; }

    BeliefKey key(const Belief& b) const {
        KeyBuilder k;
        k.add(2).add(b.q.cell[0]).add(b.q.cell[1]).add(b.q.cell[2]);
        k.add(static_cast<std::uint64_t>(b.hypotheses.size()));
        for (const auto& h : b.hypotheses) {
            k.add(h.translation[0]).add(h.translation[1]).add(h.translation[2]).add(h.rotation);
        }
        return k.finish();
    }

    /// Planning stops once every hypothesis agrees on the dock; the remaining
    /// docking route is charged as a terminal cost.
    bool is_terminal(const Belief& b) const { return shared_dock(object_, b).has_value(); }

    double terminal_cost(const Belief& b) const {
        const auto dock = shared_dock(object_, b);
        if (!dock) return 0.0;
        const auto route =
            axis_route(world_, b.q, *dock, hypotheses_union(world_.grid, object_, b.hypotheses));
        return route ? route_length(*route) : manhattan(b.q.cell, dock->cell);
    }

    std::vector<ActionSpec> actions(const Belief& b) const {
        return candidate_actions(world_, b.q, lengths_);
    }

    std::vector<Transition<Belief>> transitions(const Belief& b, const ActionSpec& a) const {
        const auto da = discretize_action(world_.grid, world_.probe, b.q, a);
        std::vector<Transition<Belief>> out;
        for (auto& o : partition_by_observation(object_, world_.probe, b, da)) {
            out.push_back({o.obs, o.probability, o.obs.rest, std::move(o.successor)});
        }
        return out;
    }

    Belief observe(const Belief& b, const ActionSpec& a, const Observation& obs) const {
        const auto da = discretize_action(world_.grid, world_.probe, b.q, a);
        Belief next{da.at(obs.rest), {}};
        for (const auto& h : b.hypotheses) {
            if (expected_observation(object_, h, da, world_.probe) == obs) next.hypotheses.push_back(h);
        }
        return next;
    }

    double heuristic_admissible(const Belief& b) const {
        if (b.hypotheses.empty()) return 0.0;
        int best = std::numeric_limits<int>::max();
        for (const auto& h : b.hypotheses) {
            best = std::min(best, manhattan(b.q.cell, dock_config(object_, h).cell));
        }
        return best;
    }

    double heuristic_inadmissible(const Belief& b) const {
        if (b.hypotheses.empty()) return 0.0;
        return heuristic_admissible(b) + weight_ * std::log2(static_cast<double>(b.hypotheses.size()));
    }

    double uncertainty(const Belief& b) const { return static_cast<double>(b.hypotheses.size()); }

    VoxelSet possibly_occupied(const Belief& b) const {
        return hypotheses_union(world_.grid, object_, b.hypotheses);
    }

private:
    World world_;
    ObjectTemplate object_;
    std::vector<int> lengths_;
    double weight_;
};

static_assert(BeliefModel<VolumetricModel>);
static_assert(BeliefModel<ParticleModel>);

}  // namespace touchloc
