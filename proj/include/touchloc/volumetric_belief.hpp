#pragma once

// Phase-1 belief: the set of voxels the target may still occupy, plus the
// contacts observed so far. Transitions are pure set algebra; the observation
// model scores each configuration of a motion by how much of the possibly
// occupied volume its contact surface touches and by its proximity to
// previously recorded contacts.

#include <algorithm>
#include <cmath>
#include <vector>

#include "touchloc/object_template.hpp"
#include "touchloc/workspace.hpp"

namespace touchloc {

struct CollisionRecord {
    Config config;
    ActionSpec action;

    /// Two records describe the same contact when they share the rest
    /// configuration and motion direction; the action length is irrelevant.
    bool same_contact(const CollisionRecord& o) const noexcept {
        return config == o.config && action.dir == o.action.dir;
    }
    friend bool operator==(const CollisionRecord&, const CollisionRecord&) = default;
};

struct VolumetricParams {
    int n_object = 1;
    double d_max = 1.0;
    double eps_hist = 0.1;
    std::size_t delta = 1;

    /// Defaults derived from the template: N is its voxel count, d_max its
    /// diameter padded by one voxel diagonal, delta a box twice its extent.
    static VolumetricParams from_template(const ObjectTemplate& t, int rank) {
        VolumetricParams p;
        p.n_object = static_cast<int>(t.voxel_count());
        p.d_max = t.diameter() + std::sqrt(static_cast<double>(rank));
        p.eps_hist = 0.1;
        const auto side = static_cast<std::size_t>(2 * t.max_extent());
        p.delta = rank == 3 ? side * side * side : side * side;
        return p;
    }

    void validate(double template_diameter) const {
        if (n_object < 1) throw Error(ErrorKind::InvalidScenario, "n_object must be >= 1");
        if (d_max + 1e-12 < template_diameter || d_max <= 0.0) {
            throw Error(ErrorKind::InvalidScenario, "d_max must cover the template diameter");
        }
        if (eps_hist <= 0.0) throw Error(ErrorKind::InvalidScenario, "eps_hist must be positive");
        if (delta < static_cast<std::size_t>(n_object)) {
            throw Error(ErrorKind::InvalidScenario, "delta must be >= n_object");
        }
    }
};

struct VolumetricBelief {
    Config q;
    VoxelSet po;
    std::vector<CollisionRecord> history;

    friend bool operator==(const VolumetricBelief&, const VolumetricBelief&) = default;
};

struct VolumetricOutcome {
    Observation obs;
    Config config;
    double probability = 0.0;
    VolumetricBelief successor;
};

inline VolumetricBelief apply_no_collision(const World& world, const VolumetricBelief& b,
                                           const DiscretizedAction& action) {
    VolumetricBelief next{action.at(action.steps()), b.po, b.history};
    next.po -= swept_voxels(world.grid, action, world.probe);
    return next;
}

/// Successor after the probe was blocked stepping from q_rest into q_{rest+1}.
inline VolumetricBelief apply_collision(const World& world, const VolumetricParams& params,
                                        const VolumetricBelief& b, const DiscretizedAction& action,
                                        int rest) {
    if (rest < 0 || rest >= action.steps()) {
        throw Error(ErrorKind::InvalidAction, "collision rest index out of range");
    }
    const Config& at = action.at(rest);
    const VoxelSet surface = contact_surface(world.grid, at, action.spec.dir, world.probe);
    VolumetricBelief next{at, b.po, b.history};
    next.po -= swept_prefix(world.grid, action, world.probe, rest);
    next.po -= elimination_set(world.grid, surface, params.d_max);
    if (!next.po.intersects(surface)) {
        throw Error(ErrorKind::InconsistentObservation,
                    "contact reported where the target cannot be");
    }
    const CollisionRecord record{at, action.spec};
    if (std::none_of(next.history.begin(), next.history.end(),
                     [&](const CollisionRecord& r) { return r.same_contact(record); })) {
        next.history.push_back(record);
    }
    return next;
}

inline double collision_likelihood_po(const VoxelSet& po, const VoxelSet& surface,
                                      const VolumetricParams& params) {
    const double hits = static_cast<double>(surface.intersection_count(po));
    const double denom =
        std::max(1.0, static_cast<double>(po.count()) - static_cast<double>(params.n_object));
    return std::min(1.0, hits / denom);
}

/// Likelihood that `surface` is blocked given one earlier contact whose
/// contact surface was `recorded`.
inline double collision_likelihood_history(const World& world, const VoxelSet& surface,
                                           const VoxelSet& recorded,
                                           const VolumetricParams& params) {
    const double overlap = static_cast<double>(surface.intersection_count(recorded));
    const double ratio = (overlap + params.eps_hist) /
                         (static_cast<double>(recorded.count()) + params.eps_hist);
    const double dist = set_distance(world.grid, surface, recorded);
    const double falloff = 1.0 - std::max(0.0, dist) / params.d_max;
    return std::clamp(ratio * falloff, 0.0, 1.0);
}

inline double collision_likelihood_history(const World& world, const Config& q_i,
                                           const ActionSpec& a, const CollisionRecord& record,
                                           const VolumetricParams& params) {
    return collision_likelihood_history(
        world, contact_surface(world.grid, q_i, a.dir, world.probe),
        contact_surface(world.grid, record.config, record.action.dir, world.probe), params);
}

inline std::vector<VoxelSet> history_surfaces(const World& world, const VolumetricBelief& b) {
    std::vector<VoxelSet> out;
    out.reserve(b.history.size());
    for (const auto& r : b.history) {
        out.push_back(contact_surface(world.grid, r.config, r.action.dir, world.probe));
    }
    return out;
}

/// Normalized collision probability for one contact surface, combining the
/// volume term with every history term.
inline double combined_collision_prob(const World& world, const VolumetricParams& params,
                                      const VoxelSet& po, const VoxelSet& surface,
                                      const std::vector<VoxelSet>& recorded) {
    const double po_term = collision_likelihood_po(po, surface, params);
    double hit = po_term;
    double miss = 1.0 - po_term;
    for (const auto& r : recorded) {
        const double h = collision_likelihood_history(world, surface, r, params);
        hit *= h;
        miss *= 1.0 - h;
    }
    const double total = hit + miss;
    if (total <= 0.0) return 0.0;
    return hit / total;
}

inline double per_config_collision_prob(const World& world, const VolumetricParams& params,
                                        const VolumetricBelief& b, const Config& q_i,
                                        const ActionSpec& a) {
    return combined_collision_prob(world, params, b.po,
                                   contact_surface(world.grid, q_i, a.dir, world.probe),
                                   history_surfaces(world, b));
}

/// Per-step blocking probabilities p_k for k in [0, n-1]: the chance that the
/// step out of q_k is blocked, given the probe got that far.
inline std::vector<double> step_collision_probs(const World& world, const VolumetricParams& params,
                                                const VolumetricBelief& b,
                                                const DiscretizedAction& action) {
    const auto recorded = history_surfaces(world, b);
    std::vector<double> p;
    p.reserve(action.steps());
    for (int k = 0; k < action.steps(); ++k) {
        p.push_back(combined_collision_prob(
            world, params, b.po,
            contact_surface(world.grid, action.at(k), action.spec.dir, world.probe), recorded));
    }
    return p;
}

/// All observations with non-zero probability, in canonical outcome order.
inline std::vector<VolumetricOutcome> enumerate_outcomes(const World& world,
                                                         const VolumetricParams& params,
                                                         const VolumetricBelief& b,
                                                         const DiscretizedAction& action) {
    const auto p = step_collision_probs(world, params, b, action);
    std::vector<VolumetricOutcome> out;
    double reach = 1.0;
    std::vector<std::pair<int, double>> blocked;
    for (int k = 0; k < action.steps(); ++k) {
        const double pk = reach * p[k];
        if (pk > 0.0) blocked.emplace_back(k, pk);
        reach *= 1.0 - p[k];
    }
    if (reach > 0.0) {
        out.push_back({{false, action.steps()}, action.at(action.steps()), reach,
                       apply_no_collision(world, b, action)});
    }
    for (const auto& [k, pk] : blocked) {
        // A blocked step the set algebra rules out carries no mass.
        VolumetricBelief next;
        try {
            next = apply_collision(world, params, b, action, k);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InconsistentObservation) throw;
            continue;
        }
        out.push_back({{true, k}, action.at(k), pk, std::move(next)});
    }
    double total = 0.0;
    for (const auto& o : out) total += o.probability;
    for (auto& o : out) o.probability /= total;
    return out;
}

inline bool is_phase1_terminal(const VolumetricBelief& b, const VolumetricParams& params) {
    return b.po.count() <= params.delta;
}

}  // namespace touchloc
