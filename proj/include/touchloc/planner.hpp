#pragma once

// Anytime trial-based value iteration over belief states. Every belief keeps
// two value estimates, one seeded by an admissible heuristic and one by a
// greedy inadmissible heuristic. Early in the budget trials follow the
// admissible values, later the inadmissible ones, and each trial only descends
// into the most probable successor of the chosen action.

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "touchloc/belief_models.hpp"

namespace touchloc {

enum class BudgetKind { Backups, Milliseconds };

struct PlannerConfig {
    BudgetKind budget_kind = BudgetKind::Backups;
    long budget = 200;
    int horizon = 50;
    double schedule_fraction = 0.5;
    double weight = 1.0;
    /// Stop early once a trial reaches a terminal belief without changing any
    /// value it backed up by more than this.
    double convergence_tol = 1e-9;

    void validate() const {
        if (budget <= 0) throw Error(ErrorKind::InvalidScenario, "planner budget must be > 0");
        if (horizon < 1) throw Error(ErrorKind::InvalidScenario, "planner horizon must be >= 1");
        if (schedule_fraction < 0.0 || schedule_fraction > 1.0) {
            throw Error(ErrorKind::InvalidScenario, "schedule_fraction must lie in [0, 1]");
        }
        if (weight <= 0.0) throw Error(ErrorKind::InvalidScenario, "weight must be > 0");
    }
};

enum class ValueType { Admissible, Inadmissible };

struct ValueTable {
    std::unordered_map<BeliefKey, double, BeliefKeyHash> v_ad;
    std::unordered_map<BeliefKey, double, BeliefKeyHash> v_inad;

    std::optional<double> get(ValueType type, const BeliefKey& k) const {
        const auto& m = type == ValueType::Admissible ? v_ad : v_inad;
        if (auto it = m.find(k); it != m.end()) return it->second;
        return std::nullopt;
    }
    void set(ValueType type, const BeliefKey& k, double v) {
        (type == ValueType::Admissible ? v_ad : v_inad)[k] = v;
    }
};

struct PartialPolicy {
    std::unordered_map<BeliefKey, ActionSpec, BeliefKeyHash> actions;

    std::optional<ActionSpec> lookup(const BeliefKey& k) const {
        if (auto it = actions.find(k); it != actions.end()) return it->second;
        return std::nullopt;
    }
    bool contains(const BeliefKey& k) const { return actions.count(k) != 0; }
};

struct PlannerStats {
    long backups = 0;
    long evaluations = 0;  // (belief, action) outcome enumerations
    long trials = 0;
    bool converged = false;
    double longest_backup_ms = 0.0;  // wall time of the slowest single backup
};

/// Q-value of one action: expected travel plus probability-weighted successor
/// values, falling back to the heuristic where no value is stored.
template <BeliefModel Model>
double q_value(const Model& model, const std::vector<Transition<typename Model::Belief>>& ts,
               ValueType type, const ValueTable& table) {
    double q = expected_travel(ts);
    for (const auto& t : ts) {
        double v;
        if (model.is_terminal(t.successor)) {
            v = model.terminal_cost(t.successor);
        } else if (auto stored = table.get(type, model.key(t.successor))) {
            v = *stored;
        } else {
            v = type == ValueType::Admissible ? model.heuristic_admissible(t.successor)
                                              : model.heuristic_inadmissible(t.successor);
        }
        q += t.probability * v;
    }
    return q;
}

template <BeliefModel Model>
double action_cost(const Model& model, const typename Model::Belief& b, const ActionSpec& a) {
    return expected_travel(model.transitions(b, a));
}

template <BeliefModel Model>
class RtdpPlanner {
public:
    using Belief = typename Model::Belief;

    struct ActionEval {
        ActionSpec action;
        std::vector<Transition<Belief>> transitions;
        double q_ad = 0.0;
        double q_inad = 0.0;
    };

    struct BackupResult {
        std::vector<ActionEval> evals;
        std::size_t best_ad = 0;
        std::size_t best_inad = 0;
    };

    RtdpPlanner(const Model& model, PlannerConfig config) : model_(&model), config_(config) {
        config_.validate();
    }

    const ValueTable& table() const noexcept { return table_; }
    ValueTable& table() noexcept { return table_; }
    const PlannerStats& stats() const noexcept { return stats_; }
    const PlannerConfig& config() const noexcept { return config_; }

    /// Evaluates every useful action at b under the current table. Actions
    /// whose only outcome leaves the belief unchanged are skipped.
    BackupResult evaluate(const Belief& b) {
        BackupResult r;
        const auto self = model_->key(b);
        for (const auto& a : model_->actions(b)) {
            auto ts = model_->transitions(b, a);
            ++stats_.evaluations;
            if (ts.size() == 1 && model_->key(ts.front().successor) == self) continue;
            ActionEval e{a, std::move(ts), 0.0, 0.0};
            e.q_ad = q_value(*model_, e.transitions, ValueType::Admissible, table_);
            e.q_inad = q_value(*model_, e.transitions, ValueType::Inadmissible, table_);
            r.evals.push_back(std::move(e));
        }
        if (r.evals.empty()) throw Error(ErrorKind::DeadEnd, "no informative action is available");
        // Actions arrive in canonical tie order, so strict comparison keeps the first minimum.
        for (std::size_t i = 1; i < r.evals.size(); ++i) {
            if (r.evals[i].q_ad < r.evals[r.best_ad].q_ad) r.best_ad = i;
            if (r.evals[i].q_inad < r.evals[r.best_inad].q_inad) r.best_inad = i;
        }
        return r;
    }

    /// Bellman backup of both value types at b.
    BackupResult backup(const Belief& b) {
        const auto started = Clock::now();
        auto r = evaluate(b);
        const auto k = model_->key(b);
        last_residual_ = 0.0;
        for (auto type : {ValueType::Admissible, ValueType::Inadmissible}) {
            const double v = type == ValueType::Admissible ? r.evals[r.best_ad].q_ad
                                                           : r.evals[r.best_inad].q_inad;
            const double old = table_.get(type, k).value_or(
                type == ValueType::Admissible ? model_->heuristic_admissible(b)
                                              : model_->heuristic_inadmissible(b));
            last_residual_ = std::max(last_residual_, std::abs(v - old));
            table_.set(type, k, v);
        }
        last_best_inad_[k] = r.evals[r.best_inad].action;
        ++stats_.backups;
        ++session_backups_;
        stats_.longest_backup_ms = std::max(
            stats_.longest_backup_ms,
            std::chrono::duration<double, std::milli>(Clock::now() - started).count());
        return r;
    }

    /// Index of the most probable transition; ties go to the earlier entry,
    /// which is the free outcome or the lowest collision index.
    static std::size_t most_likely(const std::vector<Transition<Belief>>& ts) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < ts.size(); ++i) {
            if (ts[i].probability > ts[best].probability) best = i;
        }
        return best;
    }

    /// One trial from b_start. Returns the beliefs backed up, in order.
    std::vector<Belief> trial(const Belief& b_start) {
        std::vector<Belief> visited;
        Belief b = b_start;
        double worst_residual = 0.0;
        bool reached_terminal = false;
        for (int depth = 0; depth < config_.horizon; ++depth) {
            if (model_->is_terminal(b)) {
                reached_terminal = true;
                break;
            }
            if (budget_exhausted()) break;
            const bool admissible_phase = in_admissible_phase();
            auto r = backup(b);
            worst_residual = std::max(worst_residual, last_residual_);
            visited.push_back(b);
            auto& chosen = r.evals[admissible_phase ? r.best_ad : r.best_inad];
            auto& next = chosen.transitions[most_likely(chosen.transitions)];
            b = std::move(next.successor);
        }
        if (!reached_terminal && model_->is_terminal(b)) reached_terminal = true;
        ++stats_.trials;
        last_trial_converged_ = reached_terminal && worst_residual <= config_.convergence_tol;
        return visited;
    }

    /// Runs trials from b_start until the budget is spent or a trial converges,
    /// then maps every visited belief to its best inadmissible-value action.
    PartialPolicy plan(const Belief& b_start) {
        session_backups_ = 0;
        session_start_ = Clock::now();
        stats_.converged = false;
        PartialPolicy policy;
        if (model_->is_terminal(b_start)) return policy;

        std::vector<Belief> visited;
        std::unordered_set<BeliefKey, BeliefKeyHash> seen;
        while (!budget_exhausted()) {
            const auto before = session_backups_;
            for (auto& b : trial(b_start)) {
                const auto k = model_->key(b);
                if (seen.insert(k).second) visited.push_back(std::move(b));
            }
            if (last_trial_converged_) {
                stats_.converged = true;
                break;
            }
            if (session_backups_ == before) break;
        }
        for (const auto& b : visited) {
            const auto k = model_->key(b);
            if (config_.budget_kind == BudgetKind::Milliseconds) {
                // Re-evaluating would overrun a wall-clock budget; use the last backup's choice.
                policy.actions[k] = last_best_inad_.at(k);
            } else {
                auto r = evaluate(b);
                policy.actions[k] = r.evals[r.best_inad].action;
            }
        }
        return policy;
    }

private:
    using Clock = std::chrono::steady_clock;

    double elapsed_units() const {
        if (config_.budget_kind == BudgetKind::Backups) return static_cast<double>(session_backups_);
        return std::chrono::duration<double, std::milli>(Clock::now() - session_start_).count();
    }
    bool budget_exhausted() const { return elapsed_units() >= static_cast<double>(config_.budget); }
    bool in_admissible_phase() const {
        return elapsed_units() < config_.schedule_fraction * static_cast<double>(config_.budget);
    }

    const Model* model_;
    PlannerConfig config_;
    ValueTable table_;
    PlannerStats stats_;
    long session_backups_ = 0;
    Clock::time_point session_start_{};
    std::unordered_map<BeliefKey, ActionSpec, BeliefKeyHash> last_best_inad_;
    double last_residual_ = 0.0;
    bool last_trial_converged_ = false;
};

}  // namespace touchloc
