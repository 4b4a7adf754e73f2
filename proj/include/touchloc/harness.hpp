#pragma once

// Closed-loop plan/execute episodes against a ground-truth pose, plus suites
// over planners and seeds with relative-metric aggregation.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "touchloc/baselines.hpp"
#include "touchloc/belief_models.hpp"
#include "touchloc/planner.hpp"
#include "touchloc/scenario.hpp"

namespace touchloc {

enum class PlannerKind { Rtdp, RtdpInadmissible, Tbl, Frontier };

inline std::string planner_name(PlannerKind k) {
    switch (k) {
        case PlannerKind::Rtdp: return "rtdp";
        case PlannerKind::RtdpInadmissible: return "rtdp-inad";
        case PlannerKind::Tbl: return "tbl";
        case PlannerKind::Frontier: return "frontier";
    }
    return "?";
}

inline PlannerKind parse_planner(const std::string& name) {
    for (auto k : {PlannerKind::Rtdp, PlannerKind::RtdpInadmissible, PlannerKind::Tbl,
                   PlannerKind::Frontier}) {
        if (planner_name(k) == name) return k;
    }
    throw Error(ErrorKind::InvalidScenario, "unknown planner '" + name + "'");
}

/// Which part of the pipeline an episode exercises.
enum class EpisodeMode { Full, Volumetric, Particle };

inline std::string mode_name(EpisodeMode m) {
    switch (m) {
        case EpisodeMode::Full: return "full";
        case EpisodeMode::Volumetric: return "volumetric";
        case EpisodeMode::Particle: return "particle";
    }
    return "?";
}

inline EpisodeMode parse_mode(const std::string& name) {
    for (auto m : {EpisodeMode::Full, EpisodeMode::Volumetric, EpisodeMode::Particle}) {
        if (mode_name(m) == name) return m;
    }
    throw Error(ErrorKind::InvalidScenario, "unknown mode '" + name + "'");
}

struct RunRecord {
    std::string scenario;
    std::string planner;
    std::string mode;
    std::uint64_t seed = 0;
    bool success = false;
    std::string failure;
    double cost = 0.0;
    double phase1_cost = 0.0;
    double phase2_cost = 0.0;
    double dock_cost = 0.0;
    long iterations = 0;
    long phase1_iterations = 0;
    long phase2_iterations = 0;
    long effort = 0;  // action evaluations
    long backups = 0;
    long phase1_steps = 0;
    long phase2_steps = 0;
    long initial_h = 0;
    long final_h = 0;
    long violations = 0;  // times the ground truth fell outside the belief

    double effort_per_iteration() const {
        return iterations > 0 ? static_cast<double>(effort) / static_cast<double>(iterations) : 0.0;
    }
    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct StepTrace {
    int phase = 1;  // 1 volumetric, 2 particle, 3 docking
    ActionSpec action;
    Observation obs;
    friend bool operator==(const StepTrace&, const StepTrace&) = default;
};

struct Episode {
    RunRecord record;
    PoseHypothesis truth;
    std::vector<StepTrace> steps;
};

/// Ground-truth observation: the same predictor the particle belief uses,
/// evaluated at the true pose.
inline Observation simulate_observation(const World& world, const ObjectTemplate& object,
                                        const PoseHypothesis& truth, const Config& q,
                                        const ActionSpec& a) {
    return expected_observation(object, truth, discretize_action(world.grid, world.probe, q, a),
                                world.probe);
}

namespace detail {

inline constexpr long kMaxStepsPerPhase = 2000;

struct PhaseMetrics {
    double cost = 0.0;
    long iterations = 0;
    long effort = 0;
    long backups = 0;
    long steps = 0;
};

template <BeliefModel Model, typename Monitor>
typename Model::Belief drive_phase(const Model& model, typename Model::Belief b, PlannerKind kind,
                                   const Scenario& sc, std::uint64_t seed, const PoseHypothesis& truth,
                                   int phase, PhaseMetrics& m, std::vector<StepTrace>& trace,
                                   Monitor&& monitor) {
    PlannerConfig pc = sc.planner;
    if (kind == PlannerKind::RtdpInadmissible) pc.schedule_fraction = 0.0;
    RtdpPlanner<Model> planner(model, pc);
    PartialPolicy policy;
    std::unordered_set<BeliefKey, BeliefKeyHash> executed;  // since the last replan
    std::mt19937_64 rng(seed ^ (0xa0761d6478bd642fULL * static_cast<std::uint64_t>(phase)));

    while (!model.is_terminal(b)) {
        if (m.steps >= kMaxStepsPerPhase) throw Error(ErrorKind::DeadEnd, "step limit reached");
        ActionSpec a;
        if (kind == PlannerKind::Rtdp || kind == PlannerKind::RtdpInadmissible) {
            const auto key = model.key(b);
            // A miss, or a belief revisited under the current policy, triggers replanning.
            if (!policy.contains(key) || executed.count(key)) {
                executed.clear();
                const auto before = planner.stats();
                policy = planner.plan(b);
                ++m.iterations;
                m.effort += planner.stats().evaluations - before.evaluations;
                m.backups += planner.stats().backups - before.backups;
            }
            executed.insert(key);
            a = *policy.lookup(key);
        } else {
            const auto step = kind == PlannerKind::Tbl ? tbl_step(model, b, sc.baseline, rng)
                                                       : frontier_step(model, b, sc.baseline);
            ++m.iterations;
            m.effort += step.evaluations;
            a = step.action;
        }
        const auto obs = simulate_observation(model.world(), sc.object, truth, b.q, a);
        b = model.observe(b, a, obs);
        m.cost += obs.rest;
        ++m.steps;
        trace.push_back({phase, a, obs});
        monitor(b);
    }
    return b;
}

/// Hypothesis box for particle-only episodes: a cube of twice the template
/// extent containing the true pose, placed by the run seed.
inline Box particle_box(const Scenario& sc, const PoseHypothesis& truth, std::uint64_t seed) {
    const auto& grid = sc.world.grid;
    const int side = 2 * sc.object.max_extent();
    const auto cells = pose_voxels(sc.object, truth);
    Box box;
    std::mt19937_64 rng(seed * 0xd1b54a32d192ed03ULL + 17);
    for (int axis = 0; axis < 3; ++axis) {
        if (axis >= grid.rank()) continue;
        int lo = cells.front()[axis];
        int hi = lo;
        for (const auto& c : cells) {
            lo = std::min(lo, c[axis]);
            hi = std::max(hi, c[axis]);
        }
        const int min_start = std::max(0, hi - side + 1);
        const int max_start = std::min(lo, grid.extent(axis) - side);
        std::uniform_int_distribution<int> pick(min_start, std::max(min_start, max_start));
        box.lo[axis] = pick(rng);
        box.hi[axis] = std::min(grid.extent(axis) - 1, box.lo[axis] + side - 1);
    }
    return box;
}

/// Probe start for particle-only episodes: centered on the box, a short
/// distance below it along y.
inline Config particle_start(const Scenario& sc, const Box& box) {
    const auto& grid = sc.world.grid;
    Config q{{(box.lo[0] + box.hi[0]) / 2, box.lo[1] - 2, (box.lo[2] + box.hi[2]) / 2}};
    if (!footprint_fits(grid, q, sc.world.probe)) q.cell[1] = box.hi[1] + 2;
    if (!footprint_fits(grid, q, sc.world.probe)) {
        throw Error(ErrorKind::InvalidScenario, "no room for a particle-phase probe start");
    }
    return q;
}

}  // namespace detail

inline Episode run_episode(const Scenario& sc, PlannerKind kind, std::uint64_t seed,
                           EpisodeMode mode = EpisodeMode::Full) {
    Episode ep;
    auto& rec = ep.record;
    rec.scenario = sc.id;
    rec.planner = planner_name(kind);
    rec.mode = mode_name(mode);
    rec.seed = seed;
    ep.truth = sc.resolve_truth(seed);
    const auto& truth = ep.truth;
    const auto truth_voxels = pose_voxel_set(sc.world.grid, sc.object, truth);
    const auto params = sc.volumetric_params();

    detail::PhaseMetrics p1;
    detail::PhaseMetrics p2;
    double dock_cost = 0.0;
    const auto finish = [&]() {
        rec.phase1_cost = p1.cost;
        rec.phase2_cost = p2.cost;
        rec.dock_cost = dock_cost;
        rec.cost = p1.cost + p2.cost + dock_cost;
        rec.phase1_iterations = p1.iterations;
        rec.phase2_iterations = p2.iterations;
        rec.iterations = p1.iterations + p2.iterations;
        rec.effort = p1.effort + p2.effort;
        rec.backups = p1.backups + p2.backups;
        rec.phase1_steps = p1.steps;
        rec.phase2_steps = p2.steps;
    };

    try {
        ParticleBelief particles;
        if (mode == EpisodeMode::Particle) {
            const Box box = detail::particle_box(sc, truth, seed);
            const Config start = detail::particle_start(sc, box);
            particles = {start, generate_hypotheses(
                                    sc.world, box.voxels(sc.world.grid) -
                                                  probe_voxels(sc.world.grid, start, sc.world.probe),
                                    {}, sc.object)};
        } else {
            const VolumetricModel model(sc.world, params, sc.lengths, sc.planner.weight);
            VolumetricBelief b{sc.start, sc.initial_po(), {}};
            b = detail::drive_phase(model, std::move(b), kind, sc, seed, truth, 1, p1, ep.steps,
                                    [&](const VolumetricBelief& nb) {
                                        if (!truth_voxels.subset_of(nb.po)) ++rec.violations;
                                    });
            if (mode == EpisodeMode::Volumetric) {
                rec.success = rec.violations == 0;
                if (!rec.success) rec.failure = "truth eliminated";
                finish();
                return ep;
            }
            particles = {b.q, generate_hypotheses(sc.world, b.po, b.history, sc.object)};
        }
        rec.initial_h = static_cast<long>(particles.hypotheses.size());
        const auto truth_in = [&](const ParticleBelief& pb) {
            return std::binary_search(pb.hypotheses.begin(), pb.hypotheses.end(), truth);
        };
        if (!truth_in(particles)) ++rec.violations;

        const ParticleModel model(sc.world, sc.object, sc.lengths, sc.planner.weight);
        particles = detail::drive_phase(model, std::move(particles), kind, sc, seed, truth, 2, p2,
                                        ep.steps, [&](const ParticleBelief& pb) {
                                            if (!truth_in(pb)) ++rec.violations;
                                        });
        rec.final_h = static_cast<long>(particles.hypotheses.size());

        Config q = particles.q;
        for (const auto& a : dock_action(sc.world, sc.object, particles)) {
            const auto obs = simulate_observation(sc.world, sc.object, truth, q, a);
            ep.steps.push_back({3, a, obs});
            dock_cost += obs.rest;
            q = discretize_action(sc.world.grid, sc.world.probe, q, a).at(obs.rest);
            if (obs.collision) throw Error(ErrorKind::InconsistentObservation, "dock route blocked");
        }
        if (q != dock_config(sc.object, truth)) {
            throw Error(ErrorKind::InconsistentObservation, "docked at the wrong configuration");
        }
        rec.success = rec.violations == 0;
        if (!rec.success) rec.failure = "truth eliminated";
    } catch (const Error& e) {
        rec.success = false;
        rec.failure = std::string(to_string(e.kind()));
    }
    finish();
    return ep;
}

// ---------------------------------------------------------------------------
// Records on disk: one comma-separated row per episode.

inline const std::vector<std::string>& record_columns() {
    static const std::vector<std::string> cols{
        "run_id",          "scenario",          "planner",     "mode",        "seed",
        "success",         "failure",           "cost",        "phase1_cost", "phase2_cost",
        "dock_cost",       "iterations",        "phase1_iterations",          "phase2_iterations",
        "effort",          "effort_per_iteration",            "backups",     "phase1_steps",
        "phase2_steps",    "initial_h",         "final_h",     "violations"};
    return cols;
}

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string format_record(const RunRecord& r, long run_id) {
    std::ostringstream out;
    out << run_id << ',' << r.scenario << ',' << r.planner << ',' << r.mode << ',' << r.seed << ','
        << (r.success ? 1 : 0) << ',' << r.failure << ',' << fixed6(r.cost) << ','
        << fixed6(r.phase1_cost) << ',' << fixed6(r.phase2_cost) << ',' << fixed6(r.dock_cost) << ','
        << r.iterations << ',' << r.phase1_iterations << ',' << r.phase2_iterations << ','
        << r.effort << ',' << fixed6(r.effort_per_iteration()) << ',' << r.backups << ','
        << r.phase1_steps << ',' << r.phase2_steps << ',' << r.initial_h << ',' << r.final_h << ','
        << r.violations;
    return out.str();
}

inline std::pair<long, RunRecord> parse_record(const std::string& line) {
    std::vector<std::string> f;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != record_columns().size()) {
        throw Error(ErrorKind::Io, "malformed record row: " + line);
    }
    RunRecord r;
    std::size_t i = 1;
    r.scenario = f[i++];
    r.planner = f[i++];
    r.mode = f[i++];
    r.seed = std::stoull(f[i++]);
    r.success = f[i++] == "1";
    r.failure = f[i++];
    r.cost = std::stod(f[i++]);
    r.phase1_cost = std::stod(f[i++]);
    r.phase2_cost = std::stod(f[i++]);
    r.dock_cost = std::stod(f[i++]);
    r.iterations = std::stol(f[i++]);
    r.phase1_iterations = std::stol(f[i++]);
    r.phase2_iterations = std::stol(f[i++]);
    r.effort = std::stol(f[i++]);
    ++i;  // derived column
    r.backups = std::stol(f[i++]);
    r.phase1_steps = std::stol(f[i++]);
    r.phase2_steps = std::stol(f[i++]);
    r.initial_h = std::stol(f[i++]);
    r.final_h = std::stol(f[i++]);
    r.violations = std::stol(f[i++]);
    return {std::stol(f[0]), r};
}

/// Appends records under a fresh run id, flushing after every row.
class ResultsWriter {
public:
    explicit ResultsWriter(const std::string& path) : path_(path) {
        long max_id = 0;
        bool has_header = false;
        if (std::ifstream in(path); in) {
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                if (line.rfind("run_id,", 0) == 0) {
                    has_header = true;
                    continue;
                }
                max_id = std::max(max_id, parse_record(line).first);
            }
        }
        run_id_ = max_id + 1;
        out_.open(path, std::ios::app);
        if (!out_) throw Error(ErrorKind::Io, "cannot open results file '" + path + "'");
        if (!has_header) {
            for (std::size_t i = 0; i < record_columns().size(); ++i) {
                out_ << (i ? "," : "") << record_columns()[i];
            }
            out_ << '\n';
            out_.flush();
        }
    }

    long run_id() const noexcept { return run_id_; }

    void append(const RunRecord& r) {
        out_ << format_record(r, run_id_) << '\n';
        out_.flush();
        if (!out_) throw Error(ErrorKind::Io, "write failed on '" + path_ + "'");
    }

private:
    std::string path_;
    std::ofstream out_;
    long run_id_ = 1;
};

inline std::vector<std::pair<long, RunRecord>> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open results file '" + path + "'");
    std::vector<std::pair<long, RunRecord>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.rfind("run_id,", 0) == 0) continue;
        out.push_back(parse_record(line));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Aggregation relative to a reference planner.

struct AggregateRow {
    std::string planner;
    std::size_t episodes = 0;
    double success_rate = 0.0;
    double cost = 1.0;
    double total_effort = 1.0;
    double iterations = 1.0;
    double effort_per_iteration = 1.0;
};

struct AggregateTable {
    std::string reference;
    std::vector<AggregateRow> rows;  // reference first, then by planner name

    const AggregateRow& row(const std::string& planner) const {
        for (const auto& r : rows)
            if (r.planner == planner) return r;
        throw Error(ErrorKind::EmptyInput, "no aggregate row for planner '" + planner + "'");
    }
};

inline AggregateTable aggregate(const std::vector<RunRecord>& records,
                                const std::string& reference = "rtdp") {
    if (records.empty()) throw Error(ErrorKind::EmptyInput, "no records to aggregate");
    std::map<std::string, std::vector<const RunRecord*>> by_planner;
    for (const auto& r : records) by_planner[r.planner].push_back(&r);
    if (!by_planner.count(reference)) {
        throw Error(ErrorKind::EmptyInput, "reference planner '" + reference + "' has no records");
    }
    using Instance = std::tuple<std::string, std::string, std::uint64_t>;
    const auto instances = [](const std::vector<const RunRecord*>& rs) {
        std::multiset<Instance> s;
        for (const auto* r : rs) s.insert({r->scenario, r->mode, r->seed});
        return s;
    };
    const auto ref_set = instances(by_planner[reference]);
    for (const auto& [name, rs] : by_planner) {
        if (instances(rs) != ref_set) {
            throw Error(ErrorKind::MismatchedScenarioSets,
                        "planner '" + name + "' ran a different scenario set than '" + reference + "'");
        }
    }
    struct Means {
        double cost = 0, effort = 0, iterations = 0, per_iter = 0, success = 0;
    };
    const auto means = [](const std::vector<const RunRecord*>& rs) {
        Means m;
        for (const auto* r : rs) {
            m.cost += r->cost;
            m.effort += static_cast<double>(r->effort);
            m.iterations += static_cast<double>(r->iterations);
            m.per_iter += r->effort_per_iteration();
            m.success += r->success ? 1.0 : 0.0;
        }
        const double n = static_cast<double>(rs.size());
        m.cost /= n;
        m.effort /= n;
        m.iterations /= n;
        m.per_iter /= n;
        m.success /= n;
        return m;
    };
    const auto ratio = [](double a, double b) {
        if (b == 0.0) return a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        return a / b;
    };
    const Means ref = means(by_planner[reference]);
    AggregateTable t;
    t.reference = reference;
    std::vector<std::string> order{reference};
    for (const auto& [name, rs] : by_planner)
        if (name != reference) order.push_back(name);
    for (const auto& name : order) {
        const auto& rs = by_planner[name];
        const Means m = means(rs);
        t.rows.push_back({name, rs.size(), m.success, ratio(m.cost, ref.cost),
                          ratio(m.effort, ref.effort), ratio(m.iterations, ref.iterations),
                          ratio(m.per_iter, ref.per_iter)});
    }
    return t;
}

inline std::string format_table(const AggregateTable& t) {
    std::ostringstream out;
    out << "metrics relative to " << t.reference << "\n";
    out << std::left << std::setw(12) << "planner" << std::right << std::setw(10) << "episodes"
        << std::setw(10) << "success" << std::setw(10) << "cost" << std::setw(14) << "total_effort"
        << std::setw(12) << "iterations" << std::setw(17) << "effort_per_iter" << "\n";
    for (const auto& r : t.rows) {
        out << std::left << std::setw(12) << r.planner << std::right << std::setw(10) << r.episodes
            << std::setw(10) << std::fixed << std::setprecision(3) << r.success_rate
            << std::setw(10) << r.cost << std::setw(14) << r.total_effort << std::setw(12)
            << r.iterations << std::setw(17) << r.effort_per_iteration << "\n";
    }
    return out.str();
}

struct SuiteResult {
    long run_id = 0;
    std::vector<RunRecord> records;
    AggregateTable table;
};

/// Every (scenario, planner, seed) episode; rows are appended to `results_path`
/// as they finish and the aggregate table is written to `summary_path`.
inline SuiteResult run_suite(const std::vector<Scenario>& scenarios,
                             const std::vector<PlannerKind>& planners,
                             const std::vector<std::uint64_t>& seeds, const std::string& results_path,
                             const std::string& summary_path, EpisodeMode mode = EpisodeMode::Full,
                             const std::string& reference = "rtdp") {
    SuiteResult result;
    ResultsWriter writer(results_path);
    result.run_id = writer.run_id();
    for (const auto& sc : scenarios)
        for (auto kind : planners)
            for (auto seed : seeds) {
                auto ep = run_episode(sc, kind, seed, mode);
                writer.append(ep.record);
                result.records.push_back(std::move(ep.record));
            }
    result.table = aggregate(result.records, reference);
    if (!summary_path.empty()) {
        std::ofstream out(summary_path, std::ios::app);
        if (!out) throw Error(ErrorKind::Io, "cannot open summary file '" + summary_path + "'");
        out << "run " << result.run_id << " (" << mode_name(mode) << ")\n" << format_table(result.table) << "\n";
    }
    return result;
}

/// Proposed schedule against the inadmissible-only variant.
inline SuiteResult ablation_heuristics(const std::vector<Scenario>& scenarios,
                                       const std::vector<std::uint64_t>& seeds,
                                       const std::string& results_path,
                                       const std::string& summary_path,
                                       EpisodeMode mode = EpisodeMode::Full) {
    return run_suite(scenarios, {PlannerKind::Rtdp, PlannerKind::RtdpInadmissible}, seeds,
                     results_path, summary_path, mode);
}

}  // namespace touchloc
