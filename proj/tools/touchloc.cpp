// touchloc command-line driver: single episodes, planner comparisons,
// heuristic ablation and trace replay.
//
// Exit codes: 0 ok, 1 replay mismatch, 2 invalid input, 3 I/O failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "touchloc/harness.hpp"
#include "touchloc/presets.hpp"
#include "touchloc/serialize.hpp"

namespace fs = std::filesystem;
using namespace touchloc;

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

// Default output location; TOUCHLOC_OUTPUT_DIR replaces it.
fs::path output_dir() {
    if (const char* env = std::getenv("TOUCHLOC_OUTPUT_DIR"); env && *env) return env;
    return "results";
}

fs::path resolve_output(const std::string& given, const std::string& fallback) {
    const fs::path p = given.empty() ? output_dir() / fallback : fs::path(given);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
        if (ec) throw Error(ErrorKind::Io, "cannot create '" + p.parent_path().string() + "': " + ec.message());
    }
    return p;
}

// "preset:<name>" selects a built-in scenario; anything else is a file path.
Scenario load(const std::string& spec) {
    if (spec.rfind("preset:", 0) == 0) return preset_scenario(spec.substr(7));
    return load_scenario(spec);
}

std::vector<Scenario> load_all(const std::vector<std::string>& specs) {
    std::vector<Scenario> out;
    if (specs.empty()) return default_scenarios();
    for (const auto& s : specs) out.push_back(load(s));
    return out;
}

void apply_budget(Scenario& sc, long budget, const std::string& kind) {
    if (!kind.empty()) {
        if (kind == "backups") sc.planner.budget_kind = BudgetKind::Backups;
        else if (kind == "ms") sc.planner.budget_kind = BudgetKind::Milliseconds;
        else throw Error(ErrorKind::InvalidScenario, "budget kind must be backups or ms");
    }
    if (budget > 0) sc.planner.budget = budget;
    sc.planner.validate();
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, int count) {
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < count; ++i) seeds.push_back(first + static_cast<std::uint64_t>(i));
    return seeds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contact-only target localization: hierarchical belief planning benchmarks"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run one episode and append its record");
    std::string run_scenario;
    std::string run_planner = "rtdp";
    std::string run_mode = "full";
    std::uint64_t run_seed = 1;
    long run_budget = 0;
    std::string run_budget_kind;
    std::string run_output;
    std::string run_trace;
    run->add_option("-s,--scenario", run_scenario, "Scenario file or preset:<name>")->required();
    run->add_option("-p,--planner", run_planner, "rtdp | rtdp-inad | tbl | frontier");
    run->add_option("--seed", run_seed, "Episode seed");
    run->add_option("-b,--budget", run_budget, "Planner budget (overrides the scenario)");
    run->add_option("--budget-kind", run_budget_kind, "backups | ms");
    run->add_option("-m,--mode", run_mode, "full | volumetric | particle");
    run->add_option("-o,--output", run_output, "Results file (default <outdir>/results.csv)");
    run->add_option("--trace", run_trace, "Episode trace file (default <outdir>/<id>-<planner>-<seed>.trace)");

    // compare
    auto* compare = app.add_subcommand("compare", "Run planners over seeds and print relative metrics");
    std::vector<std::string> cmp_scenarios;
    std::vector<std::string> cmp_planners{"rtdp", "tbl", "frontier"};
    std::string cmp_mode = "full";
    std::uint64_t cmp_first = 1;
    int cmp_seeds = 30;
    long cmp_budget = 0;
    std::string cmp_output;
    std::string cmp_summary;
    compare->add_option("-s,--scenario", cmp_scenarios, "Scenario files or preset:<name> (default: built-in suite)");
    compare->add_option("-p,--planners", cmp_planners, "Planners; the first is the reference");
    compare->add_option("-m,--mode", cmp_mode, "full | volumetric | particle");
    compare->add_option("--first-seed", cmp_first, "First seed");
    compare->add_option("-n,--seeds", cmp_seeds, "Number of seeds")->check(CLI::PositiveNumber);
    compare->add_option("-b,--budget", cmp_budget, "Planner budget (overrides the scenarios)");
    compare->add_option("-o,--output", cmp_output, "Results file (default <outdir>/results.csv)");
    compare->add_option("--summary", cmp_summary, "Summary file (default <outdir>/summary.txt)");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "Combined heuristic schedule vs inadmissible-only");
    std::vector<std::string> abl_scenarios;
    std::string abl_mode = "full";
    std::uint64_t abl_first = 1;
    int abl_seeds = 30;
    long abl_budget = 0;
    std::string abl_output;
    std::string abl_summary;
    ablate->add_option("-s,--scenario", abl_scenarios, "Scenario files or preset:<name> (default: built-in suite)");
    ablate->add_option("-m,--mode", abl_mode, "full | volumetric | particle");
    ablate->add_option("--first-seed", abl_first, "First seed");
    ablate->add_option("-n,--seeds", abl_seeds, "Number of seeds")->check(CLI::PositiveNumber);
    ablate->add_option("-b,--budget", abl_budget, "Planner budget (overrides the scenarios)");
    ablate->add_option("-o,--output", abl_output, "Results file (default <outdir>/ablation.csv)");
    ablate->add_option("--summary", abl_summary, "Summary file (default <outdir>/ablation.txt)");

    // replay
    auto* replay_cmd = app.add_subcommand("replay", "Re-execute a recorded episode and verify it");
    std::string replay_path;
    replay_cmd->add_option("trace", replay_path, "Episode trace file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    try {
        if (*run) {
            Scenario sc = load(run_scenario);
            apply_budget(sc, run_budget, run_budget_kind);
            const auto kind = parse_planner(run_planner);
            const auto mode = parse_mode(run_mode);
            const auto ep = run_episode(sc, kind, run_seed, mode);
            const auto results = resolve_output(run_output, "results.csv");
            ResultsWriter writer(results.string());
            writer.append(ep.record);
            const auto trace = resolve_output(
                run_trace, sc.id + "-" + run_planner + "-" + std::to_string(run_seed) + ".trace");
            std::ofstream out(trace);
            if (!out) throw Error(ErrorKind::Io, "cannot open trace file '" + trace.string() + "'");
            write_trace(out, sc, kind, mode, ep);
            if (!out) throw Error(ErrorKind::Io, "write failed on '" + trace.string() + "'");
            std::cout << format_record(ep.record, writer.run_id()) << "\n";
            std::cout << "results: " << results.string() << "\ntrace: " << trace.string() << "\n";
            return 0;
        }
        if (*compare) {
            auto scenarios = load_all(cmp_scenarios);
            for (auto& sc : scenarios) apply_budget(sc, cmp_budget, "");
            std::vector<PlannerKind> planners;
            for (const auto& p : cmp_planners) planners.push_back(parse_planner(p));
            if (planners.empty()) throw Error(ErrorKind::InvalidScenario, "no planners given");
            const auto results = resolve_output(cmp_output, "results.csv");
            const auto summary = resolve_output(cmp_summary, "summary.txt");
            const auto r = run_suite(scenarios, planners, seed_range(cmp_first, cmp_seeds),
                                     results.string(), summary.string(), parse_mode(cmp_mode),
                                     planner_name(planners.front()));
            std::cout << "run " << r.run_id << ": " << r.records.size() << " episodes\n"
                      << format_table(r.table);
            return 0;
        }
        if (*ablate) {
            auto scenarios = load_all(abl_scenarios);
            for (auto& sc : scenarios) apply_budget(sc, abl_budget, "");
            const auto results = resolve_output(abl_output, "ablation.csv");
            const auto summary = resolve_output(abl_summary, "ablation.txt");
            const auto r = ablation_heuristics(scenarios, seed_range(abl_first, abl_seeds),
                                               results.string(), summary.string(), parse_mode(abl_mode));
            std::cout << "run " << r.run_id << ": " << r.records.size() << " episodes\n"
                      << format_table(r.table);
            return 0;
        }
        if (*replay_cmd) {
            std::ifstream in(replay_path);
            if (!in) throw Error(ErrorKind::Io, "cannot open trace file '" + replay_path + "'");
            const auto trace = read_trace(in, replay_path);
            const auto report = replay(trace);
            if (report.ok()) {
                std::cout << "replay ok: " << trace.steps.size() << " steps, record identical\n";
                return 0;
            }
            if (!report.steps_match) {
                std::cout << "replay diverged at step " << report.first_divergence << " (recorded "
                          << trace.steps.size() << ", replayed " << report.replayed.steps.size() << ")\n";
            }
            if (!report.record_match) {
                std::cout << "record mismatch\n  recorded: " << format_record(trace.record, 0)
                          << "\n  replayed: " << format_record(report.replayed.record, 0) << "\n";
            }
            return kExitMismatch;
        }
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return e.kind() == ErrorKind::Io ? kExitIo : kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return 0;
}
