// Command-line front end: run scenarios, validate scenario files, and
// re-render snapshot CSVs. Exit codes: 0 success, 2 validation failure,
// 3 runtime error.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gridscout/gridscout.hpp"

namespace fs = std::filesystem;
using namespace gridscout;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

void print_provenance(const ScenarioLoadResult& loaded, std::ostream& out) {
    if (!loaded.name.empty()) out << "scenario: " << loaded.name << '\n';
    if (loaded.applied_defaults.empty()) {
        out << "applied defaults: none\n";
        return;
    }
    out << "applied defaults:\n";
    for (const std::string& line : loaded.applied_defaults) out << "  " << line << '\n';
}

void write_snapshots(const SimEngine& engine, const fs::path& out_dir) {
    const GridSpec& grid = engine.config().grid;
    const std::int64_t tick = engine.tick();
    auto emit = [&out_dir](const SnapshotData& snap, const std::string& base) {
        write_snapshot(snap, out_dir / (base + ".csv"), false);
        write_snapshot(snap, out_dir / (base + ".pgm"), true);
    };
    emit(snapshot_of(engine.evidence(), SnapshotLayer::evidence_t),
         snapshot_basename(SnapshotLayer::evidence_t, tick));
    emit(snapshot_of(engine.evidence(), SnapshotLayer::evidence_f),
         snapshot_basename(SnapshotLayer::evidence_f, tick));
    emit(snapshot_of(engine.posterior()),
         snapshot_basename(SnapshotLayer::posterior, tick));
    for (const FreeEnergyField& f : engine.fe_fields()) {
        const int agent = static_cast<int>(&f - engine.fe_fields().data());
        emit(snapshot_of(f, grid), snapshot_basename(SnapshotLayer::free_energy, tick, agent));
    }
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir, bool have_seed,
            std::uint64_t seed, bool have_snapshot_every, std::int64_t snapshot_every,
            int threads) {
    ScenarioLoadResult loaded;
    try {
        loaded = load_scenario(scenario_path);
        if (have_seed) loaded.config.seed = seed;
        if (have_snapshot_every) loaded.config.snapshot_every = snapshot_every;
        loaded.config.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    try {
        const fs::path out(out_dir);
        fs::create_directories(out);
        {
            std::ofstream prov(out / "provenance.txt");
            if (!prov) throw std::runtime_error("cannot write " + (out / "provenance.txt").string());
            print_provenance(loaded, prov);
        }

        RunOptions opts;
        opts.threads = threads;
        opts.snapshot_hook = [&out](const SimEngine& e) { write_snapshots(e, out); };
        const RunResult result = run(loaded.config, opts);

        write_trajectory_csv(result.log, out / "trajectory.csv");
        write_metrics(result.metrics, out / "metrics.txt");

        std::cout << "ran " << loaded.config.total_ticks() << " ticks, "
                  << loaded.config.agents.size() << " agent(s); mean step "
                  << format_g9(result.metrics.mean_step_ms) << " ms; outputs in " << out.string()
                  << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_validate(const std::string& scenario_path) {
    try {
        const ScenarioLoadResult loaded = load_scenario(scenario_path);
        const ScenarioConfig& cfg = loaded.config;
        std::cout << "ok: " << cfg.grid.width_cells << "x" << cfg.grid.height_cells << " cells, "
                  << cfg.agents.size() << " agent(s), " << cfg.targets.size() << " target(s), "
                  << cfg.total_ticks() << " ticks\n";
        print_provenance(loaded, std::cout);
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}

int cmd_render(const std::string& snapshot_path, const std::string& format,
               std::string out_path) {
    SnapshotData snap;
    try {
        snap = read_snapshot_csv(fs::path(snapshot_path));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    try {
        if (out_path.empty())
            out_path = fs::path(snapshot_path).replace_extension(format).string();
        write_snapshot(snap, out_path, format == "pgm");
        std::cout << "wrote " << out_path << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evidence-grid surveillance planner"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, snapshot_path, format, render_out;
    std::uint64_t seed = 0;
    std::int64_t snapshot_every = 25;
    int threads = 1;

    CLI::App* run_cmd = app.add_subcommand("run", "execute a scenario and write outputs");
    run_cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    run_cmd->add_option("--out", out_dir, "output directory")->required();
    run_cmd->add_option("--seed", seed, "override the scenario seed");
    run_cmd->add_option("--snapshot-every", snapshot_every, "override snapshot cadence (ticks)");
    run_cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    CLI::App* validate_cmd = app.add_subcommand("validate", "check a scenario file");
    validate_cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();

    CLI::App* render_cmd = app.add_subcommand("render", "convert a snapshot CSV");
    render_cmd->add_option("--snapshot", snapshot_path, "snapshot CSV file")->required();
    render_cmd->add_option("--format", format, "output format")
        ->required()
        ->check(CLI::IsMember({"pgm", "csv"}));
    render_cmd->add_option("--out", render_out, "output file (default: input with new extension)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    if (run_cmd->parsed())
        return cmd_run(scenario_path, out_dir, run_cmd->count("--seed") > 0, seed,
                       run_cmd->count("--snapshot-every") > 0, snapshot_every, threads);
    if (validate_cmd->parsed()) return cmd_validate(scenario_path);
    if (render_cmd->parsed()) return cmd_render(snapshot_path, format, render_out);
    return kExitValidation;
}
