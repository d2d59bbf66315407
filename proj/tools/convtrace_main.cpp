#include <cstdint>
#include <string>

#include "CLI11.hpp"

#include "convtrace/commands.hpp"

using namespace convtrace;

int main(int argc, char** argv) {
    CLI::App app{"iBGP convergence simulator and transient-violation trace analyzer"};
    app.require_subcommand(1);

    SimulateOptions sim_opt;
    auto* sim = app.add_subcommand("simulate",
                                   "run a scenario: simulate, probe, emit traces and a report");
    sim->add_option("--scenario", sim_opt.scenario_path, "scenario file (JSON)")->required();
    sim->add_option("--out", sim_opt.out_dir, "output directory")->required();
    std::uint64_t seed = 0;
    bool have_seed = false;
    sim->add_option("--seed", seed, "override the scenario seed")
        ->each([&](const std::string&) { have_seed = true; });
    std::size_t samples = 0;
    bool have_samples = false;
    sim->add_option("--samples", samples, "override the sample count")
        ->each([&](const std::string&) { have_samples = true; });
    int rate = 0;
    bool have_rate = false;
    sim->add_option("--rate", rate, "override the probing rate (pps)")
        ->each([&](const std::string&) { have_rate = true; });
    double sim_quiet_s = 0;
    bool have_sim_quiet = false;
    sim->add_option("--quiet-window", sim_quiet_s, "convergence quiet window in seconds")
        ->each([&](const std::string&) { have_sim_quiet = true; });
    sim->add_flag("--no-trace", [&](std::int64_t) { sim_opt.write_traces = false; },
                  "skip trace emission (report only)");

    AnalyzeOptions an_opt;
    auto* an = app.add_subcommand("analyze", "offline pipeline: trace -> violation report");
    an->add_option("--trace", an_opt.trace_path, "trace file")->required();
    an->add_option("--mapping", an_opt.mapping_path, "hardware mapping file")->required();
    an->add_option("--out", an_opt.out_path, "report output path (JSON)");
    an->add_option("--rate", an_opt.rate_pps, "probing rate used during capture (pps)");
    double an_quiet_s = 10.0;
    an->add_option("--quiet-window", an_quiet_s, "convergence quiet window in seconds");
    an->add_option("--delayer-tolerance", an_opt.delayer_tolerance,
                   "allowed deviation from configured link delays (us)");

    PropagationOptions prop_opt;
    auto* prop = app.add_subcommand("propagation",
                                    "per-router total propagation delay table (CSV)");
    prop->add_option("--scenario", prop_opt.scenario_path, "scenario file (JSON)")->required();
    prop->add_option("--out", prop_opt.out_path, "CSV output path (default stdout)");

    StatsOptions stats_opt;
    auto* stats = app.add_subcommand("stats", "summarize report files into plot-ready CSV");
    stats->add_option("reports", stats_opt.report_paths, "report JSON files")->required();
    stats->add_option("--out", stats_opt.out_path, "CSV output path (default stdout)");

    ValidateOptions val_opt;
    auto* val = app.add_subcommand("validate", "structural checks on a trace file");
    val->add_option("--trace", val_opt.trace_path, "trace file")->required();
    val->add_option("--mapping", val_opt.mapping_path, "hardware mapping file")->required();

    std::string presets_dir = "scenarios";
    auto* presets = app.add_subcommand("presets", "write the shipped preset scenarios");
    presets->add_option("--out", presets_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalidInput;
    }

    if (sim->parsed()) {
        if (have_seed) sim_opt.seed = seed;
        if (have_samples) sim_opt.samples = samples;
        if (have_rate) sim_opt.rate_pps = rate;
        if (have_sim_quiet) sim_opt.quiet_window = static_cast<MicroSec>(sim_quiet_s * 1000000.0);
        return cmd_simulate(sim_opt);
    }
    if (an->parsed()) {
        an_opt.quiet_window = static_cast<MicroSec>(an_quiet_s * 1000000.0);
        return cmd_analyze(an_opt);
    }
    if (prop->parsed()) return cmd_propagation(prop_opt);
    if (stats->parsed()) return cmd_stats(stats_opt);
    if (val->parsed()) return cmd_validate(val_opt);
    if (presets->parsed()) return cmd_presets(presets_dir);
    return kExitInvalidInput;
}
