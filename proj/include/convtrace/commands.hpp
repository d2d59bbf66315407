#ifndef CONVTRACE_COMMANDS_HPP
#define CONVTRACE_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "convtrace/report.hpp"
#include "convtrace/scenario.hpp"

namespace convtrace {

// Exit-code contract: 0 success, 1 invalid input, 2 invalid sample,
// 3 internal error.
constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 1;
constexpr int kExitInvalidSample = 2;
constexpr int kExitInternal = 3;

struct SimulateOptions {
    std::string scenario_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;     // overrides the scenario seed
    std::optional<std::size_t> samples;
    std::optional<int> rate_pps;
    std::optional<MicroSec> quiet_window;
    bool write_traces = true;
    bool quiet = false;
};

struct AnalyzeOptions {
    std::string trace_path;
    std::string mapping_path;
    std::string out_path;                  // report JSON; empty = stdout summary only
    int rate_pps = 1000;
    MicroSec quiet_window = sec(10);
    MicroSec delayer_tolerance = 50;
    bool assume_stable_reachable = true;
    bool quiet = false;
};

struct PropagationOptions {
    std::string scenario_path;
    std::string out_path; // CSV; empty = stdout
};

struct StatsOptions {
    std::vector<std::string> report_paths;
    std::string out_path; // CSV; empty = stdout
};

struct ValidateOptions {
    std::string trace_path;
    std::string mapping_path;
};

// Orchestration used by both the CLI and the test suites. Each returns the
// process exit code and reports diagnostics on stderr.
int cmd_simulate(const SimulateOptions& opt, ExperimentReport* out_report = nullptr);
int cmd_analyze(const AnalyzeOptions& opt, ExperimentReport* out_report = nullptr);
int cmd_propagation(const PropagationOptions& opt, std::vector<PropagationRow>* out_rows = nullptr);
int cmd_stats(const StatsOptions& opt, std::string* out_csv = nullptr);
int cmd_validate(const ValidateOptions& opt, std::vector<Finding>* out_findings = nullptr);
int cmd_presets(const std::string& out_dir);

// Library-level single-sample pipeline shared by cmd_simulate and the tests.
struct SampleRun {
    SimResult sim;
    ProbeSeriesResult probes;
    InitialState initial;
    IgpState igp;
    MicroSec t0 = 0;
    MicroSec capture_end = 0;
    std::uint64_t sample_seed = 0;
    std::vector<RouterId> sources;
    std::vector<PrefixId> probe_prefixes;
};
SampleRun run_sample(const ScenarioSpec& spec, std::size_t sample_index,
                     bool with_probes = true);

// Total propagation delay per router for a scenario with an identifiable
// initial/backup egress pair. Throws ScenarioError when ambiguous.
std::vector<PropagationRow> propagation_table(const ScenarioSpec& spec);

} // namespace convtrace

#endif
