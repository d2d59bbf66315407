#ifndef CONVTRACE_REPORT_HPP
#define CONVTRACE_REPORT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "convtrace/probe.hpp"
#include "convtrace/scenario.hpp"
#include "convtrace/stats.hpp"

namespace convtrace {

constexpr int kReportFormatVersion = 1;
constexpr const char* kToolVersion = "1.0.0";

struct SampleReport {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool valid = true;
    std::string invalid_reason;
    MicroSec converged_at = 0;
    MicroSec last_fib_change = 0;
    std::vector<PairViolation> pairs; // (router, prefix) order
};

struct ExperimentReport {
    int format_version = kReportFormatVersion;
    std::string tool_version = kToolVersion;
    std::string scenario_name;
    std::string scenario_hash;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::vector<SampleReport> sample_reports;
    std::vector<std::size_t> excluded_samples;

    // Summaries over valid samples; exact totals and probe estimates kept
    // separately. Router name -> summary, plus a pooled row.
    std::map<std::string, PercentileSummary> per_router_exact;
    std::map<std::string, PercentileSummary> per_router_probe;
    PercentileSummary pooled_exact;
    PercentileSummary pooled_probe;

    // Total propagation delay per router for withdraw-style scenarios with
    // an identifiable initial/backup egress pair.
    std::map<std::string, MicroSec> propagation_delay;
};

std::string report_to_json(const ExperimentReport& rep);
ExperimentReport report_from_json(const std::string& text);
void save_report(const std::string& path, const ExperimentReport& rep);
ExperimentReport load_report(const std::string& path);

// Plot-ready CSV with one row per (scenario, router, metric) plus pooled
// rows. Stable column order; values rendered as millisecond decimals.
std::string stats_csv(const std::vector<ExperimentReport>& reports);

// Per-router total propagation delay table (see cmd_propagation).
struct PropagationRow {
    std::string router;
    MicroSec to_initial_egress = 0; // includes the external link
    MicroSec initial_to_backup = 0; // inbound external hop + egress-to-backup path
    MicroSec backup_to_router = 0;
    MicroSec total = 0;
};
std::string propagation_csv(const std::vector<PropagationRow>& rows);

} // namespace convtrace

#endif
