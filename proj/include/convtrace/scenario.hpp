#ifndef CONVTRACE_SCENARIO_HPP
#define CONVTRACE_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "convtrace/event.hpp"
#include "convtrace/sim.hpp"
#include "convtrace/topology.hpp"

namespace convtrace {

struct ExternalRouteSpec {
    std::string peer;
    int as_path_len = 1;
    bool all_prefixes = true;
    std::vector<PrefixId> prefixes; // used when all_prefixes == false
};

struct EventSpecConfig {
    std::string kind = "withdraw"; // withdraw | update-worse | announce
    std::string peer;
    bool all_prefixes = true;
    std::vector<PrefixId> prefixes;
    MicroSec time = 0;
    int prepend_delta = 2;
    int announce_as_path_len = 1;
};

struct ProcessingSpec {
    MicroSec default_cost = 95; // per prefix per router, microseconds
    std::vector<std::pair<std::string, MicroSec>> overrides;
    std::uint32_t jitter_ppm = 0;
};

struct ProbeSpec {
    int rate_pps = 1000;
    bool all_sources = true;
    std::vector<std::string> sources;
    std::size_t sample_prefixes = 10;      // deterministic seeded choice
    std::vector<PrefixId> fixed_prefixes;  // overrides sampling when non-empty
    MicroSec window_start = -sec(1) - ms(500);
    std::optional<MicroSec> window_end;    // absent = converged_at + quiet window
    int ttl = 64;
    bool rpf_drop = true;
};

/// A full experiment description; the on-disk form is a versioned JSON
/// document (see README for the schema).
struct ScenarioSpec {
    int format_version = 1;
    std::string name;
    Topology topology;
    IbgpConfig ibgp;
    std::size_t prefix_count = 1;
    std::vector<ExternalRouteSpec> external_routes;
    EventSpecConfig event;
    ProcessingSpec processing;
    ProbeSpec probe;
    std::size_t samples = 1;
    std::uint64_t seed = 1;
    MicroSec quiet_window = sec(10);

    void validate() const;

    EventSpec resolve_event(const Topology& topo) const;
    ProcessingModel resolve_processing() const;
    std::vector<ExternalRoute> resolve_external_routes() const;
    std::vector<RouterId> resolve_sources() const;
    std::vector<PrefixId> resolve_probe_prefixes(std::uint64_t sample_seed) const;
};

ScenarioSpec load_scenario(const std::string& path);
void save_scenario(const std::string& path, const ScenarioSpec& spec);
std::string scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const std::string& text);
std::string scenario_hash(const ScenarioSpec& spec); // FNV-1a over canonical form

// --- shipped presets -----------------------------------------------------

// Three routers in a line, 10 ms links, egress at one end with a backup at
// the other; the workhorse analytic scenario.
ScenarioSpec preset_path3(MicroSec processing_cost = ms(100));
// Same line, but the backup egress attaches to the middle router, producing
// non-consecutive violation intervals at the far end.
ScenarioSpec preset_path3_backup_middle(MicroSec processing_cost = ms(100));

struct AbileneOptions {
    std::string event = "withdraw";          // withdraw | update-worse | announce
    std::size_t prefixes = 10000;
    bool visible_backup = false;             // backup AS path equals the primary's
    std::vector<std::string> reflectors;     // empty = full mesh
    std::string backup_at = "KansasCity";
    MicroSec processing_cost = 95;
    std::uint32_t jitter_ppm = 0;
};
ScenarioSpec preset_abilene(const AbileneOptions& opt = {});

// name -> builder for every shipped preset file.
std::vector<std::pair<std::string, ScenarioSpec>> shipped_presets();

} // namespace convtrace

#endif
