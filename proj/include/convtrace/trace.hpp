#ifndef CONVTRACE_TRACE_HPP
#define CONVTRACE_TRACE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "convtrace/igp.hpp"
#include "convtrace/probe.hpp"
#include "convtrace/sim.hpp"
#include "convtrace/topology.hpp"

namespace convtrace {

// Neutral on-disk capture format: one record per observed packet event on a
// link. Links with a configured delay are observed twice, before and after
// the delay stage; zero-delay links (prober injection) once, undelayed.
struct TraceRecord {
    enum class Kind { Probe, Bgp, Summary };
    enum class Stage { Pre, Post, Undelayed };
    enum class BgpKind { Update, Withdraw, KeepAlive };

    MicroSec ts = 0;
    Kind kind = Kind::Probe;
    NodeId link_from = 0;
    NodeId link_to = 0;
    Stage stage = Stage::Pre;

    // probe fields
    NodeId probe_src = 0;
    PrefixId prefix = 0;
    std::int64_t seq = 0;
    int ttl = 0;

    // bgp fields (prefix shared with probe fields; absent for keep-alives)
    BgpKind bgp_kind = BgpKind::Update;
    bool has_prefix = true;
    NodeId sess_from = 0;
    NodeId sess_to = 0;

    // summary fields
    std::int64_t drops = 0;

    bool operator==(const TraceRecord& o) const;
};

struct MappedLink {
    NodeId from = 0;
    NodeId to = 0;
    MicroSec delay = 0;
};

/// Resolves logical names to the node ids used in trace records, and lists
/// every link with its configured delay. The stand-in for the capture
/// hardware mapping.
struct HardwareMapping {
    int format_version = 1;
    std::map<std::string, NodeId> routers;
    std::map<std::string, NodeId> peers;
    NodeId prober = 0;
    std::vector<MappedLink> links;

    std::optional<MicroSec> link_delay(NodeId a, NodeId b) const;
    std::optional<std::string> node_name(NodeId id) const;
    void validate() const; // unique ids, resolvable endpoints

    static HardwareMapping from_topology(const Topology& topo);
};

void write_mapping(const std::string& path, const HardwareMapping& m);
HardwareMapping read_mapping(const std::string& path);

constexpr const char* kTraceHeader = "#convtrace v1";

/// Writers/readers for the line-oriented trace format. Round trips are
/// lossless and byte stable. Readers throw TraceError on version mismatch,
/// malformed lines (with line number) and a missing summary record.
void write_trace(const std::string& path, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_trace(const std::string& path);
void for_each_record(const std::string& path, const std::function<void(const TraceRecord&)>& fn);

std::string record_to_line(const TraceRecord& r);
TraceRecord record_from_line(const std::string& line, std::size_t lineno);

// Identity shared by the pre/post observations of one packet on one link;
// used to pair records around the delay stage.
std::string twin_identity(const TraceRecord& r);

struct Finding {
    std::size_t record_index = 0; // 0-based, counting data records
    std::string what;
};

/// Structural validation: monotone timestamps per link, pre/post twinning on
/// delayed links, unknown ids, duplicate probe observations, summary present
/// and last. Returns findings instead of throwing; empty = valid.
std::vector<Finding> validate_trace(const std::vector<TraceRecord>& records,
                                    const HardwareMapping& mapping);

// --- emission from simulator / probe-engine results ---------------------

struct TraceBuild {
    std::vector<TraceRecord> records; // timestamp-ordered, summary last
};

/// Expands BGP messages along their IGP hop path and probe fates along their
/// walks into per-link records, merges and sorts them, and appends the
/// summary record. Deterministic for identical inputs.
TraceBuild build_trace(const Topology& topo, const IgpState& igp,
                       const std::vector<BgpMessage>& messages,
                       const std::vector<ProbeFate>& fates);

// Node id helpers shared by emission and analysis: routers occupy
// [0, R), peers [R, R+P), the prober is R+P.
NodeId router_node(const Topology& topo, RouterId r);
NodeId peer_node(const Topology& topo, PeerId p);
NodeId prober_node(const Topology& topo);

} // namespace convtrace

#endif
