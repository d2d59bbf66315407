#ifndef CONVTRACE_ANALYZE_HPP
#define CONVTRACE_ANALYZE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "convtrace/event.hpp"
#include "convtrace/stats.hpp"
#include "convtrace/trace.hpp"
#include "convtrace/types.hpp"

namespace convtrace {

struct JourneyKey {
    NodeId src = 0;
    PrefixId prefix = 0;
    std::int64_t seq = 0;

    bool operator<(const JourneyKey& k) const {
        if (src != k.src) return src < k.src;
        if (prefix != k.prefix) return prefix < k.prefix;
        return seq < k.seq;
    }
};

struct LinkObs {
    MicroSec ts = 0;
    NodeId from = 0;
    NodeId to = 0;
    TraceRecord::Stage stage = TraceRecord::Stage::Pre;
};

struct Journey {
    JourneyKey key;
    MicroSec departed = 0;
    std::vector<LinkObs> observations; // time-ordered
    bool delivered = false;
    NodeId terminal_node = 0;          // peer when delivered, else drop router
    MicroSec terminal_ts = 0;
    bool violating = false;
};

// Everything a single streaming pass over a trace yields.
struct TraceScan {
    std::vector<Journey> journeys;           // sorted by key
    // peer node -> prefix -> instant the peer stopped accepting it, derived
    // from the trace's own pre-stage withdraw records
    std::map<std::pair<NodeId, PrefixId>, MicroSec> peer_inactive_from;
    MicroSec first_ts = 0;
    MicroSec last_ts = 0;                    // summary timestamp
    MicroSec last_bgp_ts = kTimeNegInf;      // last non-keepalive BGP record
    bool has_bgp = false;
    std::int64_t capture_drops = 0;
    std::size_t record_count = 0;
};

/// One pass over the trace: groups probe records into journeys by
/// (src, prefix, seq), classifies terminals against the peer activity derived
/// from the trace's own withdraw records, and collects the capture bounds.
/// Throws TraceError on unknown link ids and duplicate observations.
TraceScan scan_trace(const std::string& path, const HardwareMapping& mapping,
                     bool assume_stable_reachable = true);

struct ConvergenceResult {
    MicroSec converged_at = 0;
    bool conclusive = false;
};

/// Timestamp of the last BGP update/withdraw record, provided the capture
/// extends at least `quiet_window` beyond it (keep-alives ignored). An
/// inconclusive result means the capture ended inside the quiet window.
ConvergenceResult detect_convergence(const TraceScan& scan, MicroSec quiet_window);

struct SampleCheckResult {
    bool edges_ok = false;
    bool delayer_ok = false;
    std::int64_t drop_counters = 0;
    std::vector<std::string> notes;

    bool accepted() const { return edges_ok && delayer_ok && drop_counters == 0; }
};

/// Sample correctness: probes departing in the first/last recorded second all
/// delivered; every pre-delay record has exactly one post-delay twin whose
/// timestamp delta matches the configured link delay within `tolerance`; the
/// capture drop counter is zero.
SampleCheckResult check_sample(const std::string& path, const HardwareMapping& mapping,
                               MicroSec tolerance = 50);

struct JourneyEstimate {
    NodeId src = 0;
    PrefixId prefix = 0;
    std::int64_t dropped = 0;     // violating drops
    MicroSec probe_estimate = 0;  // dropped / rate in microseconds
};

/// Per (src, prefix) violation estimate from classified journeys:
/// violating drop count divided by the probing rate. Non-consecutive drops
/// accumulate naturally.
std::vector<JourneyEstimate> violation_from_journeys(const std::vector<Journey>& journeys,
                                                     int rate_pps);

} // namespace convtrace

#endif
