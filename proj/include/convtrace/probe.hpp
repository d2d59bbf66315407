#ifndef CONVTRACE_PROBE_HPP
#define CONVTRACE_PROBE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "convtrace/event.hpp"
#include "convtrace/fib.hpp"
#include "convtrace/igp.hpp"
#include "convtrace/topology.hpp"

namespace convtrace {

struct ProbeConfig {
    int rate_pps = 1000;
    std::vector<RouterId> sources;
    std::vector<PrefixId> prefixes;   // sampled
    MicroSec window_start = -sec(1) - ms(500); // relative to t0, must be < 0
    MicroSec window_end = sec(2);              // absolute end is resolved by the caller
    int ttl = 64;
    bool rpf_drop = true;

    MicroSec step() const { return 1000000 / rate_pps; }
    void validate() const;
};

// The immutable data plane a packet walk evaluates against.
struct DataPlaneView {
    const Topology* topo = nullptr;
    const IgpState* igp = nullptr;
    const FibTimeline* fib = nullptr;
    const PeerActivity* activity = nullptr;
    bool rpf_drop = true;
    int ttl = 64;
};

struct ProbeHop {
    RouterId router = 0;
    MicroSec arrived_at = 0;
};

struct ProbeFate {
    enum class Terminal {
        Delivered,
        DroppedBlackHole,
        DroppedRpf,
        DroppedTtl,
        DroppedInactivePeer,
    };

    RouterId src = 0;
    PrefixId prefix = 0;
    std::int64_t seq = 0;
    int ttl = 64; // initial budget, echoed into trace records
    MicroSec departed_at = 0;
    std::vector<ProbeHop> hops; // first hop is the source router at departure
    Terminal terminal = Terminal::Delivered;
    RouterId dropped_at = kNoRouter; // router terminals
    PeerId peer = 0;                 // Delivered / DroppedInactivePeer
    MicroSec terminal_at = 0;
    bool violating = false;

    bool dropped() const { return terminal != Terminal::Delivered; }
};

/// Hop-by-hop walk of one packet through the time-evolving data plane.
/// `record_hops` can be disabled for bulk series (also skips the stable-state
/// classification of `violating` when `stable_ok` is supplied).
ProbeFate walk_packet(const DataPlaneView& view, RouterId src, PrefixId prefix,
                      MicroSec depart_time, bool record_hops = true);

// Whether a packet from src toward prefix is delivered in both the initial
// and the final stable state (Definition of a transiently violating packet
// requires it). Evaluated by walking far before / after all change instants.
struct StableStates {
    bool initial_ok = false;
    bool final_ok = false;
    bool both() const { return initial_ok && final_ok; }
};
StableStates stable_reachability(const DataPlaneView& view, RouterId src, PrefixId prefix);

/// Exact violating departure intervals for (src, prefix): candidate boundary
/// instants are the back-propagated images of every FIB change and peer
/// activity flip along every realized path prefix; the fate is constant
/// between consecutive boundaries, so one walk per gap classifies it.
std::vector<Interval> exact_violation_intervals(const DataPlaneView& view, RouterId src,
                                                PrefixId prefix);

struct PairViolation {
    RouterId src = 0;
    PrefixId prefix = 0;
    std::vector<Interval> exact;      // maximal, disjoint, ordered
    MicroSec exact_total = 0;
    MicroSec alt_exact_total = 0;     // egress-receipt attribution variant
    std::int64_t probe_dropped = 0;   // violating drops observed by the series
    MicroSec probe_estimate = 0;      // probe_dropped / rate, in microseconds
    int rate_pps = 0;
};

struct ProbeSeriesResult {
    std::vector<ProbeFate> fates;       // all walked probes, in (src, prefix, seq) order
    std::vector<PairViolation> pairs;   // estimates merged with exact intervals
    std::vector<std::string> notes;     // Nyquist and other soft warnings
};

/// Injects probes at uniform 1/rate spacing per (src, prefix) over
/// [t0 + window_start, window_end_abs], walks each one, and sets
/// probe_estimate = violating drop count / rate. Throws SampleError when
/// probes departing in the first or last second of the window are not all
/// delivered (the window does not bracket the convergence process).
ProbeSeriesResult probe_series(const DataPlaneView& view, const ProbeConfig& cfg, MicroSec t0,
                               MicroSec window_end_abs,
                               const PeerActivity* alt_activity = nullptr);

} // namespace convtrace

#endif
