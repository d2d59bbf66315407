#ifndef CONVTRACE_SIM_HPP
#define CONVTRACE_SIM_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "convtrace/event.hpp"
#include "convtrace/fib.hpp"
#include "convtrace/igp.hpp"
#include "convtrace/route.hpp"
#include "convtrace/topology.hpp"

namespace convtrace {

// Endpoint of a BGP session: a router or an external peer.
struct NodeRef {
    bool is_peer = false;
    std::uint32_t id = 0;

    static NodeRef router(RouterId r) { return {false, r}; }
    static NodeRef peer(PeerId p) { return {true, p}; }
    bool operator==(const NodeRef& o) const { return is_peer == o.is_peer && id == o.id; }
};

struct BgpMessage {
    NodeRef from;
    NodeRef to;
    enum class Kind { Update, Withdraw } kind = Kind::Update;
    PrefixId prefix = 0;
    Route route; // valid iff kind == Update
    MicroSec sent_at = 0;
    MicroSec arrives_at = 0;    // sent_at + IGP path delay (or peer link delay)
    std::uint64_t seq = 0;      // global emission order; ties on arrives_at resolve by seq
    MicroSec cum_wait = 0;      // queueing delay accumulated along the causal chain
};

// Session key inside a router's Adj-RIB-In / Adj-RIB-Out.
struct SessionKey {
    bool external = false;
    std::uint32_t id = 0; // PeerId if external, RouterId otherwise

    bool operator<(const SessionKey& o) const {
        if (external != o.external) return external;
        return id < o.id;
    }
    bool operator==(const SessionKey& o) const { return external == o.external && id == o.id; }
};

struct PrefixRib {
    std::map<SessionKey, Route> in;   // Adj-RIB-In
    std::map<RouterId, Route> out;    // last route advertised per iBGP session
    std::optional<Route> best;
};

struct RouterRib {
    std::vector<PrefixRib> prefixes;
};

struct ExternalRoute {
    PeerId peer = 0;
    PrefixId prefix = 0;
    int as_path_len = 1;
};

struct InitialState {
    std::vector<RouterRib> ribs;
    FibTimeline fib;                 // one entry per (router, prefix), since = -inf
    PeerActivity activity;           // windows for initially announced routes
    std::vector<ExternalRoute> external_routes;
};

struct SimResult {
    FibTimeline fib;
    std::vector<BgpMessage> messages;
    MicroSec converged_at = 0;       // last message arrival (== last BGP trace timestamp)
    MicroSec last_fib_change = 0;
    PeerActivity activity;
    std::uint64_t items_processed = 0;
    std::vector<RouterRib> final_ribs;
};

/// Computes the converged pre-event state as a deterministic fixed point of
/// decide_best + ibgp_propagation_targets. Throws ConvergenceError if no
/// fixed point is reached within |routers|^2 synchronous rounds.
InitialState build_initial_state(const Topology& topo, const IgpState& igp,
                                 const IbgpConfig& ibgp,
                                 const std::vector<ExternalRoute>& external_routes,
                                 std::size_t num_prefixes);

/// Applies the event to the external routes and peer activity. Returns the
/// per-prefix messages the peer emits at t0 (in event prefix order).
std::vector<BgpMessage> apply_event_to_peer(const Topology& topo, const EventSpec& event,
                                            std::vector<ExternalRoute>& external_routes,
                                            PeerActivity& activity);

struct RunLimits {
    std::uint64_t max_queue_items = 100000000ull; // runaway guard
};

/// Executes one BGP event against a converged initial state. Each router owns
/// a FIFO work queue; items are processed one at a time for per_prefix_cost
/// (+- jitter) microseconds; completion updates the Adj-RIB-In, re-runs the
/// decision process and, iff the best route changed, updates the FIB entry at
/// the completion instant and emits the per-prefix messages. Deterministic
/// given the seed.
SimResult run_event(const Topology& topo, const IgpState& igp, const IbgpConfig& ibgp,
                    const InitialState& initial, const EventSpec& event,
                    const ProcessingModel& processing, std::uint64_t seed,
                    const RunLimits& limits = {});

// Fixed-point check used by tests: re-running the decision process on the
// final RIBs changes nothing. Returns true when stable.
bool is_fixed_point(const std::vector<RouterRib>& ribs);

} // namespace convtrace

#endif
