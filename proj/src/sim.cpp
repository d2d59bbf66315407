#include "convtrace/sim.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <tuple>

#include "convtrace/rng.hpp"

namespace convtrace {

void EventSpec::validate(std::size_t num_prefixes) const {
    if (prefixes.empty()) throw ScenarioError("event affects no prefixes");
    std::vector<PrefixId> sorted = prefixes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ScenarioError("event prefix list contains duplicates");
    if (sorted.back() >= num_prefixes) throw ScenarioError("event prefix id out of range");
    if (kind == Kind::UpdateWorse && prepend_delta < 0)
        throw ScenarioError("prepend delta must be non-negative");
    if (kind == Kind::Announce && announce_as_path_len < 1)
        throw ScenarioError("announced AS-path length must be positive");
}

namespace {

FibAction action_for(RouterId holder, const std::optional<Route>& best) {
    if (!best) return FibAction::black_hole();
    if (best->egress == holder) return FibAction::deliver(best->origin_peer);
    return FibAction::forward(best->egress);
}

std::vector<Route> candidates_of(const PrefixRib& rib) {
    std::vector<Route> v;
    v.reserve(rib.in.size());
    for (const auto& [k, r] : rib.in) v.push_back(r);
    return v;
}

// Outcome of re-running the decision process at one router for one prefix:
// the new advertisements (route per target) and withdrawals (targets whose
// previous advertisement is no longer valid).
struct Decision {
    bool best_changed = false;
    std::optional<Route> best;
    std::vector<std::pair<RouterId, Route>> advertise;
    std::vector<RouterId> withdraw;
};

Decision decide_and_diff(PrefixRib& rib, const IbgpConfig& ibgp, RouterId me,
                         std::size_t num_routers) {
    Decision d;
    d.best = decide_best(candidates_of(rib));
    const bool changed = rib.best.has_value() != d.best.has_value() ||
                         (rib.best && d.best && !(*rib.best == *d.best));
    d.best_changed = changed;
    if (!changed) return d;
    rib.best = d.best;

    std::vector<RouterId> targets;
    if (d.best)
        targets = ibgp_propagation_targets(ibgp, me, d.best->learned_from, num_routers);

    for (RouterId t : targets) {
        auto it = rib.out.find(t);
        if (it != rib.out.end() && it->second.same_route(*d.best)) continue; // already advertised
        rib.out[t] = *d.best;
        d.advertise.push_back({t, *d.best});
    }
    // previously advertised sessions that are no longer targets
    for (auto it = rib.out.begin(); it != rib.out.end();) {
        if (std::find(targets.begin(), targets.end(), it->first) == targets.end()) {
            d.withdraw.push_back(it->first);
            it = rib.out.erase(it);
        } else {
            ++it;
        }
    }
    return d;
}

// Applies one received message to the Adj-RIB-In. Returns false when it was
// a withdraw for a route the router did not hold (still a processed item).
void apply_to_rib_in(PrefixRib& rib, const SessionKey& from, const BgpMessage::Kind kind,
                     const Route* route, RouterId me, const IgpState& igp) {
    if (kind == BgpMessage::Kind::Withdraw) {
        rib.in.erase(from);
        return;
    }
    Route r = *route;
    r.learned_from = from.external ? LearnedFrom::external()
                                   : LearnedFrom::ibgp(static_cast<RouterId>(from.id));
    r.igp_cost_to_egress = igp.path_cost(me, r.egress);
    rib.in[from] = r;
}

} // namespace

InitialState build_initial_state(const Topology& topo, const IgpState& igp,
                                 const IbgpConfig& ibgp,
                                 const std::vector<ExternalRoute>& external_routes,
                                 std::size_t num_prefixes) {
    const std::size_t n = topo.num_routers();
    InitialState st;
    st.external_routes = external_routes;
    st.ribs.resize(n);
    for (auto& rr : st.ribs) rr.prefixes.resize(num_prefixes);

    for (const auto& er : external_routes) {
        if (er.prefix >= num_prefixes) throw ScenarioError("external route prefix out of range");
        const RouterId holder = topo.peers.at(er.peer).attached_to;
        Route r;
        r.prefix = er.prefix;
        r.origin_peer = er.peer;
        r.egress = holder;
        r.as_path_len = er.as_path_len;
        r.learned_from = LearnedFrom::external();
        r.igp_cost_to_egress = 0;
        st.ribs[holder].prefixes[er.prefix].in[{true, er.peer}] = r;
        st.activity.set_window(er.peer, er.prefix, kTimeNegInf, kTimePosInf);
    }

    // Synchronous rounds: each round every router re-decides and its
    // advertisements/withdrawals are delivered before the next round.
    const std::size_t max_rounds = n * n + 2;
    struct Delivery {
        RouterId to;
        SessionKey from;
        BgpMessage::Kind kind;
        Route route;
        PrefixId prefix;
    };
    bool changed = true;
    std::size_t round = 0;
    while (changed) {
        if (++round > max_rounds)
            throw ConvergenceError("initial state did not converge within |routers|^2 rounds");
        changed = false;
        std::vector<Delivery> deliveries;
        for (RouterId r = 0; r < n; ++r) {
            for (PrefixId p = 0; p < num_prefixes; ++p) {
                Decision d = decide_and_diff(st.ribs[r].prefixes[p], ibgp, r, n);
                if (!d.best_changed) continue;
                changed = true;
                for (auto& [t, route] : d.advertise)
                    deliveries.push_back({t, {false, r}, BgpMessage::Kind::Update, route, p});
                for (RouterId t : d.withdraw)
                    deliveries.push_back({t, {false, r}, BgpMessage::Kind::Withdraw, {}, p});
            }
        }
        for (const auto& del : deliveries)
            apply_to_rib_in(st.ribs[del.to].prefixes[del.prefix], del.from, del.kind, &del.route,
                            del.to, igp);
    }

    st.fib = FibTimeline(n, num_prefixes);
    for (RouterId r = 0; r < n; ++r)
        for (PrefixId p = 0; p < num_prefixes; ++p)
            st.fib.push(r, p, kTimeNegInf, action_for(r, st.ribs[r].prefixes[p].best));
    return st;
}

std::vector<BgpMessage> apply_event_to_peer(const Topology& topo, const EventSpec& event,
                                            std::vector<ExternalRoute>& external_routes,
                                            PeerActivity& activity) {
    const PeerId peer = event.at_peer;
    if (peer >= topo.num_peers()) throw ScenarioError("event peer out of range");
    const RouterId border = topo.peers[peer].attached_to;
    const MicroSec link = topo.peers[peer].delay;

    auto find_route = [&](PrefixId p) -> ExternalRoute* {
        for (auto& er : external_routes)
            if (er.peer == peer && er.prefix == p) return &er;
        return nullptr;
    };

    std::vector<BgpMessage> out;
    std::uint64_t seq = 0;
    for (PrefixId p : event.prefixes) {
        BgpMessage m;
        m.from = NodeRef::peer(peer);
        m.to = NodeRef::router(border);
        m.prefix = p;
        m.sent_at = event.time;
        m.arrives_at = event.time + link;
        m.seq = seq++;

        ExternalRoute* existing = find_route(p);
        switch (event.kind) {
        case EventSpec::Kind::Withdraw: {
            if (!existing)
                throw ScenarioError("withdraw for a prefix the peer never announced");
            m.kind = BgpMessage::Kind::Withdraw;
            external_routes.erase(
                std::remove_if(external_routes.begin(), external_routes.end(),
                               [&](const ExternalRoute& er) {
                                   return er.peer == peer && er.prefix == p;
                               }),
                external_routes.end());
            activity.set_inactive_from(peer, p, event.time);
            break;
        }
        case EventSpec::Kind::UpdateWorse: {
            if (!existing)
                throw ScenarioError("update-worse for a prefix the peer never announced");
            existing->as_path_len += event.prepend_delta;
            m.kind = BgpMessage::Kind::Update;
            m.route.prefix = p;
            m.route.origin_peer = peer;
            m.route.egress = border;
            m.route.as_path_len = existing->as_path_len;
            // peer stays active: it still holds a (worse) valid route
            break;
        }
        case EventSpec::Kind::Announce: {
            if (existing) {
                existing->as_path_len = event.announce_as_path_len;
            } else {
                external_routes.push_back({peer, p, event.announce_as_path_len});
                activity.set_window(peer, p, event.time, kTimePosInf);
            }
            m.kind = BgpMessage::Kind::Update;
            m.route.prefix = p;
            m.route.origin_peer = peer;
            m.route.egress = border;
            m.route.as_path_len = event.announce_as_path_len;
            break;
        }
        }
        out.push_back(m);
    }
    return out;
}

namespace {

struct WorkItem {
    SessionKey from;
    BgpMessage::Kind kind = BgpMessage::Kind::Update;
    PrefixId prefix = 0;
    Route route;
    MicroSec arrived_at = 0;
    MicroSec cum_wait = 0; // queueing delay accumulated upstream
};

struct EngineEvent {
    MicroSec when = 0;
    int type = 0; // 0 = arrival, 1 = completion; arrivals first at equal time
    std::uint64_t seq = 0;
    RouterId router = 0;
    std::size_t item_index = 0; // arrival: index into item pool

    bool operator>(const EngineEvent& o) const {
        return std::tie(when, type, seq) > std::tie(o.when, o.type, o.seq);
    }
};

} // namespace

SimResult run_event(const Topology& topo, const IgpState& igp, const IbgpConfig& ibgp,
                    const InitialState& initial, const EventSpec& event,
                    const ProcessingModel& processing, std::uint64_t seed,
                    const RunLimits& limits) {
    const std::size_t n = topo.num_routers();
    const std::size_t num_prefixes = initial.fib.num_prefixes();
    event.validate(num_prefixes);

    SimResult res;
    res.fib = initial.fib;
    res.activity = initial.activity;
    res.final_ribs = initial.ribs;
    res.converged_at = event.time;
    res.last_fib_change = event.time;

    std::vector<ExternalRoute> external = initial.external_routes;
    std::vector<BgpMessage> peer_msgs =
        apply_event_to_peer(topo, event, external, res.activity);

    Rng rng(seed);
    std::vector<WorkItem> pool;
    std::priority_queue<EngineEvent, std::vector<EngineEvent>, std::greater<>> queue;
    std::uint64_t next_seq = 0;

    auto schedule_arrival = [&](RouterId to, const WorkItem& item) {
        pool.push_back(item);
        queue.push({item.arrived_at, 0, next_seq++, to, pool.size() - 1});
    };

    for (const auto& m : peer_msgs) {
        res.messages.push_back(m);
        WorkItem item;
        item.from = {true, m.from.id};
        item.kind = m.kind;
        item.prefix = m.prefix;
        item.route = m.route;
        item.arrived_at = m.arrives_at;
        schedule_arrival(m.to.id, item);
    }

    struct RouterState {
        std::deque<std::size_t> fifo; // indices into pool
        bool busy = false;
        std::size_t in_service = 0;
        MicroSec service_start = 0;
    };
    std::vector<RouterState> rs(n);

    auto jittered_cost = [&](RouterId r) {
        MicroSec c = processing.cost(r);
        if (processing.jitter_ppm == 0) return c;
        const MicroSec j = c * static_cast<MicroSec>(processing.jitter_ppm) / 1000000;
        if (j == 0) return c;
        c += rng.between(-j, j);
        return c < 1 ? 1 : c;
    };

    auto start_service = [&](RouterId r, MicroSec now) {
        auto& s = rs[r];
        s.busy = true;
        s.in_service = s.fifo.front();
        s.fifo.pop_front();
        s.service_start = now;
        queue.push({now + jittered_cost(r), 1, next_seq++, r, 0});
    };

    std::uint64_t processed = 0;
    while (!queue.empty()) {
        EngineEvent ev = queue.top();
        queue.pop();
        auto& s = rs[ev.router];

        if (ev.type == 0) { // arrival
            if (pool.size() > limits.max_queue_items)
                throw ConvergenceError("work queue exceeded the runaway bound");
            s.fifo.push_back(ev.item_index);
            if (!s.busy) start_service(ev.router, ev.when);
            continue;
        }

        // completion
        const WorkItem item = pool[s.in_service];
        s.busy = false;
        ++processed;
        const MicroSec now = ev.when;
        // queueing delay this item saw, plus what its causal chain saw upstream
        const MicroSec wait_here = item.cum_wait + (s.service_start - item.arrived_at);

        PrefixRib& rib = res.final_ribs[ev.router].prefixes[item.prefix];
        apply_to_rib_in(rib, item.from, item.kind,
                        item.kind == BgpMessage::Kind::Update ? &item.route : nullptr, ev.router,
                        igp);
        Decision d = decide_and_diff(rib, ibgp, ev.router, n);
        if (d.best_changed) {
            if (res.fib.push(ev.router, item.prefix, now,
                             action_for(ev.router, d.best), wait_here))
                res.last_fib_change = std::max(res.last_fib_change, now);
            for (auto& [t, route] : d.advertise) {
                BgpMessage m;
                m.from = NodeRef::router(ev.router);
                m.to = NodeRef::router(t);
                m.kind = BgpMessage::Kind::Update;
                m.prefix = item.prefix;
                m.route = route;
                m.sent_at = now;
                m.arrives_at = now + igp.path_delay(ev.router, t);
                m.seq = next_seq;
                m.cum_wait = wait_here;
                res.messages.push_back(m);
                WorkItem wi{{false, ev.router}, m.kind, item.prefix, route, m.arrives_at,
                            wait_here};
                schedule_arrival(t, wi);
            }
            for (RouterId t : d.withdraw) {
                BgpMessage m;
                m.from = NodeRef::router(ev.router);
                m.to = NodeRef::router(t);
                m.kind = BgpMessage::Kind::Withdraw;
                m.prefix = item.prefix;
                m.sent_at = now;
                m.arrives_at = now + igp.path_delay(ev.router, t);
                m.seq = next_seq;
                m.cum_wait = wait_here;
                res.messages.push_back(m);
                WorkItem wi{{false, ev.router}, m.kind, item.prefix, {}, m.arrives_at, wait_here};
                schedule_arrival(t, wi);
            }
        }
        if (!s.fifo.empty()) start_service(ev.router, now);
    }

    res.items_processed = processed;
    for (const auto& m : res.messages) res.converged_at = std::max(res.converged_at, m.arrives_at);
    return res;
}

bool is_fixed_point(const std::vector<RouterRib>& ribs) {
    for (const auto& rr : ribs) {
        for (const auto& rib : rr.prefixes) {
            auto best = decide_best(candidates_of(rib));
            if (best.has_value() != rib.best.has_value()) return false;
            if (best && rib.best && !(*best == *rib.best)) return false;
        }
    }
    return true;
}

} // namespace convtrace
