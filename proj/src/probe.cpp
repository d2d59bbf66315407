#include "convtrace/probe.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace convtrace {

void ProbeConfig::validate() const {
    if (rate_pps <= 0 || 1000000 % rate_pps != 0)
        throw ScenarioError("probe rate must be a positive divisor of 1e6 pps");
    if (window_start >= 0) throw ScenarioError("probe window must start before the event");
    if (ttl <= 0) throw ScenarioError("probe ttl must be positive");
    if (sources.empty()) throw ScenarioError("no probe sources");
    if (prefixes.empty()) throw ScenarioError("no probed prefixes");
}

ProbeFate walk_packet(const DataPlaneView& view, RouterId src, PrefixId prefix,
                      MicroSec depart_time, bool record_hops) {
    const Topology& topo = *view.topo;
    ProbeFate fate;
    fate.src = src;
    fate.prefix = prefix;
    fate.ttl = view.ttl;
    fate.departed_at = depart_time;

    RouterId at = src;
    RouterId came_from = kNoRouter;
    MicroSec t = depart_time;
    int remaining = view.ttl;
    if (record_hops) fate.hops.push_back({at, t});

    for (;;) {
        const FibAction& action = view.fib->action_at(at, prefix, t);
        switch (action.kind) {
        case FibAction::Kind::BlackHole:
            fate.terminal = ProbeFate::Terminal::DroppedBlackHole;
            fate.dropped_at = at;
            fate.terminal_at = t;
            return fate;
        case FibAction::Kind::DeliverExternal: {
            const PeerId peer = action.peer;
            const MicroSec arrival = t + topo.peers[peer].delay;
            fate.peer = peer;
            fate.terminal_at = arrival;
            fate.terminal = view.activity->deliverable_at(peer, prefix, arrival)
                                ? ProbeFate::Terminal::Delivered
                                : ProbeFate::Terminal::DroppedInactivePeer;
            return fate;
        }
        case FibAction::Kind::Forward: {
            const RouterId next = view.igp->next_hop(at, action.egress);
            if (view.rpf_drop && next == came_from) {
                fate.terminal = ProbeFate::Terminal::DroppedRpf;
                fate.dropped_at = at;
                fate.terminal_at = t;
                return fate;
            }
            if (remaining == 0) {
                fate.terminal = ProbeFate::Terminal::DroppedTtl;
                fate.dropped_at = at;
                fate.terminal_at = t;
                return fate;
            }
            --remaining;
            t += link_delay(topo, at, next);
            came_from = at;
            at = next;
            if (record_hops) fate.hops.push_back({at, t});
            break;
        }
        }
    }
}

namespace {

// Bounds of the "interesting" departure domain: outside it the whole journey
// runs in one stable state.
struct Domain {
    MicroSec lo = 0;
    MicroSec hi = 0;
    bool empty = true;
};

Domain interesting_domain(const DataPlaneView& view, PrefixId prefix) {
    Domain dom;
    MicroSec lo = kTimePosInf, hi = kTimeNegInf;
    const std::size_t n = view.fib->num_routers();
    for (RouterId r = 0; r < n; ++r) {
        const auto& entries = view.fib->at(r, prefix);
        for (const auto& e : entries) {
            if (e.since == kTimeNegInf) continue;
            lo = std::min(lo, e.since);
            hi = std::max(hi, e.since);
        }
    }
    for (PeerId p = 0; p < view.topo->num_peers(); ++p) {
        auto it = view.activity->windows().find({p, prefix});
        if (it == view.activity->windows().end()) continue;
        const Interval& w = it->second;
        if (w.start != kTimeNegInf) { lo = std::min(lo, w.start); hi = std::max(hi, w.start); }
        if (w.end != kTimePosInf) { lo = std::min(lo, w.end); hi = std::max(hi, w.end); }
    }
    if (lo > hi) return dom;

    MicroSec max_link = 0;
    for (const auto& l : view.topo->links) max_link = std::max(max_link, l.delay);
    for (const auto& p : view.topo->peers) max_link = std::max(max_link, p.delay);
    const MicroSec travel = max_link * (view.ttl + 1);

    dom.lo = lo - travel - sec(1);
    dom.hi = hi + sec(1);
    dom.empty = false;
    return dom;
}

// Walks the realized path tree over departure intervals and records every
// departure instant at which some visited router's action or some reached
// peer's activity can change.
void collect_boundaries(const DataPlaneView& view, PrefixId prefix, RouterId at,
                        RouterId came_from, MicroSec dep_s, MicroSec dep_e, MicroSec acc_delay,
                        int remaining, std::set<MicroSec>& out) {
    if (dep_s >= dep_e) return;
    const MicroSec arr_s = dep_s + acc_delay;
    const MicroSec arr_e = dep_e + acc_delay;
    const auto& entries = view.fib->at(at, prefix);

    for (std::size_t i = 0; i < entries.size(); ++i) {
        const MicroSec piece_s = std::max(arr_s, entries[i].since);
        const MicroSec piece_e =
            std::min(arr_e, i + 1 < entries.size() ? entries[i + 1].since : kTimePosInf);
        if (piece_s >= piece_e) continue;
        if (entries[i].since > arr_s) out.insert(entries[i].since - acc_delay);

        const FibAction& action = entries[i].action;
        if (action.kind == FibAction::Kind::BlackHole) continue;
        if (action.kind == FibAction::Kind::DeliverExternal) {
            const MicroSec ext = view.topo->peers[action.peer].delay;
            for (MicroSec inst : view.activity->change_instants(action.peer, prefix)) {
                if (inst > piece_s + ext && inst < piece_e + ext)
                    out.insert(inst - ext - acc_delay);
            }
            continue;
        }
        const RouterId next = view.igp->next_hop(at, action.egress);
        if (view.rpf_drop && next == came_from) continue; // terminal bounce
        if (remaining == 0) continue;                     // ttl exhausted
        const MicroSec hop = link_delay(*view.topo, at, next);
        collect_boundaries(view, prefix, next, at, piece_s - acc_delay, piece_e - acc_delay,
                           acc_delay + hop, remaining - 1, out);
    }
}

} // namespace

StableStates stable_reachability(const DataPlaneView& view, RouterId src, PrefixId prefix) {
    Domain dom = interesting_domain(view, prefix);
    StableStates st;
    const MicroSec early = dom.empty ? -sec(1000) : dom.lo - sec(1);
    const MicroSec late = dom.empty ? sec(1000) : dom.hi + sec(1);
    st.initial_ok =
        walk_packet(view, src, prefix, early, false).terminal == ProbeFate::Terminal::Delivered;
    st.final_ok =
        walk_packet(view, src, prefix, late, false).terminal == ProbeFate::Terminal::Delivered;
    return st;
}

std::vector<Interval> exact_violation_intervals(const DataPlaneView& view, RouterId src,
                                                PrefixId prefix) {
    Domain dom = interesting_domain(view, prefix);
    if (dom.empty) return {};

    const StableStates stable = stable_reachability(view, src, prefix);

    std::set<MicroSec> bounds;
    collect_boundaries(view, prefix, src, kNoRouter, dom.lo, dom.hi, 0, view.ttl, bounds);
    if (bounds.empty()) return {};

    std::vector<MicroSec> cuts;
    cuts.push_back(dom.lo);
    for (MicroSec b : bounds)
        if (b > dom.lo && b < dom.hi) cuts.push_back(b);
    cuts.push_back(dom.hi);

    std::vector<Interval> result;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const MicroSec a = cuts[i], b = cuts[i + 1];
        const MicroSec rep = a + (b - a) / 2;
        const ProbeFate fate = walk_packet(view, src, prefix, rep, false);
        const bool violating = fate.dropped() && stable.both();
        if (!violating) continue;
        if (!result.empty() && result.back().end == a) result.back().end = b;
        else result.push_back({a, b});
    }
    return result;
}

ProbeSeriesResult probe_series(const DataPlaneView& view, const ProbeConfig& cfg, MicroSec t0,
                               MicroSec window_end_abs, const PeerActivity* alt_activity) {
    cfg.validate();
    const MicroSec step = cfg.step();
    const MicroSec start_abs = t0 + cfg.window_start;
    if (window_end_abs <= start_abs) throw ScenarioError("probe window is empty");

    ProbeSeriesResult res;
    MicroSec min_gap = kTimePosInf;

    for (RouterId src : cfg.sources) {
        for (PrefixId prefix : cfg.prefixes) {
            const StableStates stable = stable_reachability(view, src, prefix);

            PairViolation pair;
            pair.src = src;
            pair.prefix = prefix;
            pair.rate_pps = cfg.rate_pps;
            pair.exact = exact_violation_intervals(view, src, prefix);
            for (const auto& iv : pair.exact) pair.exact_total += iv.length();

            if (alt_activity) {
                DataPlaneView alt = view;
                alt.activity = alt_activity;
                for (const auto& iv : exact_violation_intervals(alt, src, prefix))
                    pair.alt_exact_total += iv.length();
            } else {
                pair.alt_exact_total = pair.exact_total;
            }

            // window must bracket every violation, with the 1 s edge margins
            if (!pair.exact.empty()) {
                if (pair.exact.front().start < start_abs + sec(1) ||
                    pair.exact.back().end > window_end_abs - sec(1))
                    throw SampleError(
                        "probe window does not bracket the violation interval for router " +
                        view.topo->router_name(src));
            }
            for (std::size_t i = 0; i + 1 < pair.exact.size(); ++i)
                min_gap = std::min(min_gap, pair.exact[i + 1].start - pair.exact[i].end);
            for (const auto& iv : pair.exact) min_gap = std::min(min_gap, iv.length());

            std::int64_t seq = 0;
            for (MicroSec t = start_abs; t <= window_end_abs; t += step, ++seq) {
                ProbeFate fate = walk_packet(view, src, prefix, t);
                fate.seq = seq;
                fate.violating = fate.dropped() && stable.both();
                if (fate.violating) ++pair.probe_dropped;
                // edge correctness: first/last second must be fully delivered
                if (fate.dropped() &&
                    (t < start_abs + sec(1) || t > window_end_abs - sec(1)))
                    throw SampleError("probe dropped inside the first/last second of the window");
                res.fates.push_back(std::move(fate));
            }
            pair.probe_estimate = pair.probe_dropped * step;
            res.pairs.push_back(std::move(pair));
        }
    }

    if (min_gap != kTimePosInf && step > min_gap)
        res.notes.push_back("probe spacing " + std::to_string(step) +
                            "us exceeds the fastest signal change (" + std::to_string(min_gap) +
                            "us); estimates may undersample");
    return res;
}

} // namespace convtrace
