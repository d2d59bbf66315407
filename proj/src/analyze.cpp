#include "convtrace/analyze.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace convtrace {

namespace {

struct LinkIndex {
    std::set<NodeId> peers;
    std::map<std::pair<NodeId, NodeId>, MicroSec> delay;

    explicit LinkIndex(const HardwareMapping& m) {
        for (const auto& [name, id] : m.peers) peers.insert(id);
        for (const auto& l : m.links) {
            delay[{l.from, l.to}] = l.delay;
            delay[{l.to, l.from}] = l.delay;
        }
    }
    bool is_peer(NodeId n) const { return peers.count(n) != 0; }
    bool known(NodeId a, NodeId b) const { return delay.count({a, b}) != 0; }
};

} // namespace

TraceScan scan_trace(const std::string& path, const HardwareMapping& mapping,
                     bool assume_stable_reachable) {
    mapping.validate();
    LinkIndex index(mapping);

    TraceScan scan;
    std::map<JourneyKey, Journey> journeys;
    std::set<std::tuple<NodeId, PrefixId, std::int64_t, NodeId, NodeId, int>> seen;
    bool first = true;
    std::size_t idx = 0;

    for_each_record(path, [&](const TraceRecord& r) {
        ++scan.record_count;
        const std::size_t record_index = idx++;
        if (r.kind == TraceRecord::Kind::Summary) {
            scan.capture_drops = r.drops;
            scan.last_ts = std::max(scan.last_ts, r.ts);
            if (first) { scan.first_ts = r.ts; first = false; }
            return;
        }
        if (first) {
            scan.first_ts = r.ts;
            first = false;
        }
        scan.last_ts = std::max(scan.last_ts, r.ts);
        if (!index.known(r.link_from, r.link_to))
            throw TraceError("record " + std::to_string(record_index) +
                             " references an unknown link " + std::to_string(r.link_from) + "-" +
                             std::to_string(r.link_to));

        if (r.kind == TraceRecord::Kind::Bgp) {
            if (r.bgp_kind != TraceRecord::BgpKind::KeepAlive) {
                scan.has_bgp = true;
                scan.last_bgp_ts = std::max(scan.last_bgp_ts, r.ts);
            }
            // a pre-stage withdraw sent by a peer marks the prefix inactive
            // at that peer from the emission instant on
            if (r.bgp_kind == TraceRecord::BgpKind::Withdraw && r.has_prefix &&
                r.stage == TraceRecord::Stage::Pre && index.is_peer(r.link_from) &&
                r.sess_from == r.link_from) {
                auto key = std::make_pair(r.link_from, r.prefix);
                auto it = scan.peer_inactive_from.find(key);
                if (it == scan.peer_inactive_from.end() || r.ts < it->second)
                    scan.peer_inactive_from[key] = r.ts;
            }
            return;
        }

        // probe record
        auto dup = std::make_tuple(r.probe_src, r.prefix, r.seq, r.link_from, r.link_to,
                                   static_cast<int>(r.stage));
        if (!seen.insert(dup).second)
            throw TraceError("record " + std::to_string(record_index) +
                             ": duplicate probe observation");
        JourneyKey key{r.probe_src, r.prefix, r.seq};
        Journey& j = journeys[key];
        j.key = key;
        j.observations.push_back({r.ts, r.link_from, r.link_to, r.stage});
    });

    for (auto& [key, j] : journeys) {
        std::sort(j.observations.begin(), j.observations.end(),
                  [](const LinkObs& a, const LinkObs& b) {
                      if (a.ts != b.ts) return a.ts < b.ts;
                      if (a.stage != b.stage) return static_cast<int>(a.stage) > static_cast<int>(b.stage);
                      if (a.from != b.from) return a.from < b.from;
                      return a.to < b.to;
                  });
        j.departed = j.observations.front().ts;
        const LinkObs& last = j.observations.back();
        j.terminal_node = last.to;
        j.terminal_ts = last.ts;
        if (index.is_peer(last.to)) {
            auto it = scan.peer_inactive_from.find({last.to, key.prefix});
            j.delivered = it == scan.peer_inactive_from.end() || last.ts < it->second;
        } else {
            j.delivered = false;
        }
        j.violating = !j.delivered && assume_stable_reachable;
        scan.journeys.push_back(std::move(j));
    }
    return scan;
}

ConvergenceResult detect_convergence(const TraceScan& scan, MicroSec quiet_window) {
    ConvergenceResult res;
    if (!scan.has_bgp) {
        res.converged_at = scan.first_ts;
        res.conclusive = true;
        return res;
    }
    res.converged_at = scan.last_bgp_ts;
    res.conclusive = scan.last_ts >= scan.last_bgp_ts + quiet_window;
    return res;
}

SampleCheckResult check_sample(const std::string& path, const HardwareMapping& mapping,
                               MicroSec tolerance) {
    SampleCheckResult res;
    LinkIndex index(mapping);

    // pass 1: journeys for the edge check
    TraceScan scan = scan_trace(path, mapping, true);
    res.drop_counters = scan.capture_drops;
    if (res.drop_counters != 0)
        res.notes.push_back("capture reported " + std::to_string(res.drop_counters) +
                            " dropped packets");

    res.edges_ok = true;
    for (const auto& j : scan.journeys) {
        const bool first_second = j.departed <= scan.first_ts + sec(1);
        const bool last_second = j.departed >= scan.last_ts - sec(1);
        if ((first_second || last_second) && !j.delivered) {
            res.edges_ok = false;
            res.notes.push_back("probe src=" + std::to_string(j.key.src) + " prefix=" +
                                std::to_string(j.key.prefix) + " seq=" +
                                std::to_string(j.key.seq) + " undelivered in the capture edge");
            break;
        }
    }

    // pass 2: pre/post twinning with the configured delays
    res.delayer_ok = true;
    std::map<std::string, std::deque<MicroSec>> pending; // identity -> pre timestamps
    std::size_t bad = 0;
    for_each_record(path, [&](const TraceRecord& r) {
        if (r.kind == TraceRecord::Kind::Summary || !res.delayer_ok) return;
        auto d = index.delay.find({r.link_from, r.link_to});
        if (d == index.delay.end() || d->second == 0) return;
        if (r.stage == TraceRecord::Stage::Pre) {
            pending[twin_identity(r)].push_back(r.ts);
        } else if (r.stage == TraceRecord::Stage::Post) {
            auto it = pending.find(twin_identity(r));
            if (it == pending.end() || it->second.empty()) {
                res.delayer_ok = false;
                res.notes.push_back("post-delay record without a pre twin: " + twin_identity(r));
                return;
            }
            const MicroSec delta = r.ts - it->second.front();
            it->second.pop_front();
            if (it->second.empty()) pending.erase(it);
            const MicroSec expected = d->second;
            if (delta < expected - tolerance || delta > expected + tolerance) {
                ++bad;
                res.delayer_ok = false;
                res.notes.push_back("delay deviation on link " + std::to_string(r.link_from) +
                                    "-" + std::to_string(r.link_to) + ": observed " +
                                    std::to_string(delta) + "us, configured " +
                                    std::to_string(expected) + "us");
            }
        }
    });
    if (res.delayer_ok && !pending.empty()) {
        res.delayer_ok = false;
        res.notes.push_back("pre-delay record without a post twin: " + pending.begin()->first);
    }
    (void)bad;
    return res;
}

std::vector<JourneyEstimate> violation_from_journeys(const std::vector<Journey>& journeys,
                                                     int rate_pps) {
    if (rate_pps <= 0 || 1000000 % rate_pps != 0)
        throw ScenarioError("probe rate must be a positive divisor of 1e6 pps");
    const MicroSec step = 1000000 / rate_pps;
    std::map<std::pair<NodeId, PrefixId>, JourneyEstimate> acc;
    for (const auto& j : journeys) {
        auto& e = acc[{j.key.src, j.key.prefix}];
        e.src = j.key.src;
        e.prefix = j.key.prefix;
        if (j.violating) ++e.dropped;
    }
    std::vector<JourneyEstimate> out;
    out.reserve(acc.size());
    for (auto& [k, e] : acc) {
        e.probe_estimate = e.dropped * step;
        out.push_back(e);
    }
    return out;
}

} // namespace convtrace
