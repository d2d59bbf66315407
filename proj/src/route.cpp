#include "convtrace/route.hpp"

#include <algorithm>
#include <tuple>

namespace convtrace {

namespace {

// Ordered comparison key; smaller wins.
auto decision_key(const Route& r) {
    return std::make_tuple(r.as_path_len, r.learned_from.is_external() ? 0 : 1,
                           r.igp_cost_to_egress, r.egress,
                           r.learned_from.is_external() ? kNoRouter : r.learned_from.peer);
}

} // namespace

std::optional<Route> decide_best(const std::vector<Route>& candidates) {
    if (candidates.empty()) return std::nullopt;
    const Route* best = &candidates.front();
    for (const Route& c : candidates) {
        if (c.prefix != best->prefix)
            throw ModelError("decide_best called with mixed prefixes");
        if (decision_key(c) < decision_key(*best)) best = &c;
    }
    return *best;
}

std::vector<RouterId> ibgp_propagation_targets(const IbgpConfig& cfg, RouterId holder,
                                               const LearnedFrom& learned_from,
                                               std::size_t num_routers) {
    std::vector<RouterId> out;
    const bool from_ibgp = !learned_from.is_external();

    if (cfg.mode == IbgpConfig::Mode::FullMesh) {
        if (from_ibgp) return out; // iBGP-learned routes are not re-advertised
        for (RouterId r = 0; r < num_routers; ++r)
            if (r != holder) out.push_back(r);
        return out;
    }

    if (cfg.is_reflector(holder)) {
        // clients (= everyone else) plus the other reflectors, never back to
        // the learning session
        for (RouterId r = 0; r < num_routers; ++r) {
            if (r == holder) continue;
            if (from_ibgp && r == learned_from.peer) continue;
            out.push_back(r);
        }
        return out;
    }

    // Non-reflector client: externally learned best goes to all reflectors;
    // iBGP-learned routes are not re-advertised (only reflectors reflect).
    if (from_ibgp) return out;
    out = cfg.reflectors;
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace convtrace
