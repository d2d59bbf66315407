#ifndef CONVTRACE_ROUTE_HPP
#define CONVTRACE_ROUTE_HPP

#include <optional>
#include <vector>

#include "convtrace/topology.hpp"
#include "convtrace/types.hpp"

namespace convtrace {

// Where the holding router learned a route. External = over the eBGP session
// to origin_peer; Ibgp = over the iBGP session to `peer`.
struct LearnedFrom {
    enum class Kind { External, Ibgp };
    Kind kind = Kind::External;
    RouterId peer = kNoRouter; // valid iff kind == Ibgp

    static LearnedFrom external() { return {Kind::External, kNoRouter}; }
    static LearnedFrom ibgp(RouterId r) { return {Kind::Ibgp, r}; }

    bool is_external() const { return kind == Kind::External; }
    bool operator==(const LearnedFrom& o) const { return kind == o.kind && peer == o.peer; }
    bool operator!=(const LearnedFrom& o) const { return !(*this == o); }
    bool operator<(const LearnedFrom& o) const {
        if (kind != o.kind) return kind == Kind::External; // external sorts first
        return peer < o.peer;
    }
};

struct Route {
    PrefixId prefix = 0;
    PeerId origin_peer = 0;
    RouterId egress = 0;
    int as_path_len = 1;
    LearnedFrom learned_from = LearnedFrom::external();
    std::int64_t igp_cost_to_egress = 0; // relative to the holding router

    // Identity of the routing information, ignoring holder-relative fields.
    bool same_route(const Route& o) const {
        return prefix == o.prefix && origin_peer == o.origin_peer && egress == o.egress &&
               as_path_len == o.as_path_len;
    }
    bool operator==(const Route& o) const {
        return same_route(o) && learned_from == o.learned_from &&
               igp_cost_to_egress == o.igp_cost_to_egress;
    }
};

/// BGP decision process over one prefix, reduced to the attributes the
/// scenarios vary: shorter AS path, then eBGP over iBGP, then lower IGP cost
/// to the egress, then smaller egress id. A final comparison on the learning
/// session makes the order total even when two sessions carry the same route.
std::optional<Route> decide_best(const std::vector<Route>& candidates);

/// Sessions a router advertises its best route on, given how it was learned.
///
/// Full mesh: externally learned routes go to every other router; iBGP-learned
/// routes are not re-advertised. Route reflection: a client advertises its
/// externally learned best to all reflectors; a reflector advertises its best
/// (however learned) to all clients and all other reflectors. A route is never
/// advertised back onto the session it was learned from.
std::vector<RouterId> ibgp_propagation_targets(const IbgpConfig& cfg, RouterId holder,
                                               const LearnedFrom& learned_from,
                                               std::size_t num_routers);

} // namespace convtrace

#endif
