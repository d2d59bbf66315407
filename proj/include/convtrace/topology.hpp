#ifndef CONVTRACE_TOPOLOGY_HPP
#define CONVTRACE_TOPOLOGY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "convtrace/types.hpp"

namespace convtrace {

struct Link {
    RouterId a = 0;
    RouterId b = 0;
    MicroSec delay = 0;   // propagation delay, > 0
    std::int64_t cost = 1; // IGP metric, >= 1
};

struct ExternalPeer {
    std::string name;
    RouterId attached_to = 0;
    MicroSec delay = 0; // peer <-> border router link delay, > 0
};

// Static network model. Router ids are positions in `routers` (declaration
// order); deterministic tie-breaks in the IGP and the BGP decision process
// compare these ids, so the declaration order of a scenario is part of its
// semantics.
struct Topology {
    std::vector<std::string> routers;
    std::vector<Link> links;
    std::vector<ExternalPeer> peers;

    std::size_t num_routers() const { return routers.size(); }
    std::size_t num_peers() const { return peers.size(); }

    RouterId router(const std::string& name) const;
    PeerId peer(const std::string& name) const;
    const std::string& router_name(RouterId r) const { return routers.at(r); }
    const std::string& peer_name(PeerId p) const { return peers.at(p).name; }

    // Throws ModelError on disconnected graphs, non-positive delays,
    // costs < 1, duplicate names or dangling endpoints.
    void validate() const;
};

struct IbgpConfig {
    enum class Mode { FullMesh, RouteReflection };

    Mode mode = Mode::FullMesh;
    // In RouteReflection mode every router (reflectors included) is a client
    // of every reflector; the session graph is all {client, reflector} pairs.
    std::vector<RouterId> reflectors;

    bool is_reflector(RouterId r) const;
    void validate(const Topology& topo) const;
};

} // namespace convtrace

#endif
