#include "convtrace/topology.hpp"

#include <algorithm>
#include <set>
#include <vector>

namespace convtrace {

RouterId Topology::router(const std::string& name) const {
    for (std::size_t i = 0; i < routers.size(); ++i)
        if (routers[i] == name) return static_cast<RouterId>(i);
    throw ModelError("unknown router: " + name);
}

PeerId Topology::peer(const std::string& name) const {
    for (std::size_t i = 0; i < peers.size(); ++i)
        if (peers[i].name == name) return static_cast<PeerId>(i);
    throw ModelError("unknown peer: " + name);
}

void Topology::validate() const {
    if (routers.empty()) throw ModelError("topology has no routers");

    std::set<std::string> names(routers.begin(), routers.end());
    if (names.size() != routers.size()) throw ModelError("duplicate router names");
    for (const auto& p : peers) {
        if (!names.insert(p.name).second) throw ModelError("duplicate node name: " + p.name);
        if (p.attached_to >= routers.size())
            throw ModelError("peer " + p.name + " attached to unknown router");
        if (p.delay <= 0) throw ModelError("peer link delay must be positive: " + p.name);
    }

    for (const auto& l : links) {
        if (l.a >= routers.size() || l.b >= routers.size())
            throw ModelError("link endpoint out of range");
        if (l.a == l.b) throw ModelError("self link on " + routers[l.a]);
        if (l.delay <= 0) throw ModelError("link delay must be positive");
        if (l.cost < 1) throw ModelError("link cost must be >= 1");
    }

    if (routers.size() > 1) {
        // connectivity over the link graph
        std::vector<char> seen(routers.size(), 0);
        std::vector<RouterId> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            RouterId r = stack.back();
            stack.pop_back();
            for (const auto& l : links) {
                RouterId other = kNoRouter;
                if (l.a == r) other = l.b;
                else if (l.b == r) other = l.a;
                if (other != kNoRouter && !seen[other]) {
                    seen[other] = 1;
                    stack.push_back(other);
                }
            }
        }
        for (std::size_t i = 0; i < routers.size(); ++i)
            if (!seen[i]) throw ModelError("topology is disconnected at " + routers[i]);
    }
}

bool IbgpConfig::is_reflector(RouterId r) const {
    return std::find(reflectors.begin(), reflectors.end(), r) != reflectors.end();
}

void IbgpConfig::validate(const Topology& topo) const {
    if (mode == Mode::FullMesh) {
        if (!reflectors.empty()) throw ModelError("full-mesh config lists reflectors");
        return;
    }
    if (reflectors.empty() || reflectors.size() > topo.num_routers())
        throw ModelError("route reflection requires 1..|routers| reflectors");
    std::set<RouterId> uniq(reflectors.begin(), reflectors.end());
    if (uniq.size() != reflectors.size()) throw ModelError("duplicate reflectors");
    for (RouterId r : reflectors)
        if (r >= topo.num_routers()) throw ModelError("reflector id out of range");
}

} // namespace convtrace
