#include "convtrace/igp.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

namespace convtrace {

MicroSec link_delay(const Topology& topo, RouterId a, RouterId b) {
    for (const auto& l : topo.links) {
        if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return l.delay;
    }
    throw ModelError("no link between " + topo.router_name(a) + " and " + topo.router_name(b));
}

namespace {

struct Adj {
    RouterId neighbor;
    MicroSec delay;
    std::int64_t cost;
};

} // namespace

// One Dijkstra per destination over lexicographic (cost, delay) weights.
// next_hop(r, dst) is r's best neighbor toward dst within that single tree,
// so chained forwarding can never loop. Remaining ties pick the smallest
// neighbor id.
IgpState compute_igp(const Topology& topo) {
    topo.validate();
    const std::size_t n = topo.num_routers();
    IgpState state(n);

    std::vector<std::vector<Adj>> adj(n);
    for (const auto& l : topo.links) {
        adj[l.a].push_back({l.b, l.delay, l.cost});
        adj[l.b].push_back({l.a, l.delay, l.cost});
    }
    for (auto& v : adj)
        std::sort(v.begin(), v.end(),
                  [](const Adj& x, const Adj& y) { return x.neighbor < y.neighbor; });

    using Dist = std::pair<std::int64_t, MicroSec>; // (cost, delay)
    const Dist kUnreached{std::numeric_limits<std::int64_t>::max(), kTimePosInf};

    std::vector<Dist> dist(n);
    for (RouterId dst = 0; dst < n; ++dst) {
        std::fill(dist.begin(), dist.end(), kUnreached);
        dist[dst] = {0, 0};
        using QItem = std::tuple<std::int64_t, MicroSec, RouterId>;
        std::priority_queue<QItem, std::vector<QItem>, std::greater<>> pq;
        pq.emplace(0, 0, dst);
        while (!pq.empty()) {
            auto [c, d, u] = pq.top();
            pq.pop();
            if (Dist{c, d} != dist[u]) continue;
            for (const auto& e : adj[u]) {
                Dist cand{c + e.cost, d + e.delay};
                if (cand < dist[e.neighbor]) {
                    dist[e.neighbor] = cand;
                    pq.emplace(cand.first, cand.second, e.neighbor);
                }
            }
        }

        for (RouterId r = 0; r < n; ++r) {
            if (r == dst) {
                state.set(r, dst, r, 0, 0);
                continue;
            }
            if (dist[r] == kUnreached)
                throw ModelError("router " + topo.router_name(r) + " cannot reach " +
                                 topo.router_name(dst));
            // first neighbor (smallest id) on a shortest (cost, delay) path
            RouterId hop = kNoRouter;
            for (const auto& e : adj[r]) {
                if (dist[e.neighbor].first + e.cost == dist[r].first &&
                    dist[e.neighbor].second + e.delay == dist[r].second) {
                    hop = e.neighbor;
                    break;
                }
            }
            state.set(r, dst, hop, dist[r].second, dist[r].first);
        }
    }
    return state;
}

} // namespace convtrace
