#ifndef CONVTRACE_IGP_HPP
#define CONVTRACE_IGP_HPP

#include <vector>

#include "convtrace/topology.hpp"
#include "convtrace/types.hpp"

namespace convtrace {

/// All-pairs IGP state, computed once from the (converged, static) topology.
///
/// Paths are selected per destination from a single shortest-path tree, so
/// hop-by-hop forwarding along next_hop() is always cycle free. Ties on IGP
/// cost are broken by smaller total propagation delay, then by the smaller
/// next-hop router id.
class IgpState {
public:
    IgpState() = default;
    IgpState(std::size_t n) : n_(n), next_hop_(n * n, kNoRouter), delay_(n * n, 0), cost_(n * n, 0) {}

    RouterId next_hop(RouterId src, RouterId dst) const { return next_hop_[src * n_ + dst]; }
    MicroSec path_delay(RouterId src, RouterId dst) const { return delay_[src * n_ + dst]; }
    std::int64_t path_cost(RouterId src, RouterId dst) const { return cost_[src * n_ + dst]; }

    std::size_t size() const { return n_; }

    void set(RouterId src, RouterId dst, RouterId nh, MicroSec d, std::int64_t c) {
        next_hop_[src * n_ + dst] = nh;
        delay_[src * n_ + dst] = d;
        cost_[src * n_ + dst] = c;
    }

private:
    std::size_t n_ = 0;
    std::vector<RouterId> next_hop_;
    std::vector<MicroSec> delay_;
    std::vector<std::int64_t> cost_;
};

IgpState compute_igp(const Topology& topo);

// Delay of the direct link between two adjacent routers.
MicroSec link_delay(const Topology& topo, RouterId a, RouterId b);

} // namespace convtrace

#endif
