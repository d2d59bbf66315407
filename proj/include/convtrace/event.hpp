#ifndef CONVTRACE_EVENT_HPP
#define CONVTRACE_EVENT_HPP

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "convtrace/types.hpp"

namespace convtrace {

struct EventSpec {
    enum class Kind { Announce, UpdateWorse, Withdraw };

    Kind kind = Kind::Withdraw;
    PeerId at_peer = 0;
    std::vector<PrefixId> prefixes; // non-empty, no duplicates; order = queue order
    MicroSec time = 0;              // t0
    int prepend_delta = 0;          // UpdateWorse only
    int announce_as_path_len = 1;   // Announce only

    void validate(std::size_t num_prefixes) const;
};

struct ProcessingModel {
    std::vector<MicroSec> per_prefix_cost; // indexed by RouterId, > 0
    std::uint32_t jitter_ppm = 0;          // uniform +-jitter, parts per million, < 1e6

    MicroSec cost(RouterId r) const { return per_prefix_cost[r]; }
};

/// Per (peer, prefix) activity window [active_from, inactive_from): a packet
/// handed to the peer outside this window is dropped. Prefixes a peer never
/// announces have an empty window.
class PeerActivity {
public:
    void set_window(PeerId peer, PrefixId prefix, MicroSec from, MicroSec to) {
        windows_[{peer, prefix}] = {from, to};
    }
    void set_inactive_from(PeerId peer, PrefixId prefix, MicroSec t) {
        auto it = windows_.find({peer, prefix});
        if (it == windows_.end()) windows_[{peer, prefix}] = {kTimeNegInf, t};
        else it->second.end = t;
    }

    bool deliverable_at(PeerId peer, PrefixId prefix, MicroSec arrival) const {
        auto it = windows_.find({peer, prefix});
        if (it == windows_.end()) return false;
        return arrival >= it->second.start && arrival < it->second.end;
    }

    // Instants (within the window bounds) where deliverability flips; used by
    // the exact-interval computation as candidate boundaries.
    std::vector<MicroSec> change_instants(PeerId peer, PrefixId prefix) const {
        std::vector<MicroSec> out;
        auto it = windows_.find({peer, prefix});
        if (it == windows_.end()) return out;
        if (it->second.start != kTimeNegInf) out.push_back(it->second.start);
        if (it->second.end != kTimePosInf) out.push_back(it->second.end);
        return out;
    }

    const std::map<std::pair<PeerId, PrefixId>, Interval>& windows() const { return windows_; }

private:
    std::map<std::pair<PeerId, PrefixId>, Interval> windows_;
};

} // namespace convtrace

#endif
