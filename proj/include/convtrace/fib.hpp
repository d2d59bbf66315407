#ifndef CONVTRACE_FIB_HPP
#define CONVTRACE_FIB_HPP

#include <cstddef>
#include <vector>

#include "convtrace/types.hpp"

namespace convtrace {

struct FibAction {
    enum class Kind { Forward, DeliverExternal, BlackHole };

    Kind kind = Kind::BlackHole;
    RouterId egress = kNoRouter; // Forward
    PeerId peer = 0;             // DeliverExternal

    static FibAction forward(RouterId egress) { return {Kind::Forward, egress, 0}; }
    static FibAction deliver(PeerId p) { return {Kind::DeliverExternal, kNoRouter, p}; }
    static FibAction black_hole() { return {Kind::BlackHole, kNoRouter, 0}; }

    bool operator==(const FibAction& o) const {
        if (kind != o.kind) return false;
        switch (kind) {
        case Kind::Forward: return egress == o.egress;
        case Kind::DeliverExternal: return peer == o.peer;
        case Kind::BlackHole: return true;
        }
        return false;
    }
    bool operator!=(const FibAction& o) const { return !(*this == o); }
};

struct FibEntry {
    MicroSec since = kTimeNegInf;
    FibAction action;
    // Queueing delay accumulated along the message chain that caused this
    // entry; 0 for initial state. Used by the prefix-independence check.
    MicroSec cum_wait = 0;

    bool operator==(const FibEntry& o) const { return since == o.since && action == o.action; }
};

/// Per (router, prefix) forwarding actions over time. Entries are strictly
/// increasing in `since`, consecutive actions differ, and the first entry
/// (the initial converged state) is at -inf.
class FibTimeline {
public:
    FibTimeline() = default;
    FibTimeline(std::size_t routers, std::size_t prefixes)
        : prefixes_(prefixes), entries_(routers * prefixes) {}

    std::vector<FibEntry>& at(RouterId r, PrefixId p) { return entries_[r * prefixes_ + p]; }
    const std::vector<FibEntry>& at(RouterId r, PrefixId p) const {
        return entries_[r * prefixes_ + p];
    }

    const FibAction& action_at(RouterId r, PrefixId p, MicroSec t) const;

    // Appends an entry iff the action differs from the current last one.
    // Returns true when an entry was added.
    bool push(RouterId r, PrefixId p, MicroSec since, const FibAction& a, MicroSec cum_wait = 0);

    std::size_t num_prefixes() const { return prefixes_; }
    std::size_t num_routers() const { return prefixes_ ? entries_.size() / prefixes_ : 0; }

private:
    std::size_t prefixes_ = 0;
    std::vector<std::vector<FibEntry>> entries_;
};

} // namespace convtrace

#endif
