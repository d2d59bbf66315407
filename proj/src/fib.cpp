#include "convtrace/fib.hpp"

#include <algorithm>

namespace convtrace {

const FibAction& FibTimeline::action_at(RouterId r, PrefixId p, MicroSec t) const {
    const auto& v = entries_[r * prefixes_ + p];
    // last entry with since <= t; timelines are short (a handful of entries)
    for (std::size_t i = v.size(); i-- > 0;) {
        if (v[i].since <= t) return v[i].action;
    }
    throw ModelError("no FIB entry covers the requested instant");
}

bool FibTimeline::push(RouterId r, PrefixId p, MicroSec since, const FibAction& a,
                       MicroSec cum_wait) {
    auto& v = entries_[r * prefixes_ + p];
    if (!v.empty()) {
        if (since <= v.back().since)
            throw ModelError("FIB entries must be strictly increasing in time");
        if (v.back().action == a) return false; // consecutive actions must differ
    }
    v.push_back({since, a, cum_wait});
    return true;
}

} // namespace convtrace
