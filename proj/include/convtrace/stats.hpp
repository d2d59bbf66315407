#ifndef CONVTRACE_STATS_HPP
#define CONVTRACE_STATS_HPP

#include <cstddef>
#include <vector>

#include "convtrace/types.hpp"

namespace convtrace {

struct PercentileSummary {
    MicroSec q5 = 0;
    MicroSec q25 = 0;
    MicroSec q50 = 0;
    MicroSec q75 = 0;
    MicroSec q95 = 0;
    std::size_t n = 0;

    bool operator==(const PercentileSummary& o) const {
        return q5 == o.q5 && q25 == o.q25 && q50 == o.q50 && q75 == o.q75 && q95 == o.q95 &&
               n == o.n;
    }
};

// Nearest-rank percentiles over sorted values (no interpolation).
// Throws ModelError on empty input.
PercentileSummary summarize(std::vector<MicroSec> values);

MicroSec percentile_nearest_rank(const std::vector<MicroSec>& sorted, int pct);

} // namespace convtrace

#endif
