#include "convtrace/stats.hpp"

#include <algorithm>

namespace convtrace {

MicroSec percentile_nearest_rank(const std::vector<MicroSec>& sorted, int pct) {
    if (sorted.empty()) throw ModelError("percentile of empty sample");
    // nearest rank: ceil(p/100 * n), 1-indexed
    std::size_t rank = (static_cast<std::size_t>(pct) * sorted.size() + 99) / 100;
    if (rank == 0) rank = 1;
    return sorted[rank - 1];
}

PercentileSummary summarize(std::vector<MicroSec> values) {
    if (values.empty()) throw ModelError("summarize requires at least one value");
    std::sort(values.begin(), values.end());
    PercentileSummary s;
    s.q5 = percentile_nearest_rank(values, 5);
    s.q25 = percentile_nearest_rank(values, 25);
    s.q50 = percentile_nearest_rank(values, 50);
    s.q75 = percentile_nearest_rank(values, 75);
    s.q95 = percentile_nearest_rank(values, 95);
    s.n = values.size();
    return s;
}

} // namespace convtrace
