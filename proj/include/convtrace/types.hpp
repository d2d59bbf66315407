#ifndef CONVTRACE_TYPES_HPP
#define CONVTRACE_TYPES_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace convtrace {

// All simulation timing is integer microseconds. Keeping a quarter of the
// representable range as headroom lets us add path delays to the sentinels
// without overflow.
using MicroSec = std::int64_t;

constexpr MicroSec kTimeNegInf = std::numeric_limits<MicroSec>::min() / 4;
constexpr MicroSec kTimePosInf = std::numeric_limits<MicroSec>::max() / 4;

constexpr MicroSec ms(std::int64_t v) { return v * 1000; }
constexpr MicroSec sec(std::int64_t v) { return v * 1000000; }

using RouterId = std::uint32_t;
using PeerId = std::uint32_t;
using PrefixId = std::uint32_t;
using NodeId = std::uint32_t; // shared id space in traces: routers, peers, prober

constexpr RouterId kNoRouter = 0xffffffffu;

// Half-open [start, end) interval of departure or arrival times.
struct Interval {
    MicroSec start = 0;
    MicroSec end = 0;

    MicroSec length() const { return end - start; }
    bool operator==(const Interval& o) const { return start == o.start && end == o.end; }
};

// Error taxonomy. The CLI maps these onto exit codes: scenario/model/trace
// problems are user-input errors (1), sample rejections are 2, anything
// else is an internal error (3).
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& m) : std::runtime_error(m) {}
};
struct ScenarioError : std::runtime_error {
    explicit ScenarioError(const std::string& m) : std::runtime_error(m) {}
};
struct TraceError : std::runtime_error {
    explicit TraceError(const std::string& m) : std::runtime_error(m) {}
};
struct SampleError : std::runtime_error {
    explicit SampleError(const std::string& m) : std::runtime_error(m) {}
};
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& m) : std::runtime_error(m) {}
};

// Renders integer microseconds as a millisecond decimal ("51.000").
std::string format_ms(MicroSec us);

} // namespace convtrace

#endif
