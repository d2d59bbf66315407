#ifndef CONVTRACE_RNG_HPP
#define CONVTRACE_RNG_HPP

#include <cstdint>

namespace convtrace {

// SplitMix64. Chosen over std::mt19937 + distributions because the standard
// distributions are implementation-defined; byte-identical output across
// platforms is part of the tool's contract.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n). Lemire reduction without the rejection step; the
    // bias is < 2^-53 for the ranges used here and the result is portable.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        Rng r(seed ^ (0x5851f42d4c957f2dull * (stream + 1)));
        return r.next();
    }

private:
    std::uint64_t state_;
};

} // namespace convtrace

#endif
