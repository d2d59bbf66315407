#include "convtrace/types.hpp"

#include <cstdio>

namespace convtrace {

std::string format_ms(MicroSec us) {
    const bool neg = us < 0;
    unsigned long long a = neg ? static_cast<unsigned long long>(-(us + 1)) + 1ull
                               : static_cast<unsigned long long>(us);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%s%llu.%03llu", neg ? "-" : "", a / 1000ull, a % 1000ull);
    return buf;
}

} // namespace convtrace
