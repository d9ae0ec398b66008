#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace nbg {

using Key = std::int64_t;

inline constexpr Key kLowSentinel = std::numeric_limits<Key>::min();
inline constexpr Key kHighSentinel = std::numeric_limits<Key>::max();
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kDefaultThreadCapacity = 64;

inline constexpr bool is_sentinel(Key k) noexcept {
    return k == kLowSentinel || k == kHighSentinel;
}

// Throws std::invalid_argument for keys reserved as sentinels.
void require_vertex_key(Key k);

// Throws std::invalid_argument for NaN or infinite weights.
void require_weight(double w);

}  // namespace nbg
