#pragma once

#include <array>
#include <cstddef>
#include <numeric>

namespace foodwise {

// Fixed-size table indexed by a dense enum. Every key is always present.
template <typename E, typename T, std::size_t N>
struct EnumArray {
  std::array<T, N> values{};

  constexpr T& operator[](E key) { return values[static_cast<std::size_t>(key)]; }
  constexpr const T& operator[](E key) const {
    return values[static_cast<std::size_t>(key)];
  }

  constexpr T sum() const { return std::accumulate(values.begin(), values.end(), T{}); }

  friend constexpr bool operator==(const EnumArray&, const EnumArray&) = default;
};

}  // namespace foodwise
