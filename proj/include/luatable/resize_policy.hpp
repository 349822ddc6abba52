#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace luatable {

/// How a rehash sizes the new hash part.
///  - kOriginal: smallest power of two >= size.
///  - kFixedHeadroom: smallest power of two >= size + floor(size / 4), which
///    leaves at least ~20% of the slots free after reinsertion.
enum class ResizePolicy : std::uint8_t { kOriginal, kFixedHeadroom };

std::string_view to_string(ResizePolicy policy);
/// Accepts "original" and "fixed"; throws ConfigError otherwise.
ResizePolicy parse_policy(std::string_view name);

/// Ceiling log2 with ceil_log2(1) == 0. Undefined for 0.
unsigned ceil_log2(std::uint64_t x);

/// Hash capacity for a rehash whose hash part must hold `size` elements
/// (pending key included). Zero elements yield an empty hash part.
std::size_t hash_capacity(ResizePolicy policy, std::size_t size);

/// Counts of positive integer keys per binary slice: slice 0 holds key 1,
/// slice i >= 1 holds keys in (2^(i-1), 2^i].
struct IntegerKeyCensus {
  std::array<std::uint64_t, 64> slices{};
  std::uint64_t total = 0;

  void add(std::int64_t key);
  static unsigned slice_of(std::int64_t key);
};

/// Largest 2^a whose range [1, 2^a] holds more than 2^a / 2 counted keys, or 0
/// when no range qualifies (key 1 absent).
std::size_t compute_array_capacity(const IntegerKeyCensus& census);

}  // namespace luatable
