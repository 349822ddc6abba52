#include "luatable/resize_policy.hpp"

#include <bit>
#include <string>

#include "luatable/key.hpp"

namespace luatable {

std::string_view to_string(ResizePolicy policy) {
  return policy == ResizePolicy::kOriginal ? "original" : "fixed";
}

ResizePolicy parse_policy(std::string_view name) {
  if (name == "original") return ResizePolicy::kOriginal;
  if (name == "fixed") return ResizePolicy::kFixedHeadroom;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

unsigned ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0u : static_cast<unsigned>(std::bit_width(x - 1));
}

std::size_t hash_capacity(ResizePolicy policy, std::size_t size) {
  if (size == 0) return 0;
  const std::uint64_t target = policy == ResizePolicy::kOriginal ? size : size + (size >> 2);
  return std::size_t{1} << ceil_log2(target);
}

unsigned IntegerKeyCensus::slice_of(std::int64_t key) {
  return ceil_log2(static_cast<std::uint64_t>(key));
}

void IntegerKeyCensus::add(std::int64_t key) {
  ++slices[slice_of(key)];
  ++total;
}

std::size_t compute_array_capacity(const IntegerKeyCensus& census) {
  std::size_t best = 0;
  std::uint64_t in_range = 0;
  for (unsigned a = 0; a < census.slices.size(); ++a) {
    const std::uint64_t range = std::uint64_t{1} << a;
    // Once even all remaining keys cannot fill half of the range, stop.
    if (2 * census.total <= range) break;
    in_range += census.slices[a];
    if (2 * in_range > range) best = static_cast<std::size_t>(range);
  }
  return best;
}

}  // namespace luatable
