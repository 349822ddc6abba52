#pragma once

#include <cstdint>
#include <vector>

#include "luatable/hash_policy.hpp"
#include "luatable/key.hpp"
#include "luatable/table.hpp"

namespace luatable::testing {

inline constexpr std::uint64_t kPinnedSalt = 0x5eed5a17c0ffee11ULL;

/// Smallest token id >= `from` whose main position is `home` at capacity m.
inline Key token_with_home(std::size_t home, std::size_t m, std::uint64_t from = 0,
                           std::uint64_t salt = kPinnedSalt) {
  for (std::uint64_t id = from;; ++id) {
    const Key k = Key::token(id);
    if (main_position(k, salt, m) == home) return k;
  }
}

inline HybridTable pinned_table(TableMode mode = TableMode::kPureHash,
                                ResizePolicy policy = ResizePolicy::kOriginal) {
  return HybridTable(TableConfig{mode, policy, SaltState::pinned(kPinnedSalt)});
}

inline Value val(std::uint64_t v) { return Value{v}; }

}  // namespace luatable::testing
