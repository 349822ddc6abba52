#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "luatable/key.hpp"

namespace luatable {

using SlotIndex = std::int32_t;
inline constexpr SlotIndex kNoSlot = -1;

enum class SlotState : std::uint8_t { kFree, kDeleted, kUsed };

/// One cell of the hash part (24 bytes). The state tag makes "value without
/// key" unrepresentable: the key is meaningful unless free, `value` only when
/// used.
struct Slot {
  std::uint64_t key_bits = 0;
  Value value{};
  SlotIndex next = kNoSlot;
  Key::Kind key_kind = Key::Kind::kPositiveInt;
  SlotState state = SlotState::kFree;

  Key key() const { return Key::from_parts(key_kind, key_bits); }
  void set_key(const Key& k) {
    key_bits = k.bits();
    key_kind = k.kind();
  }
  bool holds(const Key& k) const {
    return state != SlotState::kFree && key_bits == k.bits() && key_kind == k.kind();
  }

  bool is_free() const { return state == SlotState::kFree; }
  bool is_used() const { return state == SlotState::kUsed; }
  bool is_deleted() const { return state == SlotState::kDeleted; }
  bool has_key() const { return state != SlotState::kFree; }
  std::optional<Key> key_if_present() const {
    return has_key() ? std::optional<Key>(key()) : std::nullopt;
  }
  std::optional<Value> value_if_present() const {
    return is_used() ? std::optional<Value>(value) : std::nullopt;
  }
};

/// Slot vector of length 0 or 2^m plus the right-to-left free-slot cursor.
struct HashPart {
  std::vector<Slot> slots;
  std::int64_t last_free = -1;
  std::uint64_t salt = 0;

  HashPart() = default;
  HashPart(std::size_t capacity, std::uint64_t salt_value)
      : slots(capacity), last_free(static_cast<std::int64_t>(capacity) - 1), salt(salt_value) {}

  std::size_t capacity() const { return slots.size(); }
  bool empty() const { return slots.empty(); }
};

/// Moves `last_free` left past every slot holding a key (used or deleted) and
/// returns it, or nullopt once it has left the array. Never increases the cursor.
std::optional<SlotIndex> get_free_pos(HashPart& hash);

struct SlotCensus {
  std::size_t used = 0;
  std::size_t deleted = 0;
  std::size_t free = 0;
};

SlotCensus census(const HashPart& hash);

}  // namespace luatable
