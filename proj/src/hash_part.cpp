#include "luatable/hash_part.hpp"

namespace luatable {

std::optional<SlotIndex> get_free_pos(HashPart& hash) {
  while (hash.last_free >= 0 && hash.slots[static_cast<std::size_t>(hash.last_free)].has_key()) {
    --hash.last_free;
  }
  if (hash.last_free < 0) {
    return std::nullopt;
  }
  return static_cast<SlotIndex>(hash.last_free);
}

SlotCensus census(const HashPart& hash) {
  SlotCensus c;
  for (const Slot& s : hash.slots) {
    switch (s.state) {
      case SlotState::kUsed: ++c.used; break;
      case SlotState::kDeleted: ++c.deleted; break;
      case SlotState::kFree: ++c.free; break;
    }
  }
  return c;
}

}  // namespace luatable
