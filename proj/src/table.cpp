#include "luatable/table.hpp"

#include <array>
#include <string>

namespace luatable {

std::string_view to_string(TableMode mode) {
  return mode == TableMode::kHybrid ? "hybrid" : "pure";
}

TableMode parse_mode(std::string_view name) {
  if (name == "hybrid") return TableMode::kHybrid;
  if (name == "pure") return TableMode::kPureHash;
  throw ConfigError("unknown table mode '" + std::string(name) + "'");
}

std::size_t ArrayPart::count() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.has_value() ? 1 : 0;
  return n;
}

HybridTable::HybridTable(TableConfig config)
    : mode_(config.mode), policy_(config.policy), salt_(config.salt) {
  hash_.salt = salt_.current();
}

std::optional<SlotIndex> HybridTable::find_slot(const Key& key, std::size_t& probes) const {
  probes = 0;
  if (hash_.empty()) return std::nullopt;
  auto i = home_of(key);
  for (;;) {
    const Slot& s = hash_.slots[static_cast<std::size_t>(i)];
    ++probes;
    if (s.holds(key)) return i;
    if (s.next == kNoSlot) return std::nullopt;
    i = s.next;
  }
}

std::optional<Value> HybridTable::get(const Key& key) {
  if (routes_to_array(key)) {
    return array_.cells[static_cast<std::size_t>(key.as_int() - 1)];
  }
  std::size_t probes = 0;
  const auto idx = find_slot(key, probes);
  std::optional<Value> result;
  if (idx) result = hash_.slots[static_cast<std::size_t>(*idx)].value_if_present();
  metrics_.count_search(probes, result.has_value());
  return result;
}

void HybridTable::set(const Key& key, Value value) {
  if (routes_to_array(key)) {
    array_.cells[static_cast<std::size_t>(key.as_int() - 1)] = value;
    return;
  }
  std::size_t probes = 0;
  if (const auto idx = find_slot(key, probes)) {
    Slot& s = hash_.slots[static_cast<std::size_t>(*idx)];
    s.value = value;
    s.state = SlotState::kUsed;
    return;
  }
  new_key(key, value);
}

void HybridTable::remove(const Key& key) {
  if (routes_to_array(key)) {
    array_.cells[static_cast<std::size_t>(key.as_int() - 1)].reset();
    return;
  }
  std::size_t probes = 0;
  if (const auto idx = find_slot(key, probes)) {
    Slot& s = hash_.slots[static_cast<std::size_t>(*idx)];
    if (s.is_used()) {
      s.state = SlotState::kDeleted;
      s.value = Value{};
    }
  }
}

std::optional<std::size_t> HybridTable::chain_depth(const Key& key) const {
  std::size_t probes = 0;
  if (find_slot(key, probes)) return probes;
  return std::nullopt;
}

std::vector<std::pair<Key, Value>> HybridTable::entries() const {
  std::vector<std::pair<Key, Value>> out;
  for (std::size_t i = 0; i < array_.cells.size(); ++i) {
    if (array_.cells[i]) {
      out.emplace_back(Key::positive_int(static_cast<std::int64_t>(i + 1)), *array_.cells[i]);
    }
  }
  for (const Slot& s : hash_.slots) {
    if (s.is_used()) out.emplace_back(s.key(), s.value);
  }
  return out;
}

void HybridTable::new_key(const Key& key, Value value) {
  metrics_.count_new_key();
  if (!insert_in_hash(key, value)) rehash(key, value);
}

bool HybridTable::insert_at_home(const Key& key, Value value, SlotIndex mp) {
  if (hash_.empty()) return false;
  auto& slots = hash_.slots;
  Slot& home = slots[static_cast<std::size_t>(mp)];

  if (!home.is_used()) {
    // Free or deleted: take the slot. A deleted slot keeps its next link.
    if (home.is_free()) home.next = kNoSlot;
    home.set_key(key);
    home.value = value;
    home.state = SlotState::kUsed;
    return true;
  }

  const auto free_pos = get_free_pos(hash_);
  if (!free_pos) return false;
  Slot& spare = slots[static_cast<std::size_t>(*free_pos)];

  const SlotIndex occupant_mp = home_of(home.key());
  if (occupant_mp == mp) {
    // Occupant heads its own chain: splice the new pair in second.
    spare.set_key(key);
    spare.value = value;
    spare.state = SlotState::kUsed;
    spare.next = home.next;
    home.next = *free_pos;
    return true;
  }

  // Occupant is a squatter: move it to the spare slot and relink its
  // predecessor, then claim the main position.
  SlotIndex pred = occupant_mp;
  std::size_t probes = 1;
  while (slots[static_cast<std::size_t>(pred)].next != mp) {
    pred = slots[static_cast<std::size_t>(pred)].next;
    if (pred == kNoSlot) throw IllegalState("occupant unreachable from its main position");
    ++probes;
  }
  metrics_.count_relocation_probes(probes);
  spare = home;
  slots[static_cast<std::size_t>(pred)].next = *free_pos;
  home.set_key(key);
  home.value = value;
  home.state = SlotState::kUsed;
  home.next = kNoSlot;
  return true;
}

void HybridTable::rehash(const Key& pending_key, Value pending_value) {
  RehashEvent event;
  event.t = metrics_.op_clock();
  event.old_capacity = hash_.capacity();
  event.old_array = array_.capacity();
  event.new_key_calls = metrics_.new_key_calls();
  const SlotCensus before = census(hash_);
  event.used_before = before.used;
  event.deleted_before = before.deleted;
  event.free_before = before.free;

  std::size_t new_array = array_.capacity();
  if (mode_ == TableMode::kHybrid) {
    IntegerKeyCensus ints;
    for (std::size_t i = 0; i < array_.cells.size(); ++i) {
      if (array_.cells[i]) ints.add(static_cast<std::int64_t>(i + 1));
    }
    for (const Slot& s : hash_.slots) {
      if (s.is_used() && s.key_kind == Key::Kind::kPositiveInt) {
        ints.add(static_cast<std::int64_t>(s.key_bits));
      }
    }
    if (pending_key.is_positive_int()) ints.add(pending_key.as_int());
    new_array = compute_array_capacity(ints);
  }

  const auto goes_to_array = [&](const Key& k) {
    return mode_ == TableMode::kHybrid && k.is_positive_int() &&
           static_cast<std::uint64_t>(k.as_int()) <= new_array;
  };

  std::size_t hash_bound = goes_to_array(pending_key) ? 0 : 1;
  for (const Slot& s : hash_.slots) {
    if (s.is_used() && !goes_to_array(s.key())) ++hash_bound;
  }
  for (std::size_t i = new_array; i < array_.cells.size(); ++i) {
    if (array_.cells[i]) ++hash_bound;
  }

  // Array cells beyond the new range leave the array part.
  std::vector<std::pair<Key, Value>> evicted;
  for (std::size_t i = new_array; i < array_.cells.size(); ++i) {
    if (array_.cells[i]) {
      evicted.emplace_back(Key::positive_int(static_cast<std::int64_t>(i + 1)), *array_.cells[i]);
    }
  }
  array_.cells.resize(new_array);

  salt_.advance_generation();
  HashPart old = std::move(hash_);
  hash_ = HashPart(luatable::hash_capacity(policy_, hash_bound), salt_.current());

  const auto place = [&](const Key& k, Value v) {
    if (goes_to_array(k)) {
      array_.cells[static_cast<std::size_t>(k.as_int() - 1)] = v;
    } else if (!insert_in_hash(k, v)) {
      throw IllegalState("rehash sized the hash part too small");
    }
  };
  // Reinsert in ascending old-slot order. Hash-bound main positions are
  // computed kLookahead entries early and prefetched.
  constexpr std::size_t kLookahead = 16;
  struct Pending {
    const Slot* slot;
    SlotIndex home;
  };
  std::array<Pending, kLookahead> window{};
  std::size_t head = 0;
  std::size_t filled = 0;
  const auto flush_one = [&] {
    const Pending& p = window[head];
    if (!insert_at_home(p.slot->key(), p.slot->value, p.home)) {
      throw IllegalState("rehash sized the hash part too small");
    }
    head = (head + 1) % kLookahead;
    --filled;
  };
  for (const Slot& s : old.slots) {
    if (!s.is_used()) continue;
    const Key k = s.key();
    if (goes_to_array(k)) {
      array_.cells[static_cast<std::size_t>(k.as_int() - 1)] = s.value;
      continue;
    }
    if (filled == kLookahead) flush_one();
    const SlotIndex home = home_of(k);
    __builtin_prefetch(&hash_.slots[static_cast<std::size_t>(home)], 1);
    window[(head + filled) % kLookahead] = {&s, home};
    ++filled;
  }
  while (filled > 0) flush_one();
  for (const auto& [k, v] : evicted) place(k, v);
  place(pending_key, pending_value);

  event.new_capacity = hash_.capacity();
  event.new_array = new_array;
  event.reinserted = before.used;
  event.array_grew = new_array > event.old_array;
  event.used_after = hash_bound;
  metrics_.record_rehash(event);
}

}  // namespace luatable
