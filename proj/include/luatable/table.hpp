#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "luatable/hash_part.hpp"
#include "luatable/hash_policy.hpp"
#include "luatable/key.hpp"
#include "luatable/metrics.hpp"
#include "luatable/resize_policy.hpp"

namespace luatable {

/// kPureHash keeps the array part permanently empty; every key is hashed.
enum class TableMode : std::uint8_t { kPureHash, kHybrid };

std::string_view to_string(TableMode mode);
TableMode parse_mode(std::string_view name);

/// Dense array part, logically indexed 1..capacity().
struct ArrayPart {
  std::vector<std::optional<Value>> cells;

  std::size_t capacity() const { return cells.size(); }
  std::size_t count() const;
};

struct TableConfig {
  TableMode mode = TableMode::kHybrid;
  ResizePolicy policy = ResizePolicy::kOriginal;
  SaltState salt{};
};

/// Lua 5.4-style hybrid table: an array part for dense positive integer keys
/// and a chained scatter hash part with tombstone deletion. Starts with both
/// parts empty; the first hash insertion goes straight to rehash.
///
/// Single-threaded. A table may move between threads while no call is running.
class HybridTable {
 public:
  HybridTable() : HybridTable(TableConfig{}) {}
  explicit HybridTable(TableConfig config);

  /// Records one search sample (probes) in the metrics when the key is
  /// routed to the hash part.
  std::optional<Value> get(const Key& key);

  /// Updates in place when the key is already present (used or deleted),
  /// otherwise inserts through new_key.
  void set(const Key& key, Value value);

  /// Marks the key's slot deleted, keeping key and next link. Absent keys are
  /// a strict no-op.
  void remove(const Key& key);

  /// Number of slots inspected to reach `key` from its main position, or
  /// nullopt when no hash slot holds the key. Does not touch metrics.
  std::optional<std::size_t> chain_depth(const Key& key) const;

  /// Logical contents: array cells ascending, then used hash slots ascending.
  std::vector<std::pair<Key, Value>> entries() const;

  const HashPart& hash_part() const { return hash_; }
  const ArrayPart& array_part() const { return array_; }
  std::size_t hash_capacity() const { return hash_.capacity(); }
  std::size_t array_capacity() const { return array_.capacity(); }
  TableMode mode() const { return mode_; }
  ResizePolicy policy() const { return policy_; }
  const SaltState& salt_state() const { return salt_; }

  MetricsLog& metrics() { return metrics_; }
  const MetricsLog& metrics() const { return metrics_; }

 private:
  bool routes_to_array(const Key& key) const {
    return mode_ == TableMode::kHybrid && key.is_positive_int() &&
           static_cast<std::uint64_t>(key.as_int()) <= array_.cells.size();
  }
  /// Main position in the current, non-empty hash part.
  SlotIndex home_of(const Key& key) const {
    return static_cast<SlotIndex>(salted_hash(key, hash_.salt) & (hash_.capacity() - 1));
  }
  std::optional<SlotIndex> find_slot(const Key& key, std::size_t& probes) const;
  void new_key(const Key& key, Value value);
  /// Chained-scatter insertion of a key absent from the hash part; false when
  /// no free slot is left.
  bool insert_in_hash(const Key& key, Value value) { return insert_at_home(key, value, home_of(key)); }
  bool insert_at_home(const Key& key, Value value, SlotIndex mp);
  void rehash(const Key& pending_key, Value pending_value);

  TableMode mode_;
  ResizePolicy policy_;
  SaltState salt_;
  ArrayPart array_;
  HashPart hash_;
  MetricsLog metrics_;
};

}  // namespace luatable
