#include "luatable/audit.hpp"

#include <bit>
#include <sstream>
#include <unordered_set>

#include "luatable/hash_policy.hpp"
#include "luatable/table.hpp"

namespace luatable {

std::string AuditReport::to_string() const {
  std::ostringstream out;
  for (const auto& v : violations) {
    out << v.what;
    if (v.slot) out << " (slot " << *v.slot << ")";
    out << '\n';
  }
  return out.str();
}

AuditReport audit_hash_part(const HashPart& hash) {
  AuditReport report;
  auto flag = [&](std::string what, std::optional<std::size_t> slot = std::nullopt) {
    report.violations.push_back({std::move(what), slot});
  };

  const std::size_t m = hash.capacity();
  if (m != 0 && !std::has_single_bit(m)) flag("hash capacity is not a power of two");
  if (hash.last_free < -1 || hash.last_free >= static_cast<std::int64_t>(m)) {
    flag("last_free out of range");
    return report;
  }
  for (std::size_t i = static_cast<std::size_t>(hash.last_free + 1); i < m; ++i) {
    if (hash.slots[i].is_free()) flag("free slot above last_free", i);
  }

  std::vector<int> indegree(m, 0);
  bool links_ok = true;
  for (std::size_t i = 0; i < m; ++i) {
    const Slot& s = hash.slots[i];
    if (s.next == kNoSlot) continue;
    if (s.next < 0 || static_cast<std::size_t>(s.next) >= m) {
      flag("next link out of range", i);
      links_ok = false;
      continue;
    }
    if (s.is_free()) flag("free slot carries a next link", i);
    if (++indegree[static_cast<std::size_t>(s.next)] > 1) {
      flag("slot has more than one predecessor", static_cast<std::size_t>(s.next));
      links_ok = false;
    }
  }
  if (!links_ok) return report;

  // With in- and out-degree <= 1, anything not reached from a chain head lies
  // on a cycle.
  std::vector<bool> seen(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (indegree[i] != 0) continue;
    for (SlotIndex j = static_cast<SlotIndex>(i); j != kNoSlot; j = hash.slots[j].next) {
      seen[static_cast<std::size_t>(j)] = true;
    }
  }
  bool acyclic = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (!seen[i]) {
      flag("slot lies on a next-link cycle", i);
      acyclic = false;
    }
  }
  if (!acyclic) return report;

  std::unordered_set<Key> keys;
  for (std::size_t i = 0; i < m; ++i) {
    const Slot& s = hash.slots[i];
    if (!s.has_key()) continue;
    if (!keys.insert(s.key()).second) flag("key stored in two slots", i);
    if (!s.is_used()) continue;
    bool reached = false;
    for (SlotIndex j = static_cast<SlotIndex>(main_position(s.key(), hash.salt, m)); j != kNoSlot;
         j = hash.slots[j].next) {
      if (static_cast<std::size_t>(j) == i) {
        reached = true;
        break;
      }
    }
    if (!reached) flag("used slot unreachable from its main position", i);
  }
  return report;
}

AuditReport invariant_audit(const HybridTable& table) {
  AuditReport report = audit_hash_part(table.hash_part());
  const std::size_t a = table.array_capacity();
  if (a != 0 && !std::has_single_bit(a)) {
    report.violations.push_back({"array capacity is not a power of two", std::nullopt});
  }
  if (table.mode() == TableMode::kPureHash && a != 0) {
    report.violations.push_back({"pure-hash table has an array part", std::nullopt});
  }
  if (table.hash_part().salt != table.salt_state().current()) {
    report.violations.push_back({"hash part salt differs from the salt state", std::nullopt});
  }
  const auto& slots = table.hash_part().slots;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Slot& s = slots[i];
    if (s.is_used() && table.mode() == TableMode::kHybrid &&
        s.key_kind == Key::Kind::kPositiveInt && s.key_bits <= a) {
      report.violations.push_back({"array-range key stored in the hash part", i});
    }
  }
  return report;
}

}  // namespace luatable
