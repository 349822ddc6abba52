#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "luatable/hash_part.hpp"

namespace luatable {

class HybridTable;

struct AuditViolation {
  std::string what;
  std::optional<std::size_t> slot;
};

struct AuditReport {
  std::vector<AuditViolation> violations;

  bool clean() const { return violations.empty(); }
  std::string to_string() const;
};

/// Structural checks on a hash part: power-of-two length, slot-state
/// legality, the last_free frontier, link validity, in-degree <= 1, no cycles,
/// unique keys, and reachability of every used slot from its main position.
AuditReport audit_hash_part(const HashPart& hash);

/// audit_hash_part plus the table-level checks: array length, pure-hash mode
/// has no array part, and no key lives in both parts.
AuditReport invariant_audit(const HybridTable& table);

}  // namespace luatable
