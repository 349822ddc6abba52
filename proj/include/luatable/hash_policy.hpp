#pragma once

#include <cstddef>
#include <cstdint>

#include "luatable/key.hpp"

namespace luatable {

/// SplitMix64 finalizer: a bijective 64-bit avalanche mix.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Full 64-bit hash of a key under a salt. Tokens see a rotated copy of the
/// salt, so an integer and a token collide only through a per-salt accident.
constexpr std::uint64_t salted_hash(const Key& key, std::uint64_t salt) {
  const std::uint64_t kind_salt =
      key.kind() == Key::Kind::kToken ? ((salt << 23) | (salt >> 41)) ^ 0x2545f4914f6cdd1dULL : 0;
  return mix64(key.bits() ^ salt ^ kind_salt);
}

/// Slot index of `key` in a hash part of `capacity` slots (a power of two).
/// Throws IllegalState for capacity 0.
std::size_t main_position(const Key& key, std::uint64_t salt, std::size_t capacity);

/// Salt lifecycle. The current salt is a pure function of (master_seed,
/// generation) unless pinned, in which case it never changes.
class SaltState {
 public:
  explicit SaltState(std::uint64_t master_seed = 0);

  /// Fixed salt for every generation; used when comparing against the oracle.
  static SaltState pinned(std::uint64_t salt);

  std::uint64_t current() const { return current_; }
  std::uint64_t generation() const { return generation_; }
  std::uint64_t master_seed() const { return master_seed_; }
  bool is_pinned() const { return pinned_; }

  /// Called once per rehash.
  void advance_generation();

  static std::uint64_t derive(std::uint64_t master_seed, std::uint64_t generation);

 private:
  std::uint64_t master_seed_ = 0;
  std::uint64_t generation_ = 0;
  std::uint64_t current_ = 0;
  bool pinned_ = false;
};

}  // namespace luatable
