#include "luatable/hash_policy.hpp"

#include <bit>

namespace luatable {

std::size_t main_position(const Key& key, std::uint64_t salt, std::size_t capacity) {
  if (capacity == 0) {
    throw IllegalState("main_position on an empty hash part");
  }
  return static_cast<std::size_t>(salted_hash(key, salt) & (capacity - 1));
}

SaltState::SaltState(std::uint64_t master_seed)
    : master_seed_(master_seed), current_(derive(master_seed, 0)) {}

SaltState SaltState::pinned(std::uint64_t salt) {
  SaltState s(0);
  s.current_ = salt;
  s.pinned_ = true;
  return s;
}

void SaltState::advance_generation() {
  ++generation_;
  if (!pinned_) {
    current_ = derive(master_seed_, generation_);
  }
}

std::uint64_t SaltState::derive(std::uint64_t master_seed, std::uint64_t generation) {
  // Two rounds so that nearby (seed, generation) pairs do not share structure.
  return mix64(mix64(master_seed) ^ (generation * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
}

}  // namespace luatable
