#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace luatable {

/// Raised when an operation is invoked in a state its contract forbids.
class IllegalState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised for invalid workload or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A table key: either a positive integer (the only kind eligible for the
/// array part) or an opaque 64-bit token standing in for every other key type.
class Key {
 public:
  enum class Kind : std::uint8_t { kPositiveInt = 0, kToken = 1 };

  constexpr Key() = default;

  /// Throws ConfigError when value < 1.
  static Key positive_int(std::int64_t value) {
    if (value < 1) {
      throw ConfigError("positive integer key must be >= 1");
    }
    return Key(Kind::kPositiveInt, static_cast<std::uint64_t>(value));
  }

  static constexpr Key token(std::uint64_t id) { return Key(Kind::kToken, id); }

  /// Rebuilds a key from parts previously taken from a valid key.
  static constexpr Key from_parts(Kind kind, std::uint64_t bits) { return Key(kind, bits); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_positive_int() const { return kind_ == Kind::kPositiveInt; }
  constexpr std::int64_t as_int() const { return static_cast<std::int64_t>(bits_); }
  constexpr std::uint64_t bits() const { return bits_; }

  friend constexpr bool operator==(const Key&, const Key&) = default;
  friend constexpr auto operator<=>(const Key& a, const Key& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }

 private:
  constexpr Key(Kind kind, std::uint64_t bits) : bits_(bits), kind_(kind) {}

  std::uint64_t bits_ = 1;
  Kind kind_ = Kind::kPositiveInt;
};

/// Opaque payload. Absence (Lua's nil) is expressed with std::optional<Value>.
struct Value {
  std::uint64_t token = 0;
  friend constexpr auto operator<=>(const Value&, const Value&) = default;
};

}  // namespace luatable

template <>
struct std::hash<luatable::Key> {
  std::size_t operator()(const luatable::Key& k) const noexcept {
    std::uint64_t x = k.bits() * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(k.kind());
    return static_cast<std::size_t>(x ^ (x >> 29));
  }
};
