#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "luatable/key.hpp"
#include "luatable/table.hpp"

namespace luatable {

// ---------------------------------------------------------------------------
// Randomness. Every generator draws from std::mt19937_64, whose output
// sequence is fixed by the C++ standard; distributions are computed by hand so
// streams are identical across standard libraries.

using Rng = std::mt19937_64;

/// Seed of the `index`-th independent stream derived from a master seed.
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index);

/// Uniform integer in [0, bound) (Lemire's multiply-shift with rejection).
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1) built from the top 53 bits.
double uniform_unit(Rng& rng);

// ---------------------------------------------------------------------------
// Operations.

struct InsertFresh {
  Key key;
  Value value;
};
/// Resolved by the driver: selector picks uniformly among present keys.
struct DeleteRandomPresent {
  std::uint64_t selector = 0;
};
struct InsertAt {
  Key key;
  Value value;
};
struct DeleteKey {
  Key key;
};
struct Lookup {
  Key key;
};

using WorkloadOp = std::variant<InsertFresh, DeleteRandomPresent, InsertAt, DeleteKey, Lookup>;

bool operator==(const WorkloadOp& a, const WorkloadOp& b);

// ---------------------------------------------------------------------------
// Generators.

struct StochasticConfig {
  double p = 0.75;  ///< insertion probability, in (1/2, 1)
  std::uint64_t T = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless 1/2 < p < 1 and T >= 1.
  void validate() const;
};

/// Insert/delete stream of the probabilistic model. Each call draws one
/// Bernoulli(p) coin; an empty table forces an insertion regardless of the
/// coin. Fresh keys are the tokens 0, 1, 2, ... in insertion order.
class StochasticStream {
 public:
  explicit StochasticStream(const StochasticConfig& config);

  bool done() const { return emitted_ == config_.T; }
  std::uint64_t emitted() const { return emitted_; }
  WorkloadOp next(bool table_empty);

 private:
  StochasticConfig config_;
  Rng rng_;
  std::uint64_t emitted_ = 0;
  std::uint64_t next_token_ = 0;
};

/// Fills a pure hash table of capacity 2^m with fresh tokens, then alternates
/// (delete the oldest present key, insert a fresh token) `rounds` times.
std::vector<WorkloadOp> gen_full_table_churn(unsigned m, std::uint64_t rounds);

/// 2^k non-array tokens standing in for -(2^k - 1)..0, then the integers
/// 1..2^k, all inserted in that order.
std::vector<WorkloadOp> gen_mixed_sign(unsigned k);

/// For n = 3 * 2^k: the keys 2*2^k+1..3*2^k first, then 1..2*2^k.
std::vector<WorkloadOp> gen_adversarial_permutation(unsigned k);

/// Fisher-Yates shuffle of 1..n inserted in shuffled order.
std::vector<WorkloadOp> gen_random_permutation(std::uint64_t n, std::uint64_t seed);

/// The token that stands in for the non-positive integer `v` in gen_mixed_sign.
Key mixed_sign_stand_in(std::int64_t v);

struct TailEstimate {
  double probability = 0;  ///< fraction of trials with |S_t| > s / 2
  double mean = 0;         ///< sample mean of |S_t|
  double variance = 0;     ///< unbiased sample variance of |S_t|
  std::uint64_t trials = 0;
};

/// Monte Carlo over `trials` random permutations of [n]: how many of the
/// first t revealed keys fall in S = [1, 2^j]. Throws ConfigError unless
/// t < n / 2 and 2^j <= n.
TailEstimate half_full_tail_estimate(std::uint64_t n, std::uint64_t t, unsigned j,
                                     std::uint64_t trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Driver.

/// Present-key mirror supporting O(1) insert, erase, and uniform selection.
class PresentSet {
 public:
  bool contains(const Key& key) const { return find(key) >= 0; }
  void insert(const Key& key);
  void erase(const Key& key);
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  const Key& at(std::size_t i) const { return keys_[i]; }

 private:
  // Dense small ids are indexed directly; everything else goes to the map.
  static constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 28;
  std::int64_t find(const Key& key) const;
  void set_pos(const Key& key, std::int64_t pos);

  std::vector<Key> keys_;
  std::vector<std::int64_t> dense_int_;
  std::vector<std::int64_t> dense_token_;
  std::unordered_map<Key, std::int64_t> sparse_;
};

/// Applies workload operations to a table, ticking its op clock once per
/// operation and keeping the present-key mirror in sync.
class Driver {
 public:
  explicit Driver(HybridTable& table) : table_(table) {}

  /// Replaces DeleteRandomPresent by the DeleteKey it selects. A selector on
  /// an empty table throws IllegalState.
  WorkloadOp resolve(const WorkloadOp& op) const;

  /// Returns the looked-up value for Lookup, nullopt otherwise.
  std::optional<Value> apply(const WorkloadOp& op);

  bool table_empty() const { return present_.empty(); }
  const PresentSet& present() const { return present_; }
  HybridTable& table() { return table_; }

 private:
  HybridTable& table_;
  PresentSet present_;
};

/// Replays a whole stream; returns the driver's table metrics by reference.
void replay(HybridTable& table, std::span<const WorkloadOp> ops);

// ---------------------------------------------------------------------------
// Line format: "I <key> <value>", "D <key>", "L <key>". Positive integer keys
// are written in decimal, tokens as "t<decimal id>", values in decimal. Blank
// lines and lines starting with '#' are ignored on input.

class WorkloadParseError : public std::runtime_error {
 public:
  WorkloadParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string format_key(const Key& key);
/// Throws IllegalState for DeleteRandomPresent; resolve it first.
std::string format_op(const WorkloadOp& op);
void write_workload(std::ostream& out, std::span<const WorkloadOp> ops);
std::vector<WorkloadOp> parse_workload(std::istream& in);

}  // namespace luatable
