#include "luatable/workloads.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "luatable/hash_policy.hpp"

namespace luatable {

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(mix64(master_seed) + index * 0xd1b54a32d192ed03ULL);
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw ConfigError("uniform_below with bound 0");
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool operator==(const WorkloadOp& a, const WorkloadOp& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, InsertFresh> || std::is_same_v<T, InsertAt>) {
          return x.key == y.key && x.value == y.value;
        } else if constexpr (std::is_same_v<T, DeleteRandomPresent>) {
          return x.selector == y.selector;
        } else {
          return x.key == y.key;
        }
      },
      a);
}

// --- generators -------------------------------------------------------------

void StochasticConfig::validate() const {
  if (!(p > 0.5 && p < 1.0)) throw ConfigError("insertion probability p must lie in (1/2, 1)");
  if (T < 1) throw ConfigError("operation count T must be >= 1");
}

StochasticStream::StochasticStream(const StochasticConfig& config)
    : config_(config), rng_(config.seed) {
  config_.validate();
}

WorkloadOp StochasticStream::next(bool table_empty) {
  if (done()) throw IllegalState("stochastic stream exhausted");
  ++emitted_;
  const bool coin_insert = uniform_unit(rng_) < config_.p;
  const std::uint64_t selector = rng_();
  if (coin_insert || table_empty) {
    const std::uint64_t id = next_token_++;
    return InsertFresh{Key::token(id), Value{id}};
  }
  return DeleteRandomPresent{selector};
}

std::vector<WorkloadOp> gen_full_table_churn(unsigned m, std::uint64_t rounds) {
  if (m < 1 || m > 40) throw ConfigError("churn exponent m must lie in [1, 40]");
  const std::uint64_t capacity = std::uint64_t{1} << m;
  std::vector<WorkloadOp> ops;
  ops.reserve(capacity + 2 * rounds);
  for (std::uint64_t id = 0; id < capacity; ++id) {
    ops.push_back(InsertFresh{Key::token(id), Value{id}});
  }
  for (std::uint64_t r = 0; r < rounds; ++r) {
    ops.push_back(DeleteKey{Key::token(r)});
    const std::uint64_t id = capacity + r;
    ops.push_back(InsertFresh{Key::token(id), Value{id}});
  }
  return ops;
}

Key mixed_sign_stand_in(std::int64_t v) {
  if (v > 0) throw ConfigError("stand-in tokens cover non-positive integers only");
  return Key::token(static_cast<std::uint64_t>(v));
}

std::vector<WorkloadOp> gen_mixed_sign(unsigned k) {
  if (k < 1 || k > 40) throw ConfigError("mixed-sign exponent k must lie in [1, 40]");
  const auto half = std::int64_t{1} << k;
  std::vector<WorkloadOp> ops;
  ops.reserve(static_cast<std::size_t>(2 * half));
  for (std::int64_t v = -(half - 1); v <= 0; ++v) {
    ops.push_back(InsertFresh{mixed_sign_stand_in(v), Value{static_cast<std::uint64_t>(v)}});
  }
  for (std::int64_t v = 1; v <= half; ++v) {
    ops.push_back(InsertFresh{Key::positive_int(v), Value{static_cast<std::uint64_t>(v)}});
  }
  return ops;
}

std::vector<WorkloadOp> gen_adversarial_permutation(unsigned k) {
  if (k < 1 || k > 40) throw ConfigError("adversarial exponent k must lie in [1, 40]");
  const auto block = std::int64_t{1} << k;
  std::vector<WorkloadOp> ops;
  ops.reserve(static_cast<std::size_t>(3 * block));
  for (std::int64_t v = 2 * block + 1; v <= 3 * block; ++v) {
    ops.push_back(InsertAt{Key::positive_int(v), Value{static_cast<std::uint64_t>(v)}});
  }
  for (std::int64_t v = 1; v <= 2 * block; ++v) {
    ops.push_back(InsertAt{Key::positive_int(v), Value{static_cast<std::uint64_t>(v)}});
  }
  return ops;
}

std::vector<WorkloadOp> gen_random_permutation(std::uint64_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("permutation length n must be >= 1");
  std::vector<std::int64_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::int64_t{1});
  Rng rng(seed);
  for (std::uint64_t i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[uniform_below(rng, i + 1)]);
  }
  std::vector<WorkloadOp> ops;
  ops.reserve(n);
  for (auto v : perm) {
    ops.push_back(InsertAt{Key::positive_int(v), Value{static_cast<std::uint64_t>(v)}});
  }
  return ops;
}

TailEstimate half_full_tail_estimate(std::uint64_t n, std::uint64_t t, unsigned j,
                                     std::uint64_t trials, std::uint64_t seed) {
  if (2 * t >= n) throw ConfigError("theta = t/n must be < 1/2");
  if (j >= 63 || (std::uint64_t{1} << j) > n) throw ConfigError("need 2^j <= n");
  if (trials == 0) throw ConfigError("need at least one trial");
  const std::uint64_t s = std::uint64_t{1} << j;

  std::vector<std::uint64_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::uint64_t{1});
  std::vector<std::uint64_t> swaps(t);
  Rng rng(seed);

  TailEstimate est;
  est.trials = trials;
  std::uint64_t over_half = 0;
  double sum = 0;
  double sum_sq = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    // Partial Fisher-Yates: positions 0..t-1 become a uniform prefix.
    std::uint64_t revealed = 0;
    for (std::uint64_t i = 0; i < t; ++i) {
      const std::uint64_t pick = i + uniform_below(rng, n - i);
      swaps[i] = pick;
      std::swap(perm[i], perm[pick]);
      revealed += perm[i] <= s ? 1 : 0;
    }
    for (std::uint64_t i = t; i-- > 0;) std::swap(perm[i], perm[swaps[i]]);
    over_half += 2 * revealed > s ? 1 : 0;
    sum += static_cast<double>(revealed);
    sum_sq += static_cast<double>(revealed) * static_cast<double>(revealed);
  }
  const auto count = static_cast<double>(trials);
  est.probability = static_cast<double>(over_half) / count;
  est.mean = sum / count;
  est.variance = trials > 1 ? (sum_sq - count * est.mean * est.mean) / (count - 1) : 0.0;
  return est;
}

// --- driver -----------------------------------------------------------------

std::int64_t PresentSet::find(const Key& key) const {
  const std::uint64_t id = key.bits();
  if (id < kDenseLimit) {
    const auto& dense = key.is_positive_int() ? dense_int_ : dense_token_;
    return id < dense.size() ? dense[id] : -1;
  }
  const auto it = sparse_.find(key);
  return it == sparse_.end() ? -1 : it->second;
}

void PresentSet::set_pos(const Key& key, std::int64_t pos) {
  const std::uint64_t id = key.bits();
  if (id < kDenseLimit) {
    auto& dense = key.is_positive_int() ? dense_int_ : dense_token_;
    if (id >= dense.size()) {
      if (pos < 0) return;
      dense.resize(std::max<std::size_t>(id + 1, dense.size() * 2), -1);
    }
    dense[id] = pos;
    return;
  }
  if (pos < 0) {
    sparse_.erase(key);
  } else {
    sparse_[key] = pos;
  }
}

void PresentSet::insert(const Key& key) {
  if (contains(key)) return;
  set_pos(key, static_cast<std::int64_t>(keys_.size()));
  keys_.push_back(key);
}

void PresentSet::erase(const Key& key) {
  const std::int64_t pos = find(key);
  if (pos < 0) return;
  const Key last = keys_.back();
  keys_[static_cast<std::size_t>(pos)] = last;
  set_pos(last, pos);
  keys_.pop_back();
  set_pos(key, -1);
}

WorkloadOp Driver::resolve(const WorkloadOp& op) const {
  if (const auto* d = std::get_if<DeleteRandomPresent>(&op)) {
    if (present_.empty()) throw IllegalState("random delete on an empty table");
    // Multiply-shift maps the 64-bit selector onto [0, size) uniformly up to
    // a bias of size / 2^64.
    const auto idx = static_cast<std::size_t>(
        (static_cast<unsigned __int128>(d->selector) * present_.size()) >> 64);
    return DeleteKey{present_.at(idx)};
  }
  return op;
}

std::optional<Value> Driver::apply(const WorkloadOp& raw) {
  table_.metrics().tick();
  const WorkloadOp op = resolve(raw);
  return std::visit(
      [&](const auto& o) -> std::optional<Value> {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, InsertFresh> || std::is_same_v<T, InsertAt>) {
          table_.set(o.key, o.value);
          present_.insert(o.key);
        } else if constexpr (std::is_same_v<T, DeleteKey>) {
          table_.remove(o.key);
          present_.erase(o.key);
        } else if constexpr (std::is_same_v<T, Lookup>) {
          return table_.get(o.key);
        }
        return std::nullopt;
      },
      op);
}

void replay(HybridTable& table, std::span<const WorkloadOp> ops) {
  Driver driver(table);
  for (const auto& op : ops) driver.apply(op);
}

// --- line format ------------------------------------------------------------

WorkloadParseError::WorkloadParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string format_key(const Key& key) {
  if (key.is_positive_int()) return std::to_string(key.as_int());
  return "t" + std::to_string(key.bits());
}

std::string format_op(const WorkloadOp& op) {
  return std::visit(
      [](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, InsertFresh> || std::is_same_v<T, InsertAt>) {
          return "I " + format_key(o.key) + " " + std::to_string(o.value.token);
        } else if constexpr (std::is_same_v<T, DeleteKey>) {
          return "D " + format_key(o.key);
        } else if constexpr (std::is_same_v<T, Lookup>) {
          return "L " + format_key(o.key);
        } else {
          throw IllegalState("DeleteRandomPresent must be resolved before serialization");
        }
      },
      op);
}

void write_workload(std::ostream& out, std::span<const WorkloadOp> ops) {
  for (const auto& op : ops) out << format_op(op) << '\n';
}

namespace {

bool parse_u64(std::string_view text, std::uint64_t& out) {
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

Key parse_key(std::string_view text, std::size_t line) {
  std::uint64_t v = 0;
  if (!text.empty() && text.front() == 't') {
    if (!parse_u64(text.substr(1), v)) throw WorkloadParseError(line, "bad token key");
    return Key::token(v);
  }
  if (!parse_u64(text, v) || v < 1 || v > static_cast<std::uint64_t>(INT64_MAX)) {
    throw WorkloadParseError(line, "bad integer key '" + std::string(text) + "'");
  }
  return Key::positive_int(static_cast<std::int64_t>(v));
}

}  // namespace

std::vector<WorkloadOp> parse_workload(std::istream& in) {
  std::vector<WorkloadOp> ops;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    std::istringstream fields(text);
    std::string verb;
    if (!(fields >> verb) || verb.front() == '#') continue;
    std::vector<std::string> args;
    for (std::string a; fields >> a;) args.push_back(a);
    if (verb == "I") {
      if (args.size() != 2) throw WorkloadParseError(line, "I takes a key and a value");
      std::uint64_t v = 0;
      if (!parse_u64(args[1], v)) throw WorkloadParseError(line, "bad value");
      ops.push_back(InsertAt{parse_key(args[0], line), Value{v}});
    } else if (verb == "D" || verb == "L") {
      if (args.size() != 1) throw WorkloadParseError(line, verb + " takes exactly one key");
      const Key k = parse_key(args[0], line);
      if (verb == "D") {
        ops.push_back(DeleteKey{k});
      } else {
        ops.push_back(Lookup{k});
      }
    } else {
      throw WorkloadParseError(line, "unknown verb '" + verb + "'");
    }
  }
  return ops;
}

}  // namespace luatable
