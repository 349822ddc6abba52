#include "luatable/cli/experiment.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "luatable/key.hpp"

namespace luatable::cli {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr std::pair<WorkloadKind, std::string_view> kKindNames[] = {
    {WorkloadKind::kStochastic, "stochastic"}, {WorkloadKind::kChurn, "churn"},
    {WorkloadKind::kMixedSign, "mixed-sign"},  {WorkloadKind::kAdvPerm, "adv-perm"},
    {WorkloadKind::kRandPerm, "rand-perm"},    {WorkloadKind::kFile, "file"},
};

std::uint64_t churn_rounds(const WorkloadSpec& w) {
  return w.rounds.value_or(std::uint64_t{1} << w.k);
}

std::vector<WorkloadOp> materialize(const WorkloadSpec& w, std::uint64_t seed,
                                    std::span<const WorkloadOp> file_ops) {
  switch (w.kind) {
    case WorkloadKind::kChurn:
      return gen_full_table_churn(w.k, churn_rounds(w));
    case WorkloadKind::kMixedSign:
      return gen_mixed_sign(w.k);
    case WorkloadKind::kAdvPerm:
      return gen_adversarial_permutation(w.k);
    case WorkloadKind::kRandPerm:
      return gen_random_permutation(w.n, seed);
    case WorkloadKind::kFile:
      return {file_ops.begin(), file_ops.end()};
    case WorkloadKind::kStochastic:
      break;
  }
  throw IllegalState("stochastic workloads are streamed");
}

std::vector<std::uint64_t> checkpoint_marks(std::uint64_t total) {
  std::vector<std::uint64_t> marks;
  for (std::size_t i = 1; i <= kCheckpoints; ++i) {
    const std::uint64_t m = total * i / kCheckpoints;
    if (m > 0 && (marks.empty() || marks.back() != m)) marks.push_back(m);
  }
  return marks;
}

double elapsed(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

}  // namespace

std::string_view to_string(WorkloadKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

WorkloadKind parse_workload_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown workload '" + std::string(name) + "'");
}

json WorkloadSpec::to_json() const {
  json j;
  j["kind"] = std::string(cli::to_string(kind));
  switch (kind) {
    case WorkloadKind::kStochastic:
      j["p"] = p;
      j["T"] = T;
      break;
    case WorkloadKind::kChurn:
      j["k"] = k;
      j["rounds"] = churn_rounds(*this);
      break;
    case WorkloadKind::kMixedSign:
    case WorkloadKind::kAdvPerm:
      j["k"] = k;
      break;
    case WorkloadKind::kRandPerm:
      j["n"] = n;
      break;
    case WorkloadKind::kFile:
      j["file"] = file;
      break;
  }
  return j;
}

void RunConfig::validate() const {
  if (trials == 0) throw ConfigError("--trials must be at least 1");
  if (workers == 0) throw ConfigError("worker count must be at least 1");
  const auto& w = workload;
  switch (w.kind) {
    case WorkloadKind::kStochastic:
      StochasticConfig{w.p, w.T, 0}.validate();
      break;
    case WorkloadKind::kChurn:
    case WorkloadKind::kMixedSign:
    case WorkloadKind::kAdvPerm:
      if (w.k < 1 || w.k > 26) throw ConfigError("--k must be in [1, 26]");
      break;
    case WorkloadKind::kRandPerm:
      if (w.n < 1 || w.n > (std::uint64_t{1} << 28)) throw ConfigError("--n must be in [1, 2^28]");
      break;
    case WorkloadKind::kFile:
      if (w.file.empty()) throw ConfigError("--workload file needs --file");
      break;
  }
}

std::uint64_t trial_seed(const RunConfig& config, std::uint64_t index) {
  return stream_seed(config.seed, index);
}

TrialResult run_trial(const RunConfig& config, std::uint64_t index,
                      std::span<const WorkloadOp> file_ops) {
  TrialResult r;
  r.index = index;
  r.seed = trial_seed(config, index);
  // The table's salt stream and the workload stream are split off the trial seed.
  HybridTable table(TableConfig{config.mode, config.policy, SaltState(stream_seed(r.seed, 1))});
  Driver driver(table);
  const std::uint64_t workload_seed = stream_seed(r.seed, 0);

  if (config.workload.kind == WorkloadKind::kStochastic) {
    StochasticStream stream(StochasticConfig{config.workload.p, config.workload.T, workload_seed});
    const auto marks = checkpoint_marks(config.workload.T);
    std::size_t next_mark = 0;
    const auto start = Clock::now();
    while (!stream.done()) {
      driver.apply(stream.next(driver.table_empty()));
      if (stream.emitted() == marks[next_mark]) {
        r.checkpoints.push_back({marks[next_mark], elapsed(start)});
        ++next_mark;
      }
    }
    r.seconds = elapsed(start);
    r.ops = stream.emitted();
  } else {
    const auto ops = materialize(config.workload, workload_seed, file_ops);
    const auto marks = checkpoint_marks(ops.size());
    std::size_t next_mark = 0;
    const auto start = Clock::now();
    for (std::size_t i = 0; i < ops.size(); ++i) {
      driver.apply(ops[i]);
      if (i + 1 == marks[next_mark]) {
        r.checkpoints.push_back({marks[next_mark], elapsed(start)});
        ++next_mark;
      }
    }
    r.seconds = elapsed(start);
    r.ops = ops.size();
  }
  r.final_hash_capacity = table.hash_capacity();
  r.final_array_capacity = table.array_capacity();
  r.log = std::move(table.metrics());
  return r;
}

void parallel_for(std::uint64_t count, unsigned workers,
                  const std::function<void(std::uint64_t)>& job) {
  const auto threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::uint64_t i = next++; i < count; i = next++) {
          try {
            job(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<TrialResult> run_trials(const RunConfig& config, std::span<const WorkloadOp> file_ops) {
  config.validate();
  std::vector<TrialResult> results(config.trials);
  parallel_for(config.trials, config.workers,
               [&](std::uint64_t i) { results[i] = run_trial(config, i, file_ops); });
  return results;
}

unsigned workers_from_env() {
  const char* raw = std::getenv("LUATABLE_WORKERS");
  if (raw == nullptr || *raw == '\0') return std::max(1u, std::thread::hardware_concurrency());
  unsigned value = 0;
  const std::string_view s(raw);
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || end != s.data() + s.size() || value == 0) {
    throw ConfigError("LUATABLE_WORKERS must be a positive integer, got '" + std::string(s) + "'");
  }
  return value;
}

std::map<std::size_t, double> mean_rehash_count_by_size(std::span<const TrialResult> results) {
  std::map<std::size_t, double> sums;
  for (const auto& r : results) {
    for (const auto& [size, count] : rehash_count_by_size(r.log)) sums[size] += count;
  }
  for (auto& [size, sum] : sums) sum /= static_cast<double>(results.size());
  return sums;
}

json summary_document(const RunConfig& config, std::span<const TrialResult> results) {
  json j;
  j["workload"] = config.workload.to_json();
  j["policy"] = std::string(to_string(config.policy));
  j["mode"] = std::string(to_string(config.mode));
  j["seed"] = config.seed;
  j["trials"] = results.size();

  double calls = 0;
  double cost = 0;
  double events = 0;
  json per_trial = json::array();
  for (const auto& r : results) {
    calls += static_cast<double>(r.log.insertion_calls());
    cost += static_cast<double>(cost_C(r.log));
    events += static_cast<double>(r.log.rehash_events().size());
    json t;
    t["trial"] = r.index;
    t["seed"] = r.seed;
    t["ops"] = r.ops;
    t["final_hash_capacity"] = r.final_hash_capacity;
    t["final_array_capacity"] = r.final_array_capacity;
    t["metrics"] = json::parse(summary_json(r.log));
    per_trial.push_back(std::move(t));
  }
  const double n = results.empty() ? 1.0 : static_cast<double>(results.size());
  j["mean_insertion_calls"] = calls / n;
  j["mean_cost_C"] = cost / n;
  j["mean_rehash_count"] = events / n;
  json by_size = json::object();
  for (const auto& [size, mean] : mean_rehash_count_by_size(results)) {
    by_size[std::to_string(size)] = mean;
  }
  j["mean_rehash_count_by_size"] = std::move(by_size);
  j["per_trial"] = std::move(per_trial);
  return j;
}

json timing_document(std::span<const TrialResult> results) {
  json j;
  double seconds = 0;
  std::uint64_t ops = 0;
  json per_trial = json::array();
  for (const auto& r : results) {
    seconds += r.seconds;
    ops += r.ops;
    json t;
    t["trial"] = r.index;
    t["seconds"] = r.seconds;
    t["us_per_op"] = r.ops == 0 ? 0.0 : r.seconds * 1e6 / static_cast<double>(r.ops);
    per_trial.push_back(std::move(t));
  }
  j["total_seconds"] = seconds;
  j["total_ops"] = ops;
  j["us_per_op"] = ops == 0 ? 0.0 : seconds * 1e6 / static_cast<double>(ops);
  j["per_trial"] = std::move(per_trial);
  return j;
}

json manifest_document(std::string_view command, const RunConfig& config,
                       const std::vector<std::string>& outputs) {
  json j;
  j["tool"] = "luatable";
  j["manifest_version"] = 1;
  j["command"] = std::string(command);
  j["workload"] = config.workload.to_json();
  j["policy"] = std::string(to_string(config.policy));
  j["mode"] = std::string(to_string(config.mode));
  j["seed"] = config.seed;
  j["trials"] = config.trials;
  j["rng"] = "mt19937_64";
  json seeds = json::array();
  for (std::uint64_t i = 0; i < config.trials; ++i) seeds.push_back(trial_seed(config, i));
  j["trial_seeds"] = std::move(seeds);
  j["outputs"] = outputs;
  return j;
}

std::string rehash_by_size_csv(std::span<const TrialResult> results) {
  std::ostringstream out;
  out << "size,log2_size,mean_rehash_count\n";
  for (const auto& [size, mean] : mean_rehash_count_by_size(results)) {
    out << size << ',' << (size == 0 ? 0 : std::bit_width(size) - 1) << ',' << mean << '\n';
  }
  return out.str();
}

std::string timing_csv(std::span<const TrialResult> results) {
  std::ostringstream out;
  out << "trial,T,seconds,us_per_op\n";
  for (const auto& r : results) {
    for (const auto& c : r.checkpoints) {
      out << r.index << ',' << c.ops << ',' << c.seconds << ','
          << c.seconds * 1e6 / static_cast<double>(c.ops) << '\n';
    }
  }
  return out.str();
}

json state_dump(const HybridTable& table) {
  json j;
  j["mode"] = std::string(to_string(table.mode()));
  j["policy"] = std::string(to_string(table.policy()));
  j["salt"] = table.hash_part().salt;
  j["salt_generation"] = table.salt_state().generation();

  const HashPart& hash = table.hash_part();
  json slots = json::array();
  for (std::size_t i = 0; i < hash.slots.size(); ++i) {
    const Slot& s = hash.slots[i];
    json slot;
    slot["index"] = i;
    slot["state"] = s.is_used() ? "used" : s.is_deleted() ? "deleted" : "free";
    slot["key"] = s.has_key() ? json(format_key(s.key())) : json(nullptr);
    slot["value"] = s.is_used() ? json(s.value.token) : json(nullptr);
    slot["next"] = s.next == kNoSlot ? json(nullptr) : json(s.next);
    slots.push_back(std::move(slot));
  }
  j["hash"] = {{"capacity", hash.capacity()}, {"last_free", hash.last_free}, {"slots", slots}};

  json cells = json::array();
  for (const auto& c : table.array_part().cells) {
    cells.push_back(c ? json(c->token) : json(nullptr));
  }
  j["array"] = {{"capacity", table.array_capacity()}, {"cells", cells}};
  j["metrics"] = json::parse(summary_json(table.metrics()));
  return j;
}

}  // namespace luatable::cli
