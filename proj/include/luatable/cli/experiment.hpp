#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "luatable/metrics.hpp"
#include "luatable/resize_policy.hpp"
#include "luatable/table.hpp"
#include "luatable/workloads.hpp"

namespace luatable::cli {

enum class WorkloadKind { kStochastic, kChurn, kMixedSign, kAdvPerm, kRandPerm, kFile };

std::string_view to_string(WorkloadKind kind);
/// Throws ConfigError on unknown names.
WorkloadKind parse_workload_kind(std::string_view name);

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::kStochastic;
  double p = 0.75;
  std::uint64_t T = 1000000;
  unsigned k = 10;
  std::uint64_t n = 1024;
  /// Churn rounds; 2^k when unset.
  std::optional<std::uint64_t> rounds;
  std::string file;

  /// Only the parameters the workload actually reads.
  nlohmann::ordered_json to_json() const;
};

struct RunConfig {
  WorkloadSpec workload;
  ResizePolicy policy = ResizePolicy::kOriginal;
  TableMode mode = TableMode::kHybrid;
  std::uint64_t seed = 0;
  std::uint64_t trials = 1;
  unsigned workers = 1;

  /// Throws ConfigError on out-of-range parameters.
  void validate() const;
};

/// Wall clock at a point of the replay loop.
struct Checkpoint {
  std::uint64_t ops = 0;
  double seconds = 0;
};

struct TrialResult {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::uint64_t ops = 0;
  MetricsLog log;
  std::size_t final_hash_capacity = 0;
  std::size_t final_array_capacity = 0;
  double seconds = 0;
  std::vector<Checkpoint> checkpoints;
};

inline constexpr std::size_t kCheckpoints = 20;

/// Seed of trial `index` (stream_seed of the master seed).
std::uint64_t trial_seed(const RunConfig& config, std::uint64_t index);

/// Runs one trial. `file_ops` is the parsed workload for WorkloadKind::kFile
/// and ignored otherwise. Only the replay loop is timed; materialized
/// workloads are generated before the clock starts.
TrialResult run_trial(const RunConfig& config, std::uint64_t index,
                      std::span<const WorkloadOp> file_ops);

/// Runs every trial on `config.workers` threads. Results are in trial order.
std::vector<TrialResult> run_trials(const RunConfig& config, std::span<const WorkloadOp> file_ops);

/// Runs job(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::uint64_t count, unsigned workers,
                  const std::function<void(std::uint64_t)>& job);

/// Worker count from LUATABLE_WORKERS, else the hardware concurrency.
/// Throws ConfigError when the variable is set but not a positive integer.
unsigned workers_from_env();

/// Mean rehash count per produced hash size; sizes absent in a trial count 0.
std::map<std::size_t, double> mean_rehash_count_by_size(std::span<const TrialResult> results);

/// Deterministic aggregate (no timings).
nlohmann::ordered_json summary_document(const RunConfig& config,
                                        std::span<const TrialResult> results);
nlohmann::ordered_json timing_document(std::span<const TrialResult> results);
nlohmann::ordered_json manifest_document(std::string_view command, const RunConfig& config,
                                         const std::vector<std::string>& outputs);

/// size,log2_size,mean_rehash_count
std::string rehash_by_size_csv(std::span<const TrialResult> results);
/// trial,T,seconds,us_per_op
std::string timing_csv(std::span<const TrialResult> results);

/// Diagnostic state dump: hash slots, last_free, salt, array cells, metrics.
nlohmann::ordered_json state_dump(const HybridTable& table);

}  // namespace luatable::cli
