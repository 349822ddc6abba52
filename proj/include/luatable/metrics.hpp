#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace luatable {

/// One rehash. The slot census describes the old hash part just before the
/// rebuild, so used_before + deleted_before + free_before == old_capacity.
struct RehashEvent {
  std::uint64_t t = 0;  ///< op clock of the triggering operation
  std::size_t old_capacity = 0;
  std::size_t new_capacity = 0;
  std::size_t old_array = 0;
  std::size_t new_array = 0;
  std::size_t used_before = 0;
  std::size_t deleted_before = 0;
  std::size_t free_before = 0;
  std::size_t reinserted = 0;  ///< insertion calls charged to this rehash
  bool array_grew = false;
  // Not part of the CSV export.
  std::size_t used_after = 0;          ///< elements placed in the new hash part
  std::uint64_t new_key_calls = 0;     ///< cumulative new_key invocations at trigger

  std::size_t free_after() const { return new_capacity - used_after; }
};

/// Monotone counters plus the ordered rehash log of one table.
class MetricsLog {
 public:
  void tick() { ++op_clock_; }
  std::uint64_t op_clock() const { return op_clock_; }

  void count_new_key() {
    ++new_key_calls_;
    ++insertion_calls_;
  }
  void count_search(std::size_t probes, bool found) {
    if (found) {
      success_probes_ += probes;
      ++success_searches_;
    } else {
      fail_probes_ += probes;
      ++fail_searches_;
    }
  }
  void count_relocation_probes(std::size_t probes) { relocation_probes_ += probes; }
  void record_rehash(const RehashEvent& e) {
    insertion_calls_ += e.reinserted;
    events_.push_back(e);
  }

  std::uint64_t insertion_calls() const { return insertion_calls_; }
  std::uint64_t new_key_calls() const { return new_key_calls_; }
  std::uint64_t success_probes() const { return success_probes_; }
  std::uint64_t success_searches() const { return success_searches_; }
  std::uint64_t fail_probes() const { return fail_probes_; }
  std::uint64_t fail_searches() const { return fail_searches_; }
  std::uint64_t relocation_probes() const { return relocation_probes_; }
  const std::vector<RehashEvent>& rehash_events() const { return events_; }

 private:
  std::uint64_t op_clock_ = 0;
  std::uint64_t insertion_calls_ = 0;
  std::uint64_t new_key_calls_ = 0;
  std::uint64_t success_probes_ = 0;
  std::uint64_t success_searches_ = 0;
  std::uint64_t fail_probes_ = 0;
  std::uint64_t fail_searches_ = 0;
  std::uint64_t relocation_probes_ = 0;
  std::vector<RehashEvent> events_;
};

/// Sum of the new hash capacities over all rehashes.
std::uint64_t cost_C(const MetricsLog& log);

/// Histogram new hash capacity -> number of rehashes producing it.
std::map<std::size_t, std::size_t> rehash_count_by_size(const MetricsLog& log);

/// deleted_before / old_capacity for every event (0 when old_capacity is 0).
std::vector<std::pair<RehashEvent, double>> deleted_fraction_before_rehash(const MetricsLog& log);

struct ProbeAverages {
  std::optional<double> successful;
  std::optional<double> unsuccessful;
};

/// Mean probes per successful / unsuccessful search; absent without samples.
ProbeAverages probe_averages(const MetricsLog& log);

/// Column header of the rehash-event CSV.
inline constexpr const char* kRehashCsvHeader =
    "t,old_M,new_M,old_A,new_A,used_before,deleted_before,free_before,reinserted,array_grew";

void write_rehash_csv(std::ostream& out, const MetricsLog& log);
std::string rehash_csv(const MetricsLog& log);

/// Counter summary as a JSON document (pretty-printed, stable key order).
std::string summary_json(const MetricsLog& log);

}  // namespace luatable
