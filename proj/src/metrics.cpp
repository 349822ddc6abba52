#include "luatable/metrics.hpp"

#include <sstream>

#include <json.hpp>

namespace luatable {

std::uint64_t cost_C(const MetricsLog& log) {
  std::uint64_t c = 0;
  for (const auto& e : log.rehash_events()) c += e.new_capacity;
  return c;
}

std::map<std::size_t, std::size_t> rehash_count_by_size(const MetricsLog& log) {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& e : log.rehash_events()) ++hist[e.new_capacity];
  return hist;
}

std::vector<std::pair<RehashEvent, double>> deleted_fraction_before_rehash(const MetricsLog& log) {
  std::vector<std::pair<RehashEvent, double>> out;
  out.reserve(log.rehash_events().size());
  for (const auto& e : log.rehash_events()) {
    const double f = e.old_capacity == 0 ? 0.0
                                         : static_cast<double>(e.deleted_before) /
                                               static_cast<double>(e.old_capacity);
    out.emplace_back(e, f);
  }
  return out;
}

ProbeAverages probe_averages(const MetricsLog& log) {
  ProbeAverages avg;
  if (log.success_searches() > 0) {
    avg.successful = static_cast<double>(log.success_probes()) /
                     static_cast<double>(log.success_searches());
  }
  if (log.fail_searches() > 0) {
    avg.unsuccessful =
        static_cast<double>(log.fail_probes()) / static_cast<double>(log.fail_searches());
  }
  return avg;
}

void write_rehash_csv(std::ostream& out, const MetricsLog& log) {
  out << kRehashCsvHeader << '\n';
  for (const auto& e : log.rehash_events()) {
    out << e.t << ',' << e.old_capacity << ',' << e.new_capacity << ',' << e.old_array << ','
        << e.new_array << ',' << e.used_before << ',' << e.deleted_before << ','
        << e.free_before << ',' << e.reinserted << ',' << (e.array_grew ? 1 : 0) << '\n';
  }
}

std::string rehash_csv(const MetricsLog& log) {
  std::ostringstream out;
  write_rehash_csv(out, log);
  return out.str();
}

std::string summary_json(const MetricsLog& log) {
  nlohmann::ordered_json j;
  j["op_clock"] = log.op_clock();
  j["insertion_calls"] = log.insertion_calls();
  j["new_key_calls"] = log.new_key_calls();
  j["search_probes_success"] = log.success_probes();
  j["searches_success"] = log.success_searches();
  j["search_probes_fail"] = log.fail_probes();
  j["searches_fail"] = log.fail_searches();
  j["relocation_probes"] = log.relocation_probes();
  j["rehash_count"] = log.rehash_events().size();
  j["cost_C"] = cost_C(log);
  nlohmann::ordered_json by_size = nlohmann::ordered_json::object();
  for (const auto& [size, count] : rehash_count_by_size(log)) {
    by_size[std::to_string(size)] = count;
  }
  j["rehash_count_by_size"] = std::move(by_size);
  return j.dump(2);
}

}  // namespace luatable
