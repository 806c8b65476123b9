#include "mapind/bench.hpp"

#include <algorithm>
#include <chrono>

#include "mapind/errors.hpp"

namespace mapind {

BenchReport bench(const Network& net, const std::vector<std::string>& hypothesis,
                  const Assignment& evidence, std::size_t r_max, std::size_t trials,
                  IndependenceOptions options) {
  net.require_valid();
  if (trials == 0) throw QueryError("trials must be positive");
  if (r_max == 0) throw QueryError("rmax must be positive");
  validate_partition(net, {evidence, hypothesis, {}});

  std::vector<std::string> intermediates;
  for (const auto& v : net.variables()) {
    const bool in_h = std::find(hypothesis.begin(), hypothesis.end(), v.name) != hypothesis.end();
    if (!in_h && !evidence.count(v.name)) intermediates.push_back(v.name);
  }
  if (r_max > intermediates.size()) {
    throw QueryError("rmax " + std::to_string(r_max) + " exceeds the " +
                     std::to_string(intermediates.size()) + " available intermediate variables");
  }

  options.short_circuit = false;
  options.table_limit = 0;
  BenchReport report;
  std::uint64_t space = 1;
  for (std::size_t size = 1; size <= r_max; ++size) {
    space *= net.cardinality(net.id(intermediates[size - 1]));
    if (space > options.max_focus_space) {
      report.truncated = true;
      report.note = "stopped before |R| = " + std::to_string(size) + ": |Ω(R)| = " + std::to_string(space) +
                    " exceeds the guard of " + std::to_string(options.max_focus_space);
      break;
    }
    QueryPartition partition{evidence, hypothesis,
                             {intermediates.begin(), intermediates.begin() + static_cast<std::ptrdiff_t>(size)}};
    std::vector<double> times;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto start = std::chrono::steady_clock::now();
      strong_map_independence(net, partition, options);
      times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    }
    std::sort(times.begin(), times.end());
    const std::size_t mid = times.size() / 2;
    const double median = times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
    report.rows.push_back({size, space, median, partition.focus});
  }
  return report;
}

Json bench_to_json(const BenchReport& report) {
  Json out;
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json jr;
    jr["focus_size"] = r.focus_size;
    jr["assignments"] = r.assignments;
    jr["median_ms"] = r.median_ms;
    jr["focus"] = r.focus;
    rows.push_back(std::move(jr));
  }
  out["rows"] = std::move(rows);
  out["truncated"] = report.truncated;
  out["note"] = report.note;
  return out;
}

}  // namespace mapind
