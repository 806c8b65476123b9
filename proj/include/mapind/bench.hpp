#pragma once

#include <string>
#include <vector>

#include "mapind/documents.hpp"
#include "mapind/independence.hpp"

namespace mapind {

struct BenchRow {
  std::size_t focus_size = 0;
  std::uint64_t assignments = 0;  // |Ω(R)|
  double median_ms = 0;
  std::vector<std::string> focus;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  bool truncated = false;
  std::string note;
};

// Times strong MAP-independence with short-circuiting disabled for
// R = the first 1..r_max intermediate variables in declaration order.
// Rows whose |Ω(R)| would exceed options.max_focus_space are dropped and the
// table is marked truncated.
BenchReport bench(const Network& net, const std::vector<std::string>& hypothesis,
                  const Assignment& evidence, std::size_t r_max, std::size_t trials,
                  IndependenceOptions options = {});

Json bench_to_json(const BenchReport& report);

}  // namespace mapind
