#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mapind/independence.hpp"
#include "mapind/inference.hpp"
#include "mapind/model.hpp"
#include "mapind/rational.hpp"

namespace mapind {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

// Serializes with every floating-point number printed to 17 significant
// digits, so doubles survive a text round trip bit-for-bit.
std::string dump_json(const Json& doc, int indent = 2);

// Network document:
//   {"name": ..., "variables": [{"name", "states"}], "cpts": [{"variable",
//    "parents", "table"}]}
// Structural problems (missing keys, wrong types) raise ParseError; network
// invariants are left to Network's own validation.
Network network_from_json(const Json& doc);
Json network_to_json(const Network& net);

// Parse failure -> ParseError; invariant violations -> NetworkError.
Network load_network(const std::filesystem::path& path);
void save_network(const Network& net, const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

enum class QueryMode { kMap, kStrong, kWeak, kMaximum, kThreshold, kQuantify, kPartition };

const char* to_string(QueryMode mode);

struct QueryDocument {
  QueryMode mode = QueryMode::kStrong;
  std::vector<std::string> hypothesis;
  Assignment evidence;
  std::vector<std::string> focus;
  std::optional<std::size_t> k;
  std::optional<Assignment> h_star;
  std::optional<Rational> s;
  // Set when s was given as a JSON number rather than a fraction string.
  std::optional<double> s_number;
  std::vector<std::string> candidates;
};

// Validates the mode-specific required fields; throws ParseError.
QueryDocument query_from_json(const Json& doc);
Json query_to_json(const QueryDocument& query);

// Assignments print in the network's declaration order.
Json assignment_to_json(const Network& net, const Assignment& a);
Json map_result_to_json(const Network& net, const MapResult& result);
Json independence_to_json(const Network& net, const IndependenceReport& report);
Json relevance_to_json(const RelevancePartition& partition);

// {"tool", "version", "network", "query", "result", "elapsed_ms"}; elapsed
// goes last so reports differ only in their final field.
Json make_report(const Network& net, const QueryDocument& query, Json result, double elapsed_ms);

}  // namespace mapind
