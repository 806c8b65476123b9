#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "mapind/documents.hpp"
#include "mapind/errors.hpp"
#include "support.hpp"

using namespace mapind;
using mapind::testing::fixture;
using mapind::testing::fixture_path;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mapind_documents_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(NetworkDocument, LoadsFixture) {
  const Network b = fixture("fig1b");
  EXPECT_EQ(b.size(), 4u);
  EXPECT_EQ(b.variable(b.id("A")).states, (std::vector<std::string>{"T", "F"}));
  EXPECT_EQ(b.cpts()[b.id("A")].parents, (std::vector<std::string>{"C", "B", "E"}));
}

TEST(NetworkDocument, RoundTripIsExact) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 30; ++i) {
    const Network net = random_network(rng, {9, 3, 2, 4});
    const auto path = scratch("rt.json");
    save_network(net, path);
    const Network back = load_network(path);
    ASSERT_EQ(back.size(), net.size());
    for (VarId v = 0; v < net.size(); ++v) {
      EXPECT_EQ(back.variable(v).name, net.variable(v).name);
      EXPECT_EQ(back.variable(v).states, net.variable(v).states);
      const auto a = net.table(v);
      const auto b = back.table(v);
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
    }
    // Saving again reproduces the same bytes.
    const auto again = scratch("rt2.json");
    save_network(back, again);
    EXPECT_EQ(slurp(path), slurp(again));
  }
}

TEST(NetworkDocument, TruncatedFileIsParseError) {
  const std::string text = slurp(fixture_path("fig1b"));
  const auto path = scratch("truncated.json");
  write_text_file(path, text.substr(0, text.size() / 2));
  EXPECT_THROW(load_network(path), ParseError);
  EXPECT_THROW(load_network(scratch("does_not_exist.json")), ParseError);
}

TEST(NetworkDocument, StructuralErrors) {
  EXPECT_THROW(network_from_json(Json::parse(R"([1, 2])")), ParseError);
  EXPECT_THROW(network_from_json(Json::parse(R"({"name": "x", "variables": []})")), ParseError);
  EXPECT_THROW(network_from_json(Json::parse(
                   R"({"name": "x", "variables": [{"name": "A", "states": ["T", 3]}], "cpts": []})")),
               ParseError);
  EXPECT_THROW(network_from_json(Json::parse(
                   R"({"name": "x", "variables": [{"name": "A", "states": ["T", "F"]}],
                       "cpts": [{"variable": "A", "parents": [], "table": [["0.5", 0.5]]}]})")),
               ParseError);
}

TEST(NetworkDocument, RowCountMismatchIsNetworkError) {
  // Rows flattened wrong: two rows for a child with one binary parent is
  // correct; three is not.
  const auto path = scratch("rows.json");
  write_text_file(path, R"({"name": "bad",
    "variables": [{"name": "P", "states": ["T", "F"]}, {"name": "C", "states": ["T", "F"]}],
    "cpts": [{"variable": "P", "parents": [], "table": [[0.5, 0.5]]},
             {"variable": "C", "parents": ["P"], "table": [[0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]}]})");
  EXPECT_THROW(load_network(path), NetworkError);
  const Network net = network_from_json(read_json_file(path));
  ASSERT_FALSE(net.valid());
  EXPECT_EQ(net.violations()[0].kind, Violation::Kind::kRowCountMismatch);
}

TEST(DumpJson, SeventeenDigits) {
  Json j;
  j["x"] = 0.1;
  j["y"] = 1.0;
  j["z"] = std::vector<double>{0.25, 1.0 / 3.0};
  j["n"] = 7;
  const std::string text = dump_json(j);
  EXPECT_NE(text.find("0.10000000000000001"), std::string::npos) << text;
  EXPECT_NE(text.find("0.33333333333333331"), std::string::npos) << text;
  EXPECT_NE(text.find("\"n\": 7"), std::string::npos) << text;
  EXPECT_EQ(Json::parse(text)["x"].get<double>(), 0.1);
}

TEST(QueryDocument, ParsesEveryMode) {
  const auto strong = query_from_json(Json::parse(
      R"({"mode": "strong", "hypothesis": ["A"], "evidence": {"C": "T"}, "focus": ["B", "E"]})"));
  EXPECT_EQ(strong.mode, QueryMode::kStrong);
  EXPECT_EQ(strong.evidence, (Assignment{{"C", "T"}}));

  const auto th = query_from_json(
      Json::parse(R"({"mode": "threshold", "h_star": {"H": "h1"}, "focus": ["R"], "s": "3/16"})"));
  EXPECT_EQ(*th.s, Rational(3, 16));
  EXPECT_FALSE(th.s_number);
  EXPECT_EQ(th.hypothesis, (std::vector<std::string>{"H"}));

  const auto thn = query_from_json(
      Json::parse(R"({"mode": "threshold", "h_star": {"H": "h1"}, "focus": ["R"], "s": 0.22})"));
  EXPECT_EQ(*thn.s_number, 0.22);
  EXPECT_EQ(*thn.s, Rational::from_double(0.22));

  const auto mx = query_from_json(
      Json::parse(R"({"mode": "maximum", "hypothesis": ["A"], "focus": ["B", "E"], "k": 2})"));
  EXPECT_EQ(*mx.k, 2u);

  const auto part =
      query_from_json(Json::parse(R"({"mode": "partition", "hypothesis": ["A"], "candidates": []})"));
  EXPECT_TRUE(part.candidates.empty());
}

TEST(QueryDocument, Rejections) {
  auto bad = [](const char* text) { return query_from_json(Json::parse(text)); };
  EXPECT_THROW(bad(R"({"hypothesis": ["A"]})"), ParseError);
  EXPECT_THROW(bad(R"({"mode": "sideways", "hypothesis": ["A"]})"), ParseError);
  EXPECT_THROW(bad(R"({"mode": "strong", "hypothesis": ["A"]})"), ParseError);
  EXPECT_THROW(bad(R"({"mode": "maximum", "hypothesis": ["A"], "focus": ["B"]})"), ParseError);
  EXPECT_THROW(bad(R"({"mode": "maximum", "hypothesis": ["A"], "focus": ["B"], "k": 0})"), ParseError);
  EXPECT_THROW(bad(R"({"mode": "threshold", "h_star": {"H": "h1"}, "focus": ["R"]})"), ParseError);
  EXPECT_THROW(bad(R"({"mode": "threshold", "h_star": {"H": "h1"}, "focus": ["R"], "s": "0.125"})"), ParseError);
  EXPECT_THROW(bad(R"({"mode": "threshold", "h_star": {"H": "h1"}, "focus": ["R"], "s": 1})"), ParseError);
  EXPECT_THROW(bad(R"({"mode": "threshold", "h_star": {"H": "h1"}, "focus": ["R"], "s": "-1/8"})"), ParseError);
  EXPECT_THROW(bad(R"({"mode": "partition", "hypothesis": ["A"]})"), ParseError);
  EXPECT_THROW(bad(R"({"mode": "strong", "hypothesis": "A", "focus": ["B"]})"), ParseError);
}

TEST(QueryDocument, RoundTrip) {
  const auto q = query_from_json(Json::parse(
      R"({"mode": "threshold", "hypothesis": ["H"], "h_star": {"H": "h1"}, "focus": ["R"], "s": "1/8"})"));
  const auto back = query_from_json(query_to_json(q));
  EXPECT_EQ(back.mode, q.mode);
  EXPECT_EQ(back.h_star, q.h_star);
  EXPECT_EQ(back.s, q.s);
  EXPECT_EQ(back.focus, q.focus);
}

TEST(Report, KeyOrderAndAssignmentOrder) {
  const Network b = fixture("fig1b");
  QueryDocument q;
  q.hypothesis = {"A"};
  q.evidence = {{"C", "T"}};
  q.focus = {"B", "E"};
  const auto r = strong_map_independence(b, {q.evidence, q.hypothesis, q.focus});
  const Json report = make_report(b, q, independence_to_json(b, r), 1.5);
  std::vector<std::string> keys;
  for (auto it = report.begin(); it != report.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"tool", "version", "network", "query", "result", "elapsed_ms"}));
  EXPECT_EQ(report["result"]["verdict"], false);
  // Declaration order B, E even if the assignment map sorts otherwise.
  const Json ce = report["result"]["counterexample"];
  std::vector<std::string> ce_keys;
  for (auto it = ce.begin(); it != ce.end(); ++it) ce_keys.push_back(it.key());
  EXPECT_EQ(ce_keys, (std::vector<std::string>{"B", "E"}));
  EXPECT_EQ(assignment_to_json(b, {{"E", "T"}, {"A", "F"}}).dump(), R"({"A":"F","E":"T"})");
}
