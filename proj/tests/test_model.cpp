#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "mapind/errors.hpp"
#include "mapind/inference.hpp"
#include "mapind/model.hpp"
#include "support.hpp"

using namespace mapind;
using mapind::testing::binary_network;
using mapind::testing::chain;
using mapind::testing::fixture;

namespace {

bool has_kind(const ValidationReport& r, Violation::Kind k) {
  return std::any_of(r.begin(), r.end(), [k](const Violation& v) { return v.kind == k; });
}

}  // namespace

TEST(Validate, FixturesAreClean) {
  for (const char* name : {"fig1a", "fig1b", "fn_ter"}) {
    EXPECT_TRUE(validate_network(fixture(name)).empty()) << name;
  }
}

TEST(Validate, TwoCycle) {
  const Network net = binary_network({{"A", {"B"}, {{0.5, 0.5}, {0.5, 0.5}}},
                                      {"B", {"A"}, {{0.5, 0.5}, {0.5, 0.5}}}});
  const auto report = validate_network(net);
  EXPECT_TRUE(has_kind(report, Violation::Kind::kCycle));
  EXPECT_THROW(net.require_valid(), NetworkError);
  EXPECT_THROW(topological_order(net), NetworkError);
}

TEST(Validate, RowSumDeviation) {
  const Network net = binary_network({{"A", {}, {{0.5, 0.4}}}});
  const auto report = validate_network(net);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].kind, Violation::Kind::kRowSum);
  EXPECT_NEAR(report[0].deviation, 0.1, 1e-12);
  EXPECT_EQ(report[0].location, "cpt[A].row[0]");
}

TEST(Validate, RowSumWithinTolerance) {
  const Network net = binary_network({{"A", {}, {{0.5, 0.5 + 1e-12}}}});
  EXPECT_TRUE(validate_network(net).empty());
}

TEST(Validate, StructuralViolations) {
  {
    const Network net("n", {{"A", {"T"}}}, {{"A", {}, {{1.0}}}});
    EXPECT_TRUE(has_kind(validate_network(net), Violation::Kind::kTooFewStates));
  }
  {
    const Network net("n", {{"A", {"T", "T"}}}, {{"A", {}, {{0.5, 0.5}}}});
    EXPECT_TRUE(has_kind(validate_network(net), Violation::Kind::kDuplicateState));
  }
  {
    const Network net("n", {{"A", {"T", "F"}}, {"A", {"T", "F"}}}, {{"A", {}, {{0.5, 0.5}}}});
    EXPECT_TRUE(has_kind(validate_network(net), Violation::Kind::kDuplicateVariable));
  }
  {
    const Network net("n", {{"A", {"T", "F"}}, {"B", {"T", "F"}}}, {{"A", {}, {{0.5, 0.5}}}});
    EXPECT_TRUE(has_kind(validate_network(net), Violation::Kind::kMissingCpt));
  }
  {
    const Network net = binary_network({{"A", {"Z"}, {{0.5, 0.5}, {0.5, 0.5}}}});
    EXPECT_TRUE(has_kind(validate_network(net), Violation::Kind::kUnknownParent));
  }
  {
    // Rows laid out for one parent while two are declared.
    const Network net = binary_network({{"A", {}, {{0.5, 0.5}}},
                                        {"B", {}, {{0.5, 0.5}}},
                                        {"C", {"A", "B"}, {{0.5, 0.5}, {0.5, 0.5}}}});
    EXPECT_TRUE(has_kind(validate_network(net), Violation::Kind::kRowCountMismatch));
  }
  {
    const Network net = binary_network({{"A", {}, {{0.5, 0.25, 0.25}}}});
    EXPECT_TRUE(has_kind(validate_network(net), Violation::Kind::kColumnCountMismatch));
  }
  {
    const Network net = binary_network({{"A", {}, {{1.5, -0.5}}}});
    EXPECT_TRUE(has_kind(validate_network(net), Violation::Kind::kEntryOutOfRange));
  }
}

TEST(Topological, Examples) {
  EXPECT_EQ(topological_order(chain(3)), (std::vector<std::string>{"X0", "X1", "X2"}));
  EXPECT_EQ(topological_order(fixture("fig1b")), (std::vector<std::string>{"B", "C", "E", "A"}));
  EXPECT_EQ(topological_order(binary_network({{"Solo", {}, {{0.5, 0.5}}}})),
            (std::vector<std::string>{"Solo"}));
}

TEST(Topological, ChildDeclaredFirst) {
  const Network net = binary_network({{"Y", {"X"}, {{0.5, 0.5}, {0.5, 0.5}}}, {"X", {}, {{0.5, 0.5}}}});
  EXPECT_EQ(topological_order(net), (std::vector<std::string>{"X", "Y"}));
}

TEST(Topological, RandomNetworksRespectEdges) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Network base = random_network(rng, {12, 3, 2, 3});
    // Reverse declaration order so the answer is not the identity.
    std::vector<Variable> vars(base.variables().rbegin(), base.variables().rend());
    std::vector<Cpt> cpts(base.cpts().rbegin(), base.cpts().rend());
    const Network net("r", vars, cpts);
    const auto order = topological_order(net);
    ASSERT_EQ(order.size(), net.size());
    EXPECT_EQ(std::set<std::string>(order.begin(), order.end()).size(), net.size());
    std::vector<std::size_t> pos(net.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[net.id(order[i])] = i;
    for (VarId v = 0; v < net.size(); ++v)
      for (VarId p : net.parents(v)) EXPECT_LT(pos[p], pos[v]);
  }
}

TEST(DSeparation, PaperExamples) {
  const Network a = fixture("fig1a");
  const std::vector<std::string> c{"C"};
  EXPECT_TRUE(d_separated(a, std::vector<std::string>{"D"}, std::vector<std::string>{"A"}, c));
  EXPECT_FALSE(d_separated(a, std::vector<std::string>{"B"}, std::vector<std::string>{"A"}, c));
}

TEST(DSeparation, Collider) {
  const Network net = binary_network({{"C1", {}, {{0.5, 0.5}}},
                                      {"C2", {}, {{0.5, 0.5}}},
                                      {"M", {"C1", "C2"}, {{0.9, 0.1}, {0.5, 0.5}, {0.5, 0.5}, {0.1, 0.9}}}});
  const std::vector<std::string> x{"C1"}, y{"C2"}, none, m{"M"};
  EXPECT_TRUE(d_separated(net, x, y, none));
  EXPECT_FALSE(d_separated(net, x, y, m));
}

TEST(DSeparation, DescendantOfColliderOpensPath) {
  const Network net = binary_network({{"C1", {}, {{0.5, 0.5}}},
                                      {"C2", {}, {{0.5, 0.5}}},
                                      {"M", {"C1", "C2"}, {{0.9, 0.1}, {0.5, 0.5}, {0.5, 0.5}, {0.1, 0.9}}},
                                      {"W", {"M"}, {{0.7, 0.3}, {0.2, 0.8}}}});
  const std::vector<std::string> x{"C1"}, y{"C2"}, w{"W"};
  EXPECT_FALSE(d_separated(net, x, y, w));
}

TEST(DSeparation, CanonicalStructuresTruthTable) {
  const std::vector<std::vector<double>> two{{0.7, 0.3}, {0.2, 0.8}};
  const std::vector<std::vector<double>> four{{0.9, 0.1}, {0.5, 0.5}, {0.4, 0.6}, {0.1, 0.9}};
  const Network chain3 = binary_network({{"X", {}, {{0.5, 0.5}}}, {"M", {"X"}, two}, {"Y", {"M"}, two}});
  const Network fork = binary_network({{"M", {}, {{0.5, 0.5}}}, {"X", {"M"}, two}, {"Y", {"M"}, two}});
  const Network collider =
      binary_network({{"X", {}, {{0.5, 0.5}}}, {"Y", {}, {{0.5, 0.5}}}, {"M", {"X", "Y"}, four}});
  const std::vector<std::string> x{"X"}, y{"Y"}, none, m{"M"};
  for (const Network* net : {&chain3, &fork}) {
    EXPECT_FALSE(d_separated(*net, x, y, none));
    EXPECT_TRUE(d_separated(*net, x, y, m));
  }
  EXPECT_TRUE(d_separated(collider, x, y, none));
  EXPECT_FALSE(d_separated(collider, x, y, m));
}

TEST(DSeparation, SymmetricOnRandomNetworks) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Network net = random_network(rng, {8, 3, 2, 2});
    std::vector<std::string> names;
    for (const auto& v : net.variables()) names.push_back(v.name);
    std::shuffle(names.begin(), names.end(), rng);
    const std::vector<std::string> x{names[0]}, y{names[1], names[2]}, z{names[3], names[4]};
    EXPECT_EQ(d_separated(net, x, y, z), d_separated(net, y, x, z));
  }
}

TEST(DSeparation, Errors) {
  const Network net = fixture("fig1a");
  const std::vector<std::string> a{"A"}, b{"B"}, bogus{"Nope"};
  EXPECT_THROW(d_separated(net, a, bogus, {}), QueryError);
  EXPECT_THROW(d_separated(net, a, a, b), QueryError);
}

TEST(Enumerate, Examples) {
  const Network net = binary_network({{"X", {}, {{0.5, 0.5}}}, {"Y", {}, {{0.5, 0.5}}}});
  const std::vector<std::string> one{"X"}, both{"X", "Y"}, none;
  const auto e1 = enumerate_assignments(net, one);
  ASSERT_EQ(e1.size(), 2u);
  EXPECT_EQ(e1[0].at("X"), "T");
  const auto e2 = enumerate_assignments(net, both);
  const std::vector<Assignment> expected{
      {{"X", "T"}, {"Y", "T"}}, {{"X", "T"}, {"Y", "F"}}, {{"X", "F"}, {"Y", "T"}}, {{"X", "F"}, {"Y", "F"}}};
  EXPECT_EQ(e2, expected);
  const auto e0 = enumerate_assignments(net, none);
  ASSERT_EQ(e0.size(), 1u);
  EXPECT_TRUE(e0[0].empty());
}

TEST(Enumerate, RanksReconstruct) {
  for (std::size_t k = 0; k <= 10; ++k) {
    AssignmentOdometer odo(std::vector<std::size_t>(k, 2));
    EXPECT_EQ(odo.count(), std::uint64_t{1} << k);
    std::set<std::vector<int>> seen;
    std::uint64_t rank = 0;
    for (; !odo.done(); odo.next(), ++rank) {
      std::uint64_t concat = 0;
      for (int bit : odo.current()) concat = concat * 2 + static_cast<std::uint64_t>(bit);
      EXPECT_EQ(concat, rank);
      EXPECT_EQ(odo.rank(odo.current()), rank);
      EXPECT_EQ(odo.at(rank), odo.current());
      seen.insert(odo.current());
    }
    EXPECT_EQ(seen.size(), std::size_t{1} << k);
  }
}

TEST(Enumerate, MixedCardinalities) {
  AssignmentOdometer odo({3, 2});
  std::vector<std::vector<int>> got;
  for (; !odo.done(); odo.next()) got.push_back(odo.current());
  EXPECT_EQ(got, (std::vector<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}, {2, 1}}));
}

TEST(Stats, Examples) {
  const auto single = network_stats(binary_network({{"A", {}, {{0.5, 0.5}}}}));
  EXPECT_EQ(single.max_cardinality, 2u);
  EXPECT_EQ(single.treewidth_upper_bound, 0u);
  const auto b = network_stats(fixture("fig1b"));
  EXPECT_EQ(b.treewidth_upper_bound, 3u);
  EXPECT_EQ(b.variable_count, 4u);
  const auto c = network_stats(chain(5));
  EXPECT_EQ(c.max_cardinality, 2u);
  EXPECT_EQ(c.treewidth_upper_bound, 1u);
  EXPECT_EQ(network_stats(fixture("fn_ter")).max_cardinality, 3u);
}

TEST(Partition, Validation) {
  const Network net = fixture("fig1b");
  EXPECT_NO_THROW(validate_partition(net, {{{"C", "T"}}, {"A"}, {"B"}}));
  EXPECT_NO_THROW(validate_partition(net, {{{"C", "T"}}, {"A"}, {}}));
  EXPECT_THROW(validate_partition(net, {{{"C", "T"}}, {}, {"B"}}), QueryError);
  EXPECT_THROW(validate_partition(net, {{{"C", "T"}}, {"A"}, {"C"}}), QueryError);
  EXPECT_THROW(validate_partition(net, {{{"C", "T"}}, {"A"}, {"Q"}}), QueryError);
  EXPECT_THROW(validate_partition(net, {{{"C", "maybe"}}, {"A"}, {"B"}}), QueryError);
  EXPECT_THROW(validate_partition(net, {{}, {"A", "A"}, {}}), QueryError);
}

// A network is accepted exactly when its chain-rule joint is a distribution.
TEST(Validate, AcceptanceMatchesJointSum) {
  std::mt19937_64 rng(17);
  std::bernoulli_distribution sign(0.5);
  for (int trial = 0; trial < 60; ++trial) {
    Network good = random_network(rng, {static_cast<std::size_t>(3 + trial % 10), 3, 2, 2});
    std::vector<Cpt> cpts = good.cpts();
    const bool corrupt = trial % 2 == 1;
    if (corrupt) {
      // Shift one entry of every CPT's first row; a compensating shift is
      // essentially impossible.
      for (auto& c : cpts) c.rows[0][1] += sign(rng) ? 0.03 : -0.03;
    }
    const Network net("r", good.variables(), cpts);
    double total = 0.0;
    std::vector<std::size_t> cards(net.size(), 2);
    for (AssignmentOdometer it(cards); !it.done(); it.next()) {
      double p = 1.0;
      StateVector s(it.current().begin(), it.current().end());
      // Raw rows: an invalid network exposes no tables. The structure is
      // the same as `good`'s.
      for (VarId v = 0; v < net.size(); ++v) {
        std::size_t row = 0;
        for (VarId par : good.parents(v)) row = row * 2 + static_cast<std::size_t>(s[par]);
        p *= cpts[v].rows[row][static_cast<std::size_t>(s[v])];
      }
      total += p;
    }
    EXPECT_EQ(validate_network(net).empty(), std::abs(total - 1.0) <= 1e-6) << "trial " << trial;
  }
}
