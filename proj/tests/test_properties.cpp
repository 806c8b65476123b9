#include <gtest/gtest.h>

#include "property_checks.hpp"

using namespace mapind::testing;

namespace {

void expect(const PropertyResult& r, std::size_t min_cases) {
  EXPECT_GE(r.cases, min_cases);
  EXPECT_EQ(r.failures, 0u) << "first failure: " << r.first_failure;
}

}  // namespace

TEST(Properties, VariableEliminationMatchesEnumeration) { expect(check_marginal_oracle(101, 200), 1000); }

TEST(Properties, NormalizationAndMapExhaustiveness) { expect(check_normalization_and_map(102, 200), 200); }

TEST(Properties, ArgmaxInvariance) { expect(check_argmax_invariance(103, 150), 150); }

TEST(Properties, StrongMatchesDefinition) { expect(check_strong_definition(104, 150), 150); }

TEST(Properties, StrongImpliesWeak) { expect(check_strong_implies_weak(105, 100), 100); }

TEST(Properties, SingletonCollapse) { expect(check_singleton_collapse(106, 150), 150); }

TEST(Properties, DownwardClosure) { expect(check_downward_closure(107, 100), 100); }

TEST(Properties, DSeparationSufficiency) { expect(check_dseparation(108, 100), 100); }

TEST(Properties, QuantificationConsistency) { expect(check_quantification(109, 150), 150); }

TEST(Properties, CompilerSoundness) { expect(check_compiler_soundness(110, 150), 150); }

TEST(Properties, ReductionFaithfulness) {
  std::size_t yes = 0;
  expect(check_reduction(111, 150, &yes), 150);
  // Both answers must actually occur for the comparison to mean anything.
  EXPECT_GT(yes, 0u);
  EXPECT_LT(yes, 150u);
}
