#include "oml/analysis.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace oml;
using oml::testing::Q;

namespace {

std::vector<Rational> R(std::initializer_list<const char*> xs) {
  std::vector<Rational> out;
  for (const char* x : xs) out.push_back(Q(x));
  return out;
}

}  // namespace

TEST(DeterministicBound, Examples) {
  EXPECT_EQ(ratio_bound_deterministic(R({"2", "2", "2"})), Q("10/7"));
  EXPECT_EQ(ratio_bound_deterministic(R({"1", "0", "0"})), Q("2"));
  EXPECT_THROW(ratio_bound_deterministic(R({"0", "0"})), std::invalid_argument);
}

TEST(DeterministicBound, ConstantLedgerApproachesKMinusTwo) {
  const std::vector<Rational> x(60, Q("5"));
  EXPECT_LT(abs_diff(ratio_bound_deterministic(x), Q("58")), Q("1/1000000"));
}

TEST(SymmetricRatio, SmallDepths) {
  EXPECT_EQ(theorem1_ratio(1), Q("1"));
  EXPECT_EQ(theorem1_ratio(2), Q("5/3"));
  EXPECT_EQ(theorem1_ratio(3), Q("17/7"));
}

TEST(SymmetricRatio, ExactFormEqualsLevelSum) {
  for (int k = 1; k <= 30; ++k) {
    Rational alg(0), opt(0);
    for (int i = 1; i <= k; ++i) {
      alg += pow2(k - i) * (pow2(i) - 1);
      opt += pow2(k - i);
    }
    ASSERT_EQ(theorem1_ratio(k), alg / opt) << k;
    ASSERT_EQ(theorem1_ratio(k), Rational(k - 1) + Rational(k) / (pow2(k) - 1)) << k;
  }
}

TEST(AlgCost, DoubleSumAndClosedForms) {
  EXPECT_EQ(cost_formula_alg(R({"7"})).double_sum, Q("7"));
  const AlgCostForms two = cost_formula_alg(R({"3", "5"}));
  EXPECT_EQ(two.double_sum, Q("17"));       // 4 x1 + x2
  EXPECT_EQ(two.printed_closed, Q("23"));   // 6 x1 + x2
  EXPECT_EQ(two.regrouped_closed, two.double_sum);
}

TEST(AlgCost, RegroupedFormAlwaysAgrees) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 200; ++t) {
    std::vector<Rational> x;
    for (std::size_t i = 0, k = 1 + rng() % 10; i < k; ++i) x.push_back(oml::testing::random_point(rng));
    const AlgCostForms f = cost_formula_alg(x);
    ASSERT_EQ(f.regrouped_closed, f.double_sum);
  }
}

TEST(OptCost, Examples) {
  EXPECT_EQ(cost_formula_opt(R({"2"})).value, Q("2"));
  EXPECT_EQ(cost_formula_opt(R({"2", "2"})).value, Q("6"));
  EXPECT_EQ(cost_formula_opt(R({"2", "2"}), Q("1/8")).eps_term, Q("3/8"));
}

TEST(Prop1, PrefixMaximum) {
  EXPECT_TRUE(check_prop1(R({"1", "2", "4", "8"})));
  EXPECT_FALSE(check_prop1(R({"1", "3"})));
  EXPECT_TRUE(check_prop1(R({"1", "2", "1", "4"})));
  EXPECT_THROW(check_prop1(R({"0", "1"})), std::invalid_argument);
}

TEST(PrefixMass, Examples) {
  EXPECT_EQ(prefix_mass_ratio(R({"1", "2", "4"}), 1), Q("1/3"));
  EXPECT_EQ(prefix_mass_ratio(R({"1", "2", "4"}), 2), Q("2/3"));
  EXPECT_EQ(prefix_mass_ratio(R({"3", "3", "3"}), 3), Q("1"));
  EXPECT_THROW(prefix_mass_ratio(R({"1"}), 2), std::invalid_argument);
}

TEST(PrefixMass, LemmaHoldsOnRandomLedgers) {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t k = 1 + rng() % 12;
    std::vector<Rational> x{make_rational(1 + static_cast<long>(rng() % 8), 1 + static_cast<long>(rng() % 4))};
    Rational best = x[0];
    for (std::size_t i = 1; i < k; ++i) {
      x.push_back(2 * best * make_rational(static_cast<long>(rng() % 65), 64));
      if (x.back() > best) best = x.back();
    }
    ASSERT_TRUE(check_prop1(x));
    for (std::size_t m = 1; m <= k; ++m) {
      ASSERT_GE(prefix_mass_ratio(x, m), make_rational(static_cast<long>(m), static_cast<long>(k)));
    }
  }
}

TEST(IndexMeans, Examples) {
  EXPECT_EQ(geometric_index_mean(Q("2"), 2), Q("5/3"));
  EXPECT_EQ(weighted_index_mean(R({"1", "2", "4"})), geometric_index_mean(Q("2"), 3));
  EXPECT_LT(abs_diff(geometric_index_mean(Q("2"), 60), Q("59")), Q("1/100"));
}

TEST(Prop2, GrowthConditionEnforced) {
  EXPECT_THROW(prop2_bound(R({"1", "2"}), Q("1")), std::invalid_argument);
  EXPECT_NO_THROW(prop2_bound(R({"1", "3"}), Q("1")));
}

TEST(Prop2, TriplingLedgerValue) {
  // y_i = x_i 2^-i grows by 3/2, so the weighted index mean is about k - 2
  // and the bound tends to 2(k+1) - 2(k-2) = 6.
  std::vector<Rational> x;
  for (int i = 1; i <= 40; ++i) x.push_back(pow_int(Q("3"), static_cast<unsigned>(i)));
  EXPECT_LT(abs_diff(prop2_bound(x, Q("1")), Q("6")), Q("1/1000"));
}

TEST(RandomizedBound, Examples) {
  EXPECT_EQ(ratio_bound_randomized(R({"2", "2", "0"})), Q("5/24"));
  EXPECT_EQ(ratio_bound_randomized(R({"2", "0"})), Q("1/8"));
  EXPECT_THROW(ratio_bound_randomized(R({"2", "2"})), std::invalid_argument);
}

TEST(RandomizedBound, GrowsLinearlyForConstantLedgers) {
  auto value = [](int k) {
    std::vector<Rational> x(static_cast<std::size_t>(k), Q("2"));
    x.back() = 0;
    return ratio_bound_randomized(x);
  };
  for (int k = 10; k <= 40; k += 10) {
    EXPECT_GT(value(k), value(k - 2));
    EXPECT_LT(abs_diff(value(k), make_rational(k - 2, 8)), Q("1/100"));
  }
}

TEST(HarmonicDistribution, BaseCases) {
  const auto one = harmonic_free_server_distribution(1).distribution;
  EXPECT_EQ(one.mass, (std::map<Rational, Rational>{{Q("2"), Q("1/2")}, {Q("4"), Q("1/2")}}));
  const auto two = harmonic_free_server_distribution(2).distribution;
  EXPECT_EQ(two.mass, (std::map<Rational, Rational>{
                          {Q("2"), Q("5/16")}, {Q("4"), Q("3/16")}, {Q("6"), Q("3/16")}, {Q("8"), Q("5/16")}}));
  EXPECT_EQ(two.center, Q("5"));
}

TEST(HarmonicDistribution, SymmetricWithUnitMass) {
  for (int k = 1; k <= 6; ++k) {
    const auto d = harmonic_free_server_distribution(k).distribution;
    EXPECT_EQ(d.total(), Q("1")) << k;
    EXPECT_TRUE(std::holds_alternative<ExactlySymmetric>(check_symmetric_distribution(d))) << k;
  }
}

TEST(HarmonicDistribution, BudgetEnforced) {
  EXPECT_THROW(harmonic_free_server_distribution(11), std::invalid_argument);
}

TEST(HarmonicDistribution, ExpectedCostMatchesEnumeration) {
  // k = 1: both servers are at distance 1.
  EXPECT_EQ(harmonic_free_server_distribution(1).expected_cost, Q("1"));
  // k = 2: two level-1 requests cost 1 each; the top request at 5 sees the
  // free pair (x, y) with d_L = 5 - x, d_R = y - 5, and pays 2 d_L d_R / (d_L + d_R).
  Rational top(0);
  for (int x : {2, 4}) {
    for (int y : {6, 8}) {
      const Rational dl(5 - x), dr(y - 5);
      top += Q("1/4") * 2 * dl * dr / (dl + dr);
    }
  }
  EXPECT_EQ(harmonic_free_server_distribution(2).expected_cost, 2 + top);
}

TEST(SymmetryCheck, OffCenterPointHasUnitDistance) {
  FreeServerDistribution d;
  d.mass[Q("1")] = 1;
  d.center = Q("3");
  const auto v = check_symmetric_distribution(d);
  ASSERT_TRUE(std::holds_alternative<TVDistance>(v));
  EXPECT_EQ(std::get<TVDistance>(v).value, Q("1"));
  EXPECT_DOUBLE_EQ(empirical_symmetry_tv({{Q("1"), 1.0}}, Q("3")), 1.0);
}

TEST(BoundReport, JsonCarriesExactValue) {
  const BoundReport r = make_bound_report("deterministic", R({"2", "2", "2"}), 3);
  const nlohmann::json j = r.to_json();
  EXPECT_EQ(j.at("value").get<std::string>(), "10/7");
  EXPECT_EQ(evaluate_formula(j.at("formula").get<std::string>(), r.x, r.k), r.value);
  EXPECT_THROW(make_bound_report("nope", r.x, 3), std::invalid_argument);
}
