#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "kbpow/search.hpp"
#include "oracles.hpp"

using namespace kbpow;

namespace {

bool contains(const std::vector<Solution>& v, const Solution& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

}  // namespace

TEST(SearchK, FamilyInstancesForK5) {
  const auto sols = search_k(5, 20);
  EXPECT_TRUE(contains(sols, Solution{7, 2, 5, 5}));  // 31 + 1 = 32
  EXPECT_TRUE(contains(sols, Solution{9, 5, 7, 5}));  // 120 + 8 = 128
}

TEST(SearchK, TribonacciSolutionsHaveNEqualsTPlusTwo) {
  for (const auto& s : search_k(3, 20)) EXPECT_EQ(s.n, s.t + 2) << s.n << ' ' << s.m;
}

TEST(SearchK, FibonacciKnownSolutions) {
  // F_n + F_m = 2^t for classical Fibonacci, 2 <= m < n <= 60.
  const auto ref = oracle::all_pairs(2, 60);
  const auto sols = search_k(2, 60);
  ASSERT_EQ(sols.size(), ref.size());
  for (const auto& s : sols) EXPECT_TRUE(ref.count({s.n, s.m, s.t}));
}

TEST(SearchK, RejectsBadArguments) {
  EXPECT_THROW(search_k(1, 10), DomainError);
  EXPECT_THROW(search_k(3, 2), DomainError);
}

TEST(SearchK, EverySolutionVerifiesAndNeverMEqualsN) {
  for (int k = 3; k <= 20; ++k) {
    const SeqTable table = generate(k, 300);
    for (const auto& s : search_k(k, 300)) {
      EXPECT_TRUE(verify_solution(table, s));
      EXPECT_LT(s.m, s.n);
      EXPECT_GE(s.m, 2);
    }
  }
}

TEST(MembershipIndex, ExactConfirmation) {
  const SeqTable t = generate(4, 100);
  const MembershipIndex idx(t, 2, 100);
  EXPECT_EQ(idx.find(t[57]), 57);
  EXPECT_FALSE(idx.find(t[57] + 1).has_value());
  EXPECT_FALSE(idx.find(BigInt(0)).has_value());
}

TEST(MixedCase, Condition) {
  EXPECT_TRUE(mixed_case_condition(7, 2, 5, 5));
  EXPECT_FALSE(mixed_case_condition(10, 3, 8, 4));
  EXPECT_FALSE(mixed_case_condition(10, 1, 9, 4));  // negative exponent
}

TEST(Theorem2, CaseChecks) {
  for (int k : {3, 4, 5, 6, 7, 100}) {
    const Theorem2Report r = verify_theorem2_cases(k);
    EXPECT_TRUE(r.ok()) << k;
    EXPECT_TRUE(r.low_block.empty());
    EXPECT_TRUE(r.high_block.empty());
    EXPECT_TRUE(r.identity_hits.empty());
    EXPECT_GT(r.pairs_checked, 0);
  }
  EXPECT_THROW(verify_theorem2_cases(2), DomainError);
}

TEST(Family, Members) {
  auto a = family_member(1, 5);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->solution, (Solution{7, 2, 5, 5}));
  EXPECT_TRUE(a->verified);
  auto b = family_member(2, 5);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->solution, (Solution{9, 5, 7, 5}));
  EXPECT_TRUE(b->verified);
  EXPECT_FALSE(family_member(3, 8).has_value());  // needs k >= 9
  EXPECT_TRUE(family_member(3, 9).has_value());
  EXPECT_THROW(family_member(0, 5), DomainError);
}

TEST(VerifyTheorem1, DeskScale) {
  const SearchReport rep = verify_theorem1(3, 30, 600, 2);
  EXPECT_TRUE(rep.ok());
  EXPECT_TRUE(rep.violations.empty());
  EXPECT_TRUE(rep.mixed_violations.empty());
  EXPECT_TRUE(std::is_sorted(rep.solutions.begin(), rep.solutions.end()));
  const SearchReport serial = verify_theorem1(3, 30, 600, 1);
  EXPECT_EQ(serial.solutions, rep.solutions);
  EXPECT_EQ(serial.probes, rep.probes);
  EXPECT_THROW(verify_theorem1(5, 4, 100), DomainError);
}

// The windowed search matches the all-pairs scan exactly.
TEST(SearchProperty, MatchesAllPairsOracle) {
  for (int k = 3; k <= 8; ++k) {
    const auto ref = oracle::all_pairs(k, 120);
    std::set<std::tuple<long, long, long>> got;
    for (const auto& s : search_k(k, 120)) got.emplace(s.n, s.m, s.t);
    EXPECT_EQ(got, ref) << k;
  }
}

TEST(SearchProperty, FamilyCoverage) {
  for (int k = 3; k <= 200; ++k) {
    const long n_max = 260;
    const auto sols = search_k(k, n_max);
    for (int s = 1; s <= 4; ++s) {
      if (auto fm = family_member(s, k)) {
        ASSERT_TRUE(fm->verified) << s << ' ' << k;
        if (fm->solution.n <= n_max) ASSERT_TRUE(contains(sols, fm->solution)) << s << ' ' << k;
      }
    }
  }
}
