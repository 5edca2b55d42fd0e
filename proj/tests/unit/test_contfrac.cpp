#include <gtest/gtest.h>

#include "kbpow/algebraics.hpp"
#include "kbpow/contfrac.hpp"

using namespace kbpow;

namespace {

CertReal golden(long bits) {
  return (sqrt_certified(CertReal::exact(5, bits)) + 1) / CertReal::exact(2, bits);
}

CertReal gamma_k(int k, long bits) {
  const DominantRoot r = dominant_root(k, bits);
  return log_certified(CertReal::exact(2, r.alpha.precision())) / log_certified(r.alpha);
}

CFExpansion certified(std::vector<long> a) {
  CFExpansion cf;
  for (long v : a) cf.partial_quotients.emplace_back(v);
  cf.certified_len = cf.partial_quotients.size();
  return cf;
}

}  // namespace

TEST(Expand, GoldenRatioIsAllOnes) {
  const CFExpansion cf = expand(golden(256), 60);
  ASSERT_GE(cf.certified_len, 60u);
  for (std::size_t i = 0; i < 60; ++i) EXPECT_EQ(cf.partial_quotients[i], 1) << i;
}

TEST(Expand, SqrtTwo) {
  const CFExpansion cf = expand(sqrt_certified(CertReal::exact(2, 256)), 40);
  ASSERT_GE(cf.certified_len, 40u);
  EXPECT_EQ(cf.partial_quotients[0], 1);
  for (std::size_t i = 1; i < 40; ++i) EXPECT_EQ(cf.partial_quotients[i], 2) << i;
}

TEST(Expand, GammaThreeReference) {
  const long ref[] = {1, 7, 3, 1, 1, 1, 4, 11, 15, 1, 1, 1, 1, 12, 1, 4, 129, 1, 48, 2, 4, 3, 10, 745, 1, 16, 4, 2, 1, 2};
  const CFExpansion cf = expand(gamma_k(3, 256), 30);
  ASSERT_GE(cf.certified_len, 30u);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(cf.partial_quotients[i], ref[i]) << i;
}

TEST(Expand, CertifiedLengthGrowsWithPrecision) {
  const CFExpansion lo = expand(gamma_k(5, 128), 400);
  const CFExpansion hi = expand(gamma_k(5, 1024), 400);
  EXPECT_LT(lo.certified_len, hi.certified_len);
  EXPECT_LE(lo.certified_len, lo.partial_quotients.size());
}

TEST(ExpandRefined, EscalatesAndReportsFailure) {
  const CFExpansion cf = expand_refined([](long bits) { return gamma_k(4, bits); }, 150, 64);
  EXPECT_GE(cf.certified_len, 150u);
  try {
    expand_refined([](long bits) { return gamma_k(4, bits); }, 150, 64, 256);
    FAIL() << "expected certification failure";
  } catch (const CertificationError& e) {
    EXPECT_GT(e.first_uncertified_index(), 0);
    EXPECT_LT(e.first_uncertified_index(), 150);
  }
}

TEST(Convergents, FibonacciRatios) {
  const auto c = convergents(certified({1, 1, 1, 1, 1}), 5);
  const long p[] = {1, 2, 3, 5, 8}, q[] = {1, 1, 2, 3, 5};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(c[i].index, i);
    EXPECT_EQ(c[i].p, p[i]);
    EXPECT_EQ(c[i].q, q[i]);
  }
}

TEST(Convergents, SqrtTwo) {
  const auto c = convergents(certified({1, 2, 2}), 3);
  EXPECT_EQ(c[2].p, 7);
  EXPECT_EQ(c[2].q, 5);
}

TEST(Convergents, RejectsUncertifiedIndex) {
  CFExpansion cf = certified({1, 2, 2, 2});
  cf.certified_len = 2;
  EXPECT_THROW(convergents(cf, 3), DomainError);
}

TEST(NearestIntDistance, Basics) {
  EXPECT_NEAR(nearest_int_distance(CertReal::from_decimal("3.7", 128)).value(), 0.3, 1e-30);
  EXPECT_TRUE(nearest_int_distance(CertReal::exact(5, 64)).contains(0));
  EXPECT_NEAR(nearest_int_distance(CertReal::from_decimal("-2.25", 128)).value(), 0.25, 1e-30);
}

TEST(NearestIntDistance, AmbiguousEnclosures) {
  Float lo(64), hi(64);
  mpfr_set_d(lo.get(), 2.49, MPFR_RNDN);
  mpfr_set_d(hi.get(), 2.51, MPFR_RNDN);
  EXPECT_THROW(nearest_int_distance(CertReal::from_bounds(lo, hi)), CertificationError);
  mpfr_set_d(hi.get(), 2.8, MPFR_RNDN);
  EXPECT_THROW(nearest_int_distance(CertReal::from_bounds(lo, hi)), CertificationError);
}

// Reconstruction, alternation and the determinant identity on gamma_k.
TEST(ContfracProperty, ConvergentIdentities) {
  for (int k : {3, 4, 9, 50, 321}) {
    const CertReal x = gamma_k(k, 1400);
    const CFExpansion cf = expand(x, 125);
    ASSERT_GE(cf.certified_len, 125u) << k;
    const auto c = convergents(cf, 125);
    for (std::size_t l = 1; l < c.size(); ++l) {
      const BigInt det = c[l].p * c[l - 1].q - c[l - 1].p * c[l].q;
      ASSERT_EQ(det, (l % 2 == 1) ? 1 : -1) << k << ' ' << l;  // (-1)^{l-1}
      ASSERT_EQ(gcd(c[l].p, c[l].q), 1);
      if (l >= 2) ASSERT_GT(c[l].q, c[l - 1].q);
      // |x - p/q| < 1/q^2 on the whole enclosure, with sign (-1)^{l+1}.
      const CertReal err = CertReal::from_integer(c[l].p, 1600) / CertReal::from_integer(c[l].q, 1600) - x;
      const CertReal cap = CertReal::exact(1, 1600) / CertReal::from_integer(c[l].q * c[l].q, 1600);
      ASSERT_TRUE(certainly_less(abs_certified(err), cap)) << k << ' ' << l;
      if (l % 2 == 0) ASSERT_TRUE(err.certainly_negative()) << k << ' ' << l;
      else ASSERT_TRUE(err.certainly_positive()) << k << ' ' << l;
    }
  }
}

TEST(ContfracProperty, PrefixStableAcrossPrecisions) {
  for (int k = 3; k <= 40; ++k) {
    const CFExpansion a = expand(gamma_k(k, 512), 200);
    const CFExpansion b = expand(gamma_k(k, 2048), 200);
    ASSERT_LE(a.certified_len, b.certified_len);
    for (std::size_t i = 0; i < a.certified_len; ++i) ASSERT_EQ(a.partial_quotients[i], b.partial_quotients[i]);
  }
}
