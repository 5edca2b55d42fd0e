#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "kbpow/reduction.hpp"
#include "oracles.hpp"

using namespace kbpow;

namespace {

ReductionInput synthetic_input(const oracle::Synthetic& s, long bits) {
  const CertReal g = (sqrt_certified(CertReal::exact(s.d, bits)) + s.a) / CertReal::exact(s.b, bits);
  return ReductionInput{BigInt(s.M), g, CertReal::ratio(s.mu_num, s.mu_den, bits), CertReal::exact(s.A, bits),
                        CertReal::ratio(s.b_num, s.b_den, bits)};
}

}  // namespace

TEST(DujellaPetho, SqrtTwoExampleAgreesWithEnumeration) {
  const oracle::Synthetic s;  // gamma = sqrt 2, mu = 1/3, M = 100, A = 1, B = 2
  const ReductionResult r = dujella_petho(synthetic_input(s, 512), 1, 60);
  ASSERT_TRUE(r.ok()) << to_string(r.status);
  EXPECT_GT(r.q, 600);
  EXPECT_TRUE(r.epsilon.certainly_positive());
  ASSERT_TRUE(std::isfinite(r.bound));
  const long k_from = static_cast<long>(std::ceil(r.bound));
  EXPECT_TRUE(oracle::synthetic_hits(s, k_from, k_from + 10).empty());
  // The enumeration is not vacuous: small k has solutions.
  EXPECT_FALSE(oracle::synthetic_hits(s, 1, 3).empty());
}

TEST(DujellaPetho, QTooSmall) {
  oracle::Synthetic s;
  ReductionInput in = synthetic_input(s, 512);
  in.M = BigInt("1000000000000000000000000000000000000000");
  const ReductionResult r = dujella_petho(in, 1, 20);
  EXPECT_EQ(r.status, ReductionStatus::q_too_small);
  EXPECT_FALSE(r.ok());
}

TEST(DujellaPetho, RationalMuWithSmallDenominatorAdvances) {
  // mu = 0 makes ||mu q|| = 0, so epsilon <= 0 at every convergent.
  oracle::Synthetic s;
  s.mu_num = 0;
  const ReductionResult r = dujella_petho(synthetic_input(s, 512), 1, 30);
  EXPECT_EQ(r.status, ReductionStatus::epsilon_nonpositive);
}

TEST(DujellaPetho, InputValidation) {
  oracle::Synthetic s;
  ReductionInput in = synthetic_input(s, 256);
  in.B = CertReal::exact(1, 256);
  EXPECT_THROW(dujella_petho(in, 1, 10), DomainError);
  in = synthetic_input(s, 256);
  in.M = 0;
  EXPECT_THROW(dujella_petho(in, 1, 10), DomainError);
  EXPECT_THROW(dujella_petho(synthetic_input(s, 256), 0, 10), DomainError);
}

TEST(DujellaPetho, RefinerEscalates) {
  const oracle::Synthetic s;
  long calls = 0;
  const ReductionResult r = dujella_petho(
      [&](long bits) {
        ++calls;
        return synthetic_input(s, bits);
      },
      64, 1, 60);
  EXPECT_TRUE(r.ok());
  EXPECT_GE(calls, 1);
}

TEST(Stage1, TribonacciReference) {
  StageOptions opts;
  const StageContext ctx = make_stage_context(3, opts);
  EXPECT_EQ(ctx.ell, 119);
  const Stage1Record rec = run_stage1(ctx);
  ASSERT_TRUE(rec.result.ok());
  EXPECT_FALSE(rec.advanced);
  EXPECT_EQ(rec.result.q.get_str().size(), 63u);
  EXPECT_NEAR(rec.result.epsilon.value(), 0.45613, 1e-4);
  EXPECT_NEAR(rec.result.bound, 240.47495, 1e-4);
  EXPECT_NEAR(stage1(3), rec.result.bound, 1e-12);
}

TEST(Stage1, MuMatchesReference) {
  const StageContext ctx = make_stage_context(3, {});
  EXPECT_NEAR(ctx.mu.value(), 0.788652813226560982087535300325, 1e-25);
  EXPECT_NEAR(ctx.gamma.value(), std::log(2.0L) / std::log(1.839286755214161132551852564653286600424L), 1e-15);
}

TEST(Stage1, RejectsSmallK) { EXPECT_THROW(stage1(2), DomainError); }

TEST(Phi, LimitsAndRange) {
  // alpha^{-843} is about 2^{-740}, so resolving phi from 1/g needs more bits.
  const DominantRoot r = dominant_root(3, 1200);
  const CertReal g = g_value(r);
  const CertReal inv_g = CertReal::exact(1, 1200) / g;
  const CertReal one = phi_value(r, 1);
  EXPECT_TRUE(overlaps(one, inv_g / (CertReal::exact(1, 1200) / r.alpha + 1)));
  for (long gap : {1L, 2L, 10L, 100L, 843L}) {
    const CertReal p = phi_value(r, gap);
    EXPECT_TRUE(certainly_less(ldexp(inv_g, -1), p)) << gap;
    EXPECT_TRUE(certainly_less(p, inv_g)) << gap;
  }
  // Large gaps approach 1/g.
  EXPECT_LT(std::abs(phi_value(r, 2000).value() - inv_g.value()), 1e-300);
  EXPECT_THROW(phi_value(r, 0), DomainError);
}

TEST(Stage2, ReusesStageOneConvergent) {
  const StageContext ctx = make_stage_context(3, {});
  const Stage1Record s1 = run_stage1(ctx);
  const Stage2Record s2 = run_stage2(ctx, 1);
  ASSERT_TRUE(s2.result.ok());
  EXPECT_EQ(s2.result.q, s1.result.q);
  EXPECT_GT(s2.result.bound, 0);
  EXPECT_TRUE(std::isfinite(s2.result.bound));
  EXPECT_NEAR(stage2(3, 1), s2.result.bound, 1e-12);
  EXPECT_THROW(stage2(3, 0), DomainError);
}

TEST(Stage, EpsilonNestsUnderDoubledPrecision) {
  StageOptions lo, hi;
  hi.precision_bits = 2 * lo.start_bits();
  const StageContext a = make_stage_context(7, lo), b = make_stage_context(7, hi);
  const Stage1Record ra = run_stage1(a), rb = run_stage1(b);
  ASSERT_EQ(ra.result.q, rb.result.q);
  EXPECT_TRUE(ra.result.epsilon.contains(rb.result.epsilon));
  for (long gap : {1L, 50L, 600L}) {
    const Stage2Record sa = run_stage2(a, gap), sb = run_stage2(b, gap);
    EXPECT_TRUE(sa.result.epsilon.contains(sb.result.epsilon)) << gap;
  }
}

TEST(Stage, CacheRoundTripIsIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "kbpow_test_cache_reduction";
  std::filesystem::remove_all(dir);
  const DiskCache cache(dir);
  StageOptions opts;
  opts.cache = &cache;
  const StageContext cold = make_stage_context(11, opts);
  ASSERT_TRUE(std::filesystem::exists(cache.root_path(11)));
  ASSERT_TRUE(std::filesystem::exists(cache.quotient_path(11)));
  const StageContext warm = make_stage_context(11, opts);
  EXPECT_TRUE(mpfr_equal_p(cold.root.alpha.lower().get(), warm.root.alpha.lower().get()));
  EXPECT_TRUE(mpfr_equal_p(cold.root.alpha.upper().get(), warm.root.alpha.upper().get()));
  EXPECT_EQ(cold.partial_quotients, warm.partial_quotients);
  EXPECT_EQ(run_stage1(cold).result.bound, run_stage1(warm).result.bound);

  // A higher-precision request is a miss and rewrites the file.
  EXPECT_FALSE(cache.load_root(11, cold.precision_bits * 2).has_value());
  StageOptions more = opts;
  more.precision_bits = cold.precision_bits * 2;
  make_stage_context(11, more);
  EXPECT_TRUE(cache.load_root(11, cold.precision_bits * 2).has_value());
  std::filesystem::remove_all(dir);
}

TEST(RunReduction, SmallRangeAggregates) {
  ReductionRunOptions opts;
  opts.workers = 2;
  opts.gap_max = 20;
  const ReductionReport rep = run_reduction(3, 8, opts);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.stage1.size(), 6u);
  EXPECT_EQ(rep.stage2.size(), 6u);
  for (const auto& s : rep.stage2) EXPECT_EQ(s.gaps, 20);
  EXPECT_EQ(rep.nm_cutoff, static_cast<long>(std::floor(rep.max_bound1)));
  EXPECT_EQ(rep.n_cutoff, static_cast<long>(std::floor(rep.max_bound2)));

  ReductionRunOptions serial = opts;
  serial.workers = 1;
  const ReductionReport again = run_reduction(3, 8, serial);
  EXPECT_EQ(again.max_bound1, rep.max_bound1);
  EXPECT_EQ(again.max_bound2, rep.max_bound2);
  EXPECT_EQ(again.min_q, rep.min_q);
  EXPECT_THROW(run_reduction(5, 4, opts), DomainError);
}

// Soundness against brute force on random synthetic instances.
TEST(ReductionProperty, NoSolutionAtOrAboveBound) {
  std::mt19937_64 rng(424242);
  std::uniform_int_distribution<long> d_dist(2, 60), a_dist(-3, 3), b_dist(1, 4), mu_den(2, 17), m_dist(10, 200),
      a_coef(1, 10), b_base(3, 12);
  int checked = 0;
  for (int attempt = 0; checked < 120 && attempt < 2000; ++attempt) {
    oracle::Synthetic s;
    s.d = d_dist(rng);
    const long r = static_cast<long>(std::sqrt(static_cast<double>(s.d)));
    if (r * r == s.d) continue;
    s.a = a_dist(rng);
    s.b = b_dist(rng);
    s.mu_den = mu_den(rng);
    s.mu_num = std::uniform_int_distribution<long>(1, s.mu_den - 1)(rng);
    s.M = m_dist(rng);
    s.A = a_coef(rng);
    s.b_den = 2;
    s.b_num = b_base(rng);  // B in [1.5, 6]
    // A rational mu can put mu*q exactly on a half-integer, where no
    // precision decides the nearest integer; such instances are skipped.
    ReductionResult res;
    try {
      res = dujella_petho(synthetic_input(s, 768), 1, 80);
    } catch (const CertificationError&) {
      continue;
    }
    if (!res.ok()) continue;
    ++checked;
    const long k_from = static_cast<long>(std::ceil(res.bound));
    const auto hits = oracle::synthetic_hits(s, std::max(1L, k_from), k_from + 20);
    ASSERT_TRUE(hits.empty()) << "d=" << s.d << " a=" << s.a << " b=" << s.b << " mu=" << s.mu_num << '/'
                              << s.mu_den << " M=" << s.M << " bound=" << res.bound;
  }
  EXPECT_GE(checked, 100);
}
