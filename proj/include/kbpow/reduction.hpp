#pragma once

// Continued-fraction reduction of Baker-type bounds and its two-stage
// application to F_n + F_m = 2^t.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kbpow/algebraics.hpp"
#include "kbpow/bounds.hpp"
#include "kbpow/cache.hpp"
#include "kbpow/cert_real.hpp"
#include "kbpow/contfrac.hpp"
#include "kbpow/errors.hpp"
#include "kbpow/parallel.hpp"

namespace kbpow {

/// Data for one application of the reduction lemma: the inequality
/// 0 < m*gamma - n + mu < A * B^{-k} with m <= M.
struct ReductionInput {
  BigInt M;
  CertReal gamma;
  CertReal mu;
  CertReal A;
  CertReal B;

  void validate() const {
    if (M < 1) throw DomainError("reduction cap M must be >= 1");
    if (!A.certainly_positive()) throw DomainError("reduction needs A > 0");
    if (!certainly_less(CertReal::exact(1, B.precision()), B)) throw DomainError("reduction needs B > 1");
  }
};

enum class ReductionStatus { success, epsilon_nonpositive, q_too_small };

inline std::string_view to_string(ReductionStatus s) {
  switch (s) {
    case ReductionStatus::success: return "success";
    case ReductionStatus::epsilon_nonpositive: return "epsilon_nonpositive";
    case ReductionStatus::q_too_small: return "q_too_small";
  }
  return "unknown";
}

struct ReductionResult {
  long ell_used = -1;
  BigInt q;
  CertReal epsilon;  // ||mu q|| - M ||gamma q||
  double bound = std::numeric_limits<double>::infinity();
  ReductionStatus status = ReductionStatus::q_too_small;

  bool ok() const { return status == ReductionStatus::success; }
};

/// Scans convergents l = start_ell .. max_ell of gamma for the first one with
/// q > 6M and certified epsilon > 0. On success no solution has
/// k >= bound = log(A q / epsilon) / log B, where epsilon is taken at its
/// lower endpoint and the bound at its upper one.
///
/// Throws CertificationError when the sign of epsilon cannot be decided at
/// the current precision.
inline ReductionResult dujella_petho(const ReductionInput& in, std::span<const Convergent> convs,
                                     long start_ell, long max_ell) {
  in.validate();
  if (start_ell < 1) throw DomainError("start_ell must be >= 1");
  if (start_ell >= static_cast<long>(convs.size())) {
    throw CertificationError("convergent " + std::to_string(start_ell) + " is not available", start_ell);
  }
  const BigInt six_m = 6 * in.M;
  ReductionResult out;
  const long last = std::min<long>(max_ell, static_cast<long>(convs.size()) - 1);
  for (long ell = start_ell; ell <= last; ++ell) {
    const BigInt& q = convs[static_cast<std::size_t>(ell)].q;
    out.ell_used = ell;
    out.q = q;
    if (q <= six_m) {
      out.status = ReductionStatus::q_too_small;
      continue;
    }
    const CertReal mu_dist = nearest_int_distance(in.mu * q);
    const CertReal gamma_dist = nearest_int_distance(in.gamma * q);
    out.epsilon = mu_dist - gamma_dist * in.M;
    if (out.epsilon.certainly_positive()) {
      const CertReal eps_low = CertReal::from_bounds(out.epsilon.lower(), out.epsilon.lower());
      const CertReal bound = log_certified(in.A * q / eps_low) / log_certified(in.B);
      out.bound = bound.upper().to_double(MPFR_RNDU);
      out.status = ReductionStatus::success;
      return out;
    }
    if (mpfr_sgn(out.epsilon.upper().get()) <= 0) {
      out.status = ReductionStatus::epsilon_nonpositive;
      continue;
    }
    throw CertificationError("sign of epsilon undecided at convergent " + std::to_string(ell), ell);
  }
  return out;
}

/// Same, expanding gamma at its own precision.
inline ReductionResult dujella_petho(const ReductionInput& in, long start_ell, long max_ell) {
  const CFExpansion cf = expand(in.gamma, static_cast<std::size_t>(max_ell + 1));
  const auto convs = convergents(cf, cf.certified_len);
  return dujella_petho(in, convs, start_ell, max_ell);
}

/// Builds a ReductionInput at the requested precision.
using InputRefiner = std::function<ReductionInput(long precision_bits)>;

/// Doubles the working precision until the lemma's questions are decided,
/// up to the precision cap.
inline ReductionResult dujella_petho(const InputRefiner& refine, long start_bits, long start_ell,
                                     long max_ell) {
  for (long bits = start_bits;; bits *= 2) {
    const bool can_escalate = bits * 2 <= kPrecisionCapBits;
    const ReductionInput in = refine(bits);
    const CFExpansion cf = expand(in.gamma, static_cast<std::size_t>(max_ell + 1));
    const auto convs = convergents(cf, cf.certified_len);
    const bool complete = static_cast<long>(convs.size()) > max_ell;
    try {
      ReductionResult r = dujella_petho(in, convs, start_ell, max_ell);
      if (r.ok() || complete || !can_escalate) return r;
    } catch (const CertificationError&) {
      if (!can_escalate) throw;
    }
  }
}

// ---------------------------------------------------------------------------
// The two-stage instantiation.

struct StageOptions {
  /// Which convergent to use, counting a_0/1 as the first (so 120 selects
  /// the 0-based index l = 119).
  long convergent_index = 120;
  /// Working precision; 0 selects 64 + 10 * convergent_index.
  long precision_bits = 0;
  /// Convergents past the primary one kept available for advancing.
  long extra_convergents = 8;
  const DiskCache* cache = nullptr;

  long primary_ell() const { return convergent_index - 1; }
  long start_bits() const { return precision_bits > 0 ? precision_bits : 64 + 10 * convergent_index; }
};

/// Everything stage 1 and stage 2 share for one k: the certified root,
/// gamma_k = log 2 / log alpha, mu_k = log(1/g) / log alpha, the cap
/// M = ceil(M_k) and the convergents of gamma_k.
struct StageContext {
  int k = 0;
  long precision_bits = 0;
  long ell = 0;
  DominantRoot root;
  CertReal g;
  CertReal log_alpha;
  CertReal gamma;
  CertReal mu;
  BigInt m_cap;
  std::vector<BigInt> partial_quotients;  // certified prefix of gamma_k
  std::vector<Convergent> convergents;
};

inline StageContext make_stage_context(int k, const StageOptions& opts) {
  if (k < 3) throw DomainError("reduction stages require k >= 3");
  if (opts.convergent_index < 2) throw DomainError("convergent index must be >= 2");
  const long ell = opts.primary_ell();
  const std::size_t needed = static_cast<std::size_t>(ell + 1);
  const std::size_t wanted = needed + static_cast<std::size_t>(std::max(0L, opts.extra_convergents));

  long bits = opts.start_bits();
  for (;; bits *= 2) {
    if (bits > kPrecisionCapBits) {
      throw CertificationError("gamma_" + std::to_string(k) + " convergents not certified at the precision cap",
                               ell);
    }
    std::optional<DominantRoot> cached = opts.cache ? opts.cache->load_root(k, bits) : std::nullopt;
    StageContext ctx;
    ctx.k = k;
    ctx.ell = ell;
    ctx.root = cached ? *cached : dominant_root_memo(k, bits);
    if (opts.cache && !cached) opts.cache->store_root(ctx.root);
    ctx.precision_bits = ctx.root.precision_bits;
    bits = std::max(bits, ctx.precision_bits);
    const mpfr_prec_t prec = ctx.root.alpha.precision();
    ctx.g = g_value(ctx.root);
    ctx.log_alpha = log_certified(ctx.root.alpha);
    ctx.gamma = log_certified(CertReal::exact(2, prec)) / ctx.log_alpha;
    ctx.mu = -log_certified(ctx.g) / ctx.log_alpha;
    ctx.m_cap = absolute_n_bound_ceil(k);

    std::vector<BigInt> quotients;
    if (auto q = opts.cache ? opts.cache->load_quotients(k, ctx.precision_bits, needed) : std::nullopt) {
      quotients = std::move(q->partial_quotients);
    } else {
      CFExpansion cf = expand(ctx.gamma, wanted);
      if (cf.certified_len < needed) continue;
      cf.partial_quotients.resize(cf.certified_len);
      quotients = std::move(cf.partial_quotients);
      if (opts.cache) opts.cache->store_quotients(k, ctx.precision_bits, quotients);
    }
    CFExpansion cf{quotients, quotients.size()};
    ctx.convergents = convergents(cf, cf.certified_len);
    ctx.partial_quotients = std::move(quotients);
    return ctx;
  }
}

struct Stage1Record {
  int k = 0;
  long precision_bits = 0;
  ReductionResult result;
  bool advanced = false;  // needed a convergent past the primary one
};

struct Stage2Record {
  int k = 0;
  long gap = 0;
  ReductionResult result;
  bool advanced = false;
};

/// 0 < t gamma_k - (n-1) + mu_k < 7.2 alpha^{-(n-m)}, with m <= M_k:
/// the bound applies to n - m.
inline Stage1Record run_stage1(const StageContext& ctx) {
  const mpfr_prec_t prec = ctx.root.alpha.precision();
  const ReductionInput in{ctx.m_cap, ctx.gamma, ctx.mu, CertReal::from_decimal("7.2", prec), ctx.root.alpha};
  Stage1Record rec;
  rec.k = ctx.k;
  rec.precision_bits = ctx.precision_bits;
  rec.result = dujella_petho(in, ctx.convergents, ctx.ell, static_cast<long>(ctx.convergents.size()) - 1);
  rec.advanced = rec.result.ell_used != ctx.ell;
  return rec;
}

/// phi(k, gap) = 1 / (g(alpha,k) (1 + alpha^{-gap})).
inline CertReal phi_value(const DominantRoot& root, long gap) {
  if (gap < 1) throw DomainError("phi needs gap >= 1");
  const CertReal g = g_value(root);
  return CertReal::exact(1, root.alpha.precision()) / (g * (pow_certified(root.alpha, -gap) + 1));
}

inline CertReal phi_value(int k, long gap, long precision_bits = 256) {
  return phi_value(dominant_root_memo(k, precision_bits), gap);
}

/// mu*_{k,gap} = log phi(k, gap) / log alpha.
inline CertReal mu_star(const StageContext& ctx, long gap) {
  return log_certified(phi_value(ctx.root, gap)) / ctx.log_alpha;
}

/// 0 < t gamma_k - (n-1) + mu*_{k,gap} < 2 * 1.3^{-n}: the bound applies to n.
/// Reuses the stage-1 convergent of gamma_k.
inline Stage2Record run_stage2(const StageContext& ctx, long gap) {
  const mpfr_prec_t prec = ctx.root.alpha.precision();
  const ReductionInput in{ctx.m_cap, ctx.gamma, mu_star(ctx, gap), CertReal::exact(2, prec),
                          CertReal::from_decimal("1.3", prec)};
  Stage2Record rec;
  rec.k = ctx.k;
  rec.gap = gap;
  rec.result = dujella_petho(in, ctx.convergents, ctx.ell, static_cast<long>(ctx.convergents.size()) - 1);
  rec.advanced = rec.result.ell_used != ctx.ell;
  return rec;
}

namespace detail {

/// Runs `fn(ctx)`, rebuilding the context at doubled precision whenever it
/// throws CertificationError.
template <typename Fn>
auto with_escalation(StageContext& ctx, const StageOptions& opts, Fn&& fn) {
  while (true) {
    try {
      return fn(ctx);
    } catch (const CertificationError&) {
      if (ctx.precision_bits * 2 > kPrecisionCapBits) throw;
      StageOptions bumped = opts;
      bumped.precision_bits = ctx.precision_bits * 2;
      ctx = make_stage_context(ctx.k, bumped);
    }
  }
}

}  // namespace detail

/// Stage-1 bound on n - m for one k (default options).
inline double stage1(int k, const StageOptions& opts = {}) {
  StageContext ctx = make_stage_context(k, opts);
  return detail::with_escalation(ctx, opts, [](const StageContext& c) { return run_stage1(c); }).result.bound;
}

/// Stage-2 bound on n for one (k, gap) (default options).
inline double stage2(int k, long gap, const StageOptions& opts = {}) {
  if (gap < 1) throw DomainError("stage 2 needs gap >= 1");
  StageContext ctx = make_stage_context(k, opts);
  return detail::with_escalation(ctx, opts, [gap](const StageContext& c) { return run_stage2(c, gap); })
      .result.bound;
}

struct Stage2Summary {
  int k = 0;
  long gaps = 0;
  long failures = 0;
  long advanced = 0;
  CertReal min_epsilon;
  long min_epsilon_gap = 0;
  double max_bound = 0;
  long max_bound_gap = 0;
};

struct ReductionRunOptions {
  StageOptions stage;
  unsigned workers = 1;
  /// Largest n - m fed to stage 2; 0 uses the stage-1 cutoff.
  long gap_max = 0;
  bool run_stage2 = true;
};

struct ReductionReport {
  int k_min = 0;
  int k_max = 0;
  long convergent_index = 0;
  std::vector<Stage1Record> stage1;
  std::vector<Stage2Summary> stage2;

  // Stage-1 aggregates.
  BigInt min_q;
  BigInt max_q;
  CertReal min_epsilon1;
  int min_epsilon1_k = 0;
  double max_bound1 = 0;
  int max_bound1_k = 0;
  long nm_cutoff = 0;
  long stage1_failures = 0;
  std::vector<int> flagged;  // k needing a convergent other than the primary

  // Stage-2 aggregates.
  long gap_max = 0;
  CertReal min_epsilon2;
  int min_epsilon2_k = 0;
  long min_epsilon2_gap = 0;
  double max_bound2 = 0;
  int max_bound2_k = 0;
  long max_bound2_gap = 0;
  long n_cutoff = 0;
  long stage2_failures = 0;
  long stage2_advanced = 0;

  bool ok() const { return stage1_failures == 0 && stage2_failures == 0; }
};

/// Stage 1 for every k in [k_min, k_max], then stage 2 over the (k, gap)
/// grid. One task per k; results are merged in k order.
inline ReductionReport run_reduction(int k_min, int k_max, const ReductionRunOptions& opts) {
  if (k_min < 3 || k_max < k_min) throw DomainError("reduction needs 3 <= k_min <= k_max");
  const std::size_t count = static_cast<std::size_t>(k_max - k_min + 1);
  ReductionReport rep;
  rep.k_min = k_min;
  rep.k_max = k_max;
  rep.convergent_index = opts.stage.convergent_index;
  rep.stage1.resize(count);
  std::vector<StageContext> contexts(count);

  parallel_for(count, opts.workers, [&](std::size_t i) {
    const int k = k_min + static_cast<int>(i);
    contexts[i] = make_stage_context(k, opts.stage);
    rep.stage1[i] = detail::with_escalation(contexts[i], opts.stage, [](const StageContext& c) { return run_stage1(c); });
  });

  bool first = true;
  for (const auto& rec : rep.stage1) {
    const auto& r = rec.result;
    if (rec.advanced) rep.flagged.push_back(rec.k);
    if (!r.ok()) {
      ++rep.stage1_failures;
      continue;
    }
    if (first || r.q < rep.min_q) rep.min_q = r.q;
    if (first || r.q > rep.max_q) rep.max_q = r.q;
    if (first || mpfr_cmp(r.epsilon.lower().get(), rep.min_epsilon1.lower().get()) < 0) {
      rep.min_epsilon1 = r.epsilon;
      rep.min_epsilon1_k = rec.k;
    }
    if (first || r.bound > rep.max_bound1) {
      rep.max_bound1 = r.bound;
      rep.max_bound1_k = rec.k;
    }
    first = false;
  }
  rep.nm_cutoff = static_cast<long>(std::floor(rep.max_bound1));
  if (!opts.run_stage2) return rep;

  rep.gap_max = opts.gap_max > 0 ? opts.gap_max : rep.nm_cutoff;
  rep.stage2.resize(count);
  parallel_for(count, opts.workers, [&](std::size_t i) {
    StageContext& ctx = contexts[i];
    Stage2Summary s;
    s.k = ctx.k;
    bool any = false;
    for (long gap = 1; gap <= rep.gap_max; ++gap) {
      const Stage2Record rec =
          detail::with_escalation(ctx, opts.stage, [gap](const StageContext& c) { return run_stage2(c, gap); });
      ++s.gaps;
      if (rec.advanced) ++s.advanced;
      if (!rec.result.ok()) {
        ++s.failures;
        continue;
      }
      if (!any || mpfr_cmp(rec.result.epsilon.lower().get(), s.min_epsilon.lower().get()) < 0) {
        s.min_epsilon = rec.result.epsilon;
        s.min_epsilon_gap = gap;
      }
      if (!any || rec.result.bound > s.max_bound) {
        s.max_bound = rec.result.bound;
        s.max_bound_gap = gap;
      }
      any = true;
    }
    rep.stage2[i] = std::move(s);
  });

  first = true;
  for (const auto& s : rep.stage2) {
    rep.stage2_failures += s.failures;
    rep.stage2_advanced += s.advanced;
    if (s.failures == s.gaps) continue;
    if (first || mpfr_cmp(s.min_epsilon.lower().get(), rep.min_epsilon2.lower().get()) < 0) {
      rep.min_epsilon2 = s.min_epsilon;
      rep.min_epsilon2_k = s.k;
      rep.min_epsilon2_gap = s.min_epsilon_gap;
    }
    if (first || s.max_bound > rep.max_bound2) {
      rep.max_bound2 = s.max_bound;
      rep.max_bound2_k = s.k;
      rep.max_bound2_gap = s.max_bound_gap;
    }
    first = false;
  }
  rep.n_cutoff = static_cast<long>(std::floor(rep.max_bound2));
  return rep;
}

}  // namespace kbpow
