#pragma once

// Certified arithmetic on the dominant root of x^k - x^{k-1} - ... - x - 1.

#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "kbpow/cert_real.hpp"
#include "kbpow/errors.hpp"
#include "kbpow/kbonacci.hpp"

namespace kbpow {

/// Certified enclosure of the unique root of psi_k outside the unit circle.
struct DominantRoot {
  int k = 0;
  long precision_bits = 0;  // requested precision; alpha carries guard bits on top
  CertReal alpha;
};

namespace detail {

enum class Decision { yes, no, unknown };

/// Certified answer to "a < b" (or "a <= b" when `or_equal`).
inline Decision compare_less(const CertReal& a, const CertReal& b, bool or_equal = false) {
  if (or_equal ? certainly_less_equal(a, b) : certainly_less(a, b)) return Decision::yes;
  if (or_equal ? certainly_less(b, a) : certainly_less_equal(b, a)) return Decision::no;
  return Decision::unknown;
}

inline Decision both(Decision a, Decision b) {
  if (a == Decision::no || b == Decision::no) return Decision::no;
  if (a == Decision::yes && b == Decision::yes) return Decision::yes;
  return Decision::unknown;
}

/// x^k (x - 2) + 1 = (x - 1) psi_k(x); shares the sign of psi_k for x > 1.
inline CertReal psi_numerator(const CertReal& x, int k) { return pow_certified(x, k) * (x - 2) + 1; }

inline void psi_numerator_approx(Float& out, const Float& x, int k) {
  Float t(x.precision());
  mpfr_pow_si(t.get(), x.get(), k, MPFR_RNDN);
  mpfr_sub_si(out.get(), x.get(), 2, MPFR_RNDN);
  mpfr_mul(out.get(), out.get(), t.get(), MPFR_RNDN);
  mpfr_add_si(out.get(), out.get(), 1, MPFR_RNDN);
}

}  // namespace detail

/// psi_k(x) = (x^{k+1} - 2x^k + 1)/(x - 1), valid on enclosures away from 1.
inline CertReal psi_rational(const CertReal& x, int k) { return detail::psi_numerator(x, k) / (x - 1); }

/// psi_k(x) = x^k - x^{k-1} - ... - x - 1 by Horner's rule.
inline CertReal psi_literal(const CertReal& x, int k) {
  CertReal acc = CertReal::exact(1, x.precision());
  for (int i = 0; i < k; ++i) acc = acc * x - 1;
  return acc;
}

/// Certified dominant root of psi_k with radius at most 2^{-(precision_bits-8)}.
///
/// Bisection on [2(1 - 2^{-k}), 2] followed by Newton on x^k(x-2)+1, then a
/// sign check of psi_k at both endpoints of the returned interval.
inline DominantRoot dominant_root(int k, long precision_bits) {
  if (k < 2) throw DomainError("order k must be at least 2, got " + std::to_string(k));
  if (precision_bits < 64) throw DomainError("precision must be at least 64 bits");

  // The root sits within 2^{-k} of 2, so the radius must shrink with k too.
  const long radius_exp = std::max(precision_bits - 4, static_cast<long>(k) + 16);
  const mpfr_prec_t work = static_cast<mpfr_prec_t>(radius_exp + 48);

  Float lo(work), hi(work), mid(work), f(work);
  mpfr_set_si(lo.get(), 1, MPFR_RNDN);
  mpfr_div_2si(lo.get(), lo.get(), k, MPFR_RNDN);
  mpfr_si_sub(lo.get(), 1, lo.get(), MPFR_RNDN);
  mpfr_mul_2ui(lo.get(), lo.get(), 1, MPFR_RNDN);
  mpfr_set_si(hi.get(), 2, MPFR_RNDN);
  for (int i = 0; i < 64; ++i) {
    mpfr_add(mid.get(), lo.get(), hi.get(), MPFR_RNDN);
    mpfr_div_2ui(mid.get(), mid.get(), 1, MPFR_RNDN);
    detail::psi_numerator_approx(f, mid, k);
    if (mpfr_sgn(f.get()) < 0) {
      mpfr_swap(lo.get(), mid.get());
    } else {
      mpfr_swap(hi.get(), mid.get());
    }
  }

  Float x(work), deriv(work), step(work), t(work);
  mpfr_add(x.get(), lo.get(), hi.get(), MPFR_RNDN);
  mpfr_div_2ui(x.get(), x.get(), 1, MPFR_RNDN);
  for (int iter = 0; iter < 200; ++iter) {
    // N'(x) = x^{k-1} ((k+1) x - 2k)
    detail::psi_numerator_approx(f, x, k);
    mpfr_pow_si(t.get(), x.get(), k - 1, MPFR_RNDN);
    mpfr_mul_si(deriv.get(), x.get(), k + 1, MPFR_RNDN);
    mpfr_sub_si(deriv.get(), deriv.get(), 2L * k, MPFR_RNDN);
    mpfr_mul(deriv.get(), deriv.get(), t.get(), MPFR_RNDN);
    mpfr_div(step.get(), f.get(), deriv.get(), MPFR_RNDN);
    mpfr_sub(x.get(), x.get(), step.get(), MPFR_RNDN);
    if (mpfr_zero_p(step.get()) || mpfr_get_exp(step.get()) < -(radius_exp + 40)) break;
  }

  Float delta(work);
  mpfr_set_si(delta.get(), 1, MPFR_RNDN);
  mpfr_div_2si(delta.get(), delta.get(), radius_exp, MPFR_RNDN);
  Float a(work), b(work);
  mpfr_sub(a.get(), x.get(), delta.get(), MPFR_RNDD);
  mpfr_add(b.get(), x.get(), delta.get(), MPFR_RNDU);

  CertReal left = CertReal::from_bounds(a, a);
  CertReal right = CertReal::from_bounds(b, b);
  const CertReal bracket_lo = ldexp(CertReal::exact(1, work) - ldexp(CertReal::exact(1, work), -k), 1);
  if (!detail::psi_numerator(left, k).certainly_negative() ||
      !detail::psi_numerator(right, k).certainly_positive() || !certainly_less(bracket_lo, left) ||
      mpfr_cmp_si(b.get(), 2) >= 0) {
    throw CertificationError("could not certify the dominant root for k = " + std::to_string(k));
  }
  return DominantRoot{k, precision_bits, CertReal::from_bounds(std::move(a), std::move(b))};
}

/// Process-wide memo of dominant roots keyed by (k, precision).
inline DominantRoot dominant_root_memo(int k, long precision_bits) {
  static std::mutex mutex;
  static std::map<std::pair<int, long>, DominantRoot> memo;
  const auto key = std::make_pair(k, precision_bits);
  {
    std::lock_guard lock(mutex);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  DominantRoot root = dominant_root(k, precision_bits);
  std::lock_guard lock(mutex);
  memo.insert_or_assign(key, root);
  return root;
}

/// g(alpha, k) = (alpha - 1) / (2 + (k + 1)(alpha - 2)).
inline CertReal g_value(const DominantRoot& root) {
  const CertReal& a = root.alpha;
  return (a - 1) / ((a - 2) * static_cast<long>(root.k + 1) + 2);
}

/// |F_n - g(alpha,k) alpha^{n-1}|, escalating precision until the enclosure
/// is on one side of 1/2.
inline CertReal binet_residual(int k, long n, const SeqTable& table, const DominantRoot& root) {
  if (table.k() != k || root.k != k) throw DomainError("table/root order mismatch");
  if (n < 1 || !table.has(n)) throw DomainError("index n must be >= 1 and within the table");
  DominantRoot r = root;
  while (true) {
    const mpfr_prec_t prec = r.alpha.precision();
    const CertReal approx = g_value(r) * pow_certified(r.alpha, n - 1);
    CertReal residual = abs_certified(CertReal::from_integer(table[n], prec) - approx);
    const CertReal half = CertReal::ratio(1, 2, prec);
    if (detail::compare_less(residual, half) != detail::Decision::unknown) return residual;
    if (r.precision_bits * 2 > kPrecisionCapBits) {
      throw CertificationError("binet residual straddles 1/2 at the precision cap", n);
    }
    r = dominant_root_memo(k, r.precision_bits * 2);
  }
}

/// Certified check of alpha^{n-2} <= F_n <= alpha^{n-1}.
inline bool growth_bounds_hold(const SeqTable& table, long n, const DominantRoot& root) {
  if (table.k() != root.k) throw DomainError("table/root order mismatch");
  if (n < 1 || !table.has(n)) throw DomainError("index n must be >= 1 and within the table");
  DominantRoot r = root;
  while (true) {
    const mpfr_prec_t prec = r.alpha.precision();
    const CertReal f = CertReal::from_integer(table[n], prec);
    const auto d = detail::both(detail::compare_less(pow_certified(r.alpha, n - 2), f, true),
                                detail::compare_less(f, pow_certified(r.alpha, n - 1), true));
    if (d != detail::Decision::unknown) return d == detail::Decision::yes;
    if (r.precision_bits * 2 > kPrecisionCapBits) {
      throw CertificationError("growth bound undecided at the precision cap", n);
    }
    r = dominant_root_memo(root.k, r.precision_bits * 2);
  }
}

/// delta_j = alpha^{j-1} - 2^{j-1}, eta = g(alpha,k) - 1/2 and whether
/// |delta_j| < 2^j / 2^{k/2} and |eta| < 2k / 2^k both hold.
struct DeltaEtaCheck {
  CertReal delta;
  CertReal eta;
  bool bounds_hold = false;
};

inline DeltaEtaCheck delta_eta_check(int k, long j, const DominantRoot& root) {
  if (root.k != k) throw DomainError("root order mismatch");
  const bool j_small = k >= 126 || BigInt(j) * BigInt(j) < pow2(k);
  if (j < 2 || !j_small) throw DomainError("delta/eta check requires 2 <= j < 2^{k/2}");
  DominantRoot r = root;
  while (true) {
    const mpfr_prec_t prec = r.alpha.precision();
    DeltaEtaCheck out;
    out.delta = pow_certified(r.alpha, j - 1) - CertReal::from_integer(pow2(j - 1), prec);
    out.eta = g_value(r) - CertReal::ratio(1, 2, prec);
    const CertReal delta_cap = pow2_half(2 * j - k, prec);
    const CertReal eta_cap = ldexp(CertReal::exact(2L * k, prec), -k);
    const auto d = detail::both(detail::compare_less(abs_certified(out.delta), delta_cap),
                                detail::compare_less(abs_certified(out.eta), eta_cap));
    if (d != detail::Decision::unknown) {
      out.bounds_hold = d == detail::Decision::yes;
      return out;
    }
    if (r.precision_bits * 2 > kPrecisionCapBits) {
      throw CertificationError("delta/eta bounds undecided at the precision cap", j);
    }
    r = dominant_root_memo(k, r.precision_bits * 2);
  }
}

}  // namespace kbpow
