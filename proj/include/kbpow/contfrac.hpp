#pragma once

// Continued fractions of enclosed reals.

#include <functional>
#include <string>
#include <vector>

#include "kbpow/cert_real.hpp"
#include "kbpow/errors.hpp"

namespace kbpow {

/// Partial quotients [a_0; a_1, a_2, ...]. The first `certified_len` entries
/// are the same for every real inside the source enclosure; any entries past
/// that point are midpoint guesses.
struct CFExpansion {
  std::vector<BigInt> partial_quotients;
  std::size_t certified_len = 0;
};

/// Convergent p_l / q_l with l = 0 the integer part a_0 / 1.
struct Convergent {
  long index = 0;
  BigInt p;
  BigInt q;
};

/// Runs the floor/reciprocal loop on the whole enclosure; a quotient is
/// certified when floor(lower) == floor(upper). After certification fails,
/// the loop continues on the midpoint to fill the list up to `count`.
inline CFExpansion expand(const CertReal& x, std::size_t count) {
  if (count == 0) throw DomainError("continued fraction needs count >= 1");
  CFExpansion cf;
  CertReal y = x;
  const mpfr_prec_t prec = x.precision();
  bool tail_from_y = true;
  while (cf.partial_quotients.size() < count) {
    auto [a_lo, a_hi] = floor_bounds(y);
    if (a_lo != a_hi) break;
    cf.partial_quotients.push_back(a_lo);
    cf.certified_len = cf.partial_quotients.size();
    CertReal frac = y - a_lo;
    if (!frac.certainly_positive()) {
      tail_from_y = false;  // the expansion may terminate here
      break;
    }
    y = CertReal::exact(1, prec) / frac;
  }
  if (!tail_from_y) return cf;
  // Uncertified continuation from the midpoint, for diagnostics only.
  Float m = y.midpoint();
  while (cf.partial_quotients.size() < count && mpfr_number_p(m.get())) {
    BigInt a;
    mpfr_get_z(a.get_mpz_t(), m.get(), MPFR_RNDD);
    if (!cf.partial_quotients.empty() && sgn(a) <= 0) break;
    cf.partial_quotients.push_back(a);
    mpfr_sub_z(m.get(), m.get(), a.get_mpz_t(), MPFR_RNDN);
    if (mpfr_zero_p(m.get())) break;
    mpfr_ui_div(m.get(), 1, m.get(), MPFR_RNDN);
  }
  return cf;
}

/// Produces an enclosure of the target at the requested precision.
using Refiner = std::function<CertReal(long precision_bits)>;

/// Doubles the precision handed to `refine` until `count` quotients are
/// certified or the cap is reached.
inline CFExpansion expand_refined(const Refiner& refine, std::size_t count, long start_bits,
                                  long cap_bits = kPrecisionCapBits) {
  long bits = start_bits;
  CFExpansion cf;
  while (true) {
    cf = expand(refine(bits), count);
    if (cf.certified_len >= count) return cf;
    if (bits * 2 > cap_bits) {
      throw CertificationError("partial quotient " + std::to_string(cf.certified_len) +
                                   " is not certified at the precision cap",
                               static_cast<long>(cf.certified_len));
    }
    bits *= 2;
  }
}

/// The first `count` convergents p_l/q_l (l = 0 .. count-1).
inline std::vector<Convergent> convergents(const CFExpansion& cf, std::size_t count) {
  if (count > cf.certified_len) {
    throw DomainError("requested " + std::to_string(count) + " convergents but only " +
                      std::to_string(cf.certified_len) + " quotients are certified");
  }
  std::vector<Convergent> out;
  out.reserve(count);
  // Seeds (p_{-1}, q_{-1}) = (1, 0) and (p_{-2}, q_{-2}) = (0, 1).
  BigInt p_prev(1), q_prev(0), p_prev2(0), q_prev2(1);
  for (std::size_t l = 0; l < count; ++l) {
    const BigInt& a = cf.partial_quotients[l];
    BigInt pn = a * p_prev + p_prev2;
    BigInt qn = a * q_prev + q_prev2;
    p_prev2 = std::move(p_prev);
    q_prev2 = std::move(q_prev);
    p_prev = pn;
    q_prev = qn;
    out.push_back(Convergent{static_cast<long>(l), std::move(pn), std::move(qn)});
  }
  return out;
}

/// ||x||, the distance from x to the nearest integer, as an enclosure.
/// Throws CertificationError when the enclosure is too wide to pin down the
/// nearest integer (width >= 1/4 or a half-integer inside).
inline CertReal nearest_int_distance(const CertReal& x) {
  const mpfr_prec_t prec = x.precision();
  Float width(prec);
  mpfr_sub(width.get(), x.upper().get(), x.lower().get(), MPFR_RNDU);
  if (mpfr_cmp_d(width.get(), 0.25) >= 0) {
    throw CertificationError("enclosure too wide for a nearest-integer distance");
  }
  // Nearest integer to the lower endpoint; both endpoints must agree.
  BigInt n_lo, n_hi;
  Float t(prec + 2);
  mpfr_add_d(t.get(), x.lower().get(), 0.5, MPFR_RNDD);
  mpfr_get_z(n_lo.get_mpz_t(), t.get(), MPFR_RNDD);
  mpfr_add_d(t.get(), x.upper().get(), 0.5, MPFR_RNDU);
  mpfr_get_z(n_hi.get_mpz_t(), t.get(), MPFR_RNDD);
  if (n_lo != n_hi) {
    throw CertificationError("enclosure straddles a half-integer; nearest integer is ambiguous");
  }
  CertReal diff = x - n_lo;
  return abs_certified(diff);
}

}  // namespace kbpow
