#pragma once

// Numeric upper bounds from linear forms in logarithms. Plain long double:
// every quantity here is a coarse bound whose magnitude is all that matters.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <mpfr.h>

#include "kbpow/cert_real.hpp"
#include "kbpow/errors.hpp"

namespace kbpow {

/// Inputs to Matveev's lower bound for |gamma_1^{b_1} ... gamma_t^{b_t} - 1|.
/// `num_logs` is the count of algebraic numbers (the lemma's t, not the
/// exponent of 2 in the equation).
struct MatveevParams {
  int num_logs = 1;
  long degree = 1;
  long double big_b = 1;
  std::vector<long double> heights;  // A_1 .. A_t

  void validate() const {
    if (num_logs < 1) throw DomainError("need at least one logarithm");
    if (degree < 1) throw DomainError("field degree must be >= 1");
    if (big_b < 1) throw DomainError("B must be >= 1");
    if (heights.size() != static_cast<std::size_t>(num_logs)) {
      throw DomainError("expected " + std::to_string(num_logs) + " heights");
    }
    for (long double a : heights) {
      if (a < 0.16L) throw DomainError("each A_j must be >= 0.16");
    }
  }
};

/// 1.4 * 30^{t+3} * t^{4.5} * D^2 (1 + log D)(1 + log B) A_1 ... A_t;
/// the lower bound itself is exp(-result).
inline long double matveev_exponent(const MatveevParams& params) {
  params.validate();
  const long double t = params.num_logs;
  const long double d = static_cast<long double>(params.degree);
  long double value = 1.4L * std::pow(30.0L, t + 3) * std::pow(t, 4.5L);
  value *= d * d * (1 + std::log(d));
  value *= 1 + std::log(params.big_b);
  for (long double a : params.heights) value *= a;
  return value;
}

/// n - m < 1.5e12 k^4 log^2 k log n
inline long double nm_gap_bound(long k, long double n) {
  if (k < 3) throw DomainError("gap bound requires k >= 3");
  if (n < 2) throw DomainError("gap bound requires n >= 2");
  const long double lk = std::log(static_cast<long double>(k));
  return 1.5e12L * std::pow(static_cast<long double>(k), 4) * lk * lk * std::log(n);
}

/// M_k = 1.2e27 k^7 log^5 k, the absolute bound on n.
inline long double absolute_n_bound(long k) {
  if (k < 3) throw DomainError("absolute bound requires k >= 3");
  const long double kk = static_cast<long double>(k);
  return 1.2e27L * std::pow(kk, 7) * std::pow(std::log(kk), 5);
}

/// ceil(M_k) as an integer, for use as the reduction cap.
inline BigInt absolute_n_bound_ceil(long k) {
  Float f(128);
  mpfr_set_ld(f.get(), absolute_n_bound(k), MPFR_RNDU);
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), f.get(), MPFR_RNDU);
  return out;
}

inline constexpr long double kKeyLemmaThreshold = 2252750.0L;

/// x / log^2 x < A implies x < 2 A log^2 A, for A >= 2252750.
inline long double key_lemma_bound(long double a) {
  if (!(a >= kKeyLemmaThreshold)) {
    throw DomainError("key lemma requires A >= 2252750");
  }
  const long double la = std::log(a);
  return 2 * a * la * la;
}

/// The two A_3 values fed to Matveev: k log(4k+4) for g(alpha,k) alone, and
/// k log(8k+8) + gap log 2 for g(alpha,k)(1 + alpha^{m-n}).
inline std::pair<long double, long double> height_bounds(long k, long nm_gap) {
  if (k < 3) throw DomainError("height bounds require k >= 3");
  if (nm_gap < 1) throw DomainError("height bounds require n - m >= 1");
  const long double kk = static_cast<long double>(k);
  return {kk * std::log(4 * kk + 4), kk * std::log(8 * kk + 8) + nm_gap * std::log(2.0L)};
}

/// The n-bound chain for one k.
struct BoundChain {
  long k = 0;
  long double m_k = 0;

  long double nm_bound(long double n) const { return nm_gap_bound(k, n); }
};

inline BoundChain make_bound_chain(long k) { return BoundChain{k, absolute_n_bound(k)}; }

/// Matveev parameters of the first application, |2^t alpha^{-(n-1)} / g - 1|.
inline MatveevParams first_linear_form(long k, long n) {
  const long double kk = static_cast<long double>(k);
  return MatveevParams{3, k, static_cast<long double>(n - 1),
                       {kk * std::log(2.0L), 0.7L, height_bounds(k, 1).first}};
}

/// Matveev parameters of the second application, which absorbs alpha^{m-n}
/// into the third algebraic number.
inline MatveevParams second_linear_form(long k, long n, long nm_gap) {
  const long double kk = static_cast<long double>(k);
  return MatveevParams{3, k, static_cast<long double>(n - 1),
                       {kk * std::log(2.0L), 0.7L, height_bounds(k, nm_gap).second}};
}

/// Smallest k0 in [3, k_limit] with M_k < 2^{k/2} for every k in [k0, k_limit],
/// or 0 if it fails at k_limit.
inline long exponential_crossover(long k_limit) {
  long k0 = 0;
  for (long k = k_limit; k >= 3; --k) {
    if (!(std::log(absolute_n_bound(k)) < 0.5L * k * std::log(2.0L))) break;
    k0 = k;
  }
  return k0;
}

}  // namespace kbpow
