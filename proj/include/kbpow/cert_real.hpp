#pragma once

// Interval reals over MPFR with outward (directed) rounding.

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "kbpow/errors.hpp"

namespace kbpow {

using BigInt = mpz_class;

/// Owning wrapper around an mpfr_t. The precision is fixed at construction
/// and carried along by copies.
class Float {
 public:
  explicit Float(mpfr_prec_t prec = 64) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Float(const Float& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  Float(Float&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }
  Float& operator=(const Float& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  Float& operator=(Float&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~Float() { mpfr_clear(v_); }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }

  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }

  /// Fixed-point rendering with `decimals` digits after the point.
  std::string to_fixed(int decimals, mpfr_rnd_t rnd = MPFR_RNDN) const {
    char* raw = nullptr;
    const std::string fmt = std::string("%.") + std::to_string(decimals) + "R" + rnd_char(rnd) + "f";
    if (mpfr_asprintf(&raw, fmt.c_str(), v_) < 0) return "nan";
    std::unique_ptr<char, void (*)(char*)> guard(raw, mpfr_free_str);
    return std::string(raw);
  }

  /// Scientific notation with `digits` significant digits (0 = enough digits
  /// to read the value back exactly under round-to-nearest).
  std::string to_string(int digits = 0, mpfr_rnd_t rnd = MPFR_RNDN) const {
    if (mpfr_zero_p(v_)) return "0";
    if (!mpfr_number_p(v_)) return mpfr_nan_p(v_) ? "nan" : (mpfr_sgn(v_) > 0 ? "inf" : "-inf");
    mpfr_exp_t exp10 = 0;
    char* raw = mpfr_get_str(nullptr, &exp10, 10, static_cast<size_t>(digits), v_, rnd);
    std::unique_ptr<char, void (*)(char*)> guard(raw, mpfr_free_str);
    std::string mant(raw);
    std::string sign;
    if (!mant.empty() && mant[0] == '-') {
      sign = "-";
      mant.erase(0, 1);
    }
    std::string out = sign + mant.substr(0, 1);
    if (mant.size() > 1) out += "." + mant.substr(1);
    out += "e" + std::to_string(static_cast<long>(exp10) - 1);
    return out;
  }

 private:
  static char rnd_char(mpfr_rnd_t rnd) {
    switch (rnd) {
      case MPFR_RNDD: return 'D';
      case MPFR_RNDU: return 'U';
      case MPFR_RNDZ: return 'Z';
      default: return 'N';
    }
  }

  mpfr_t v_;
};

/// Closed interval [lower, upper] guaranteed to contain a real quantity.
/// Every operation rounds the lower endpoint down and the upper endpoint up,
/// so containment survives arbitrary chains of arithmetic.
class CertReal {
 public:
  explicit CertReal(mpfr_prec_t prec = 64) : lo_(prec), hi_(prec) {}

  static CertReal exact(long v, mpfr_prec_t prec) {
    CertReal r(prec);
    mpfr_set_si(r.lo_.get(), v, MPFR_RNDD);
    mpfr_set_si(r.hi_.get(), v, MPFR_RNDU);
    return r;
  }

  static CertReal from_integer(const BigInt& v, mpfr_prec_t prec) {
    CertReal r(prec);
    mpfr_set_z(r.lo_.get(), v.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_.get(), v.get_mpz_t(), MPFR_RNDU);
    return r;
  }

  static CertReal from_double(double v, mpfr_prec_t prec) {
    CertReal r(prec);
    mpfr_set_d(r.lo_.get(), v, MPFR_RNDD);
    mpfr_set_d(r.hi_.get(), v, MPFR_RNDU);
    return r;
  }

  /// Encloses the decimal literal `text` (e.g. "1.3", "7.2e-3") exactly as
  /// written, not its nearest binary double.
  static CertReal from_decimal(std::string_view text, mpfr_prec_t prec) {
    std::string s(text);
    CertReal r(prec);
    if (mpfr_set_str(r.lo_.get(), s.c_str(), 10, MPFR_RNDD) != 0 ||
        mpfr_set_str(r.hi_.get(), s.c_str(), 10, MPFR_RNDU) != 0) {
      throw DomainError("not a decimal number: " + s);
    }
    return r;
  }

  static CertReal ratio(long num, long den, mpfr_prec_t prec) {
    if (den == 0) throw DomainError("ratio with zero denominator");
    return exact(num, prec) / exact(den, prec);
  }

  /// Adopts explicit endpoints; throws if lower > upper.
  static CertReal from_bounds(Float lower, Float upper) {
    if (mpfr_cmp(lower.get(), upper.get()) > 0) throw DomainError("interval endpoints out of order");
    CertReal r(std::max(lower.precision(), upper.precision()));
    r.lo_ = std::move(lower);
    r.hi_ = std::move(upper);
    return r;
  }

  const Float& lower() const noexcept { return lo_; }
  const Float& upper() const noexcept { return hi_; }
  mpfr_prec_t precision() const noexcept { return std::max(lo_.precision(), hi_.precision()); }

  Float midpoint() const {
    Float m(precision() + 1);
    mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
    mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    return m;
  }

  /// Half-width measured from the midpoint, rounded up.
  Float radius() const {
    Float m = midpoint();
    Float a(64), b(64);
    mpfr_sub(a.get(), hi_.get(), m.get(), MPFR_RNDU);
    mpfr_sub(b.get(), m.get(), lo_.get(), MPFR_RNDU);
    return mpfr_cmp(a.get(), b.get()) >= 0 ? a : b;
  }

  double value() const { return midpoint().to_double(); }
  double radius_value() const { return radius().to_double(MPFR_RNDU); }
  double lower_value() const { return lo_.to_double(MPFR_RNDD); }
  double upper_value() const { return hi_.to_double(MPFR_RNDU); }

  bool is_exact() const { return mpfr_equal_p(lo_.get(), hi_.get()) != 0; }
  bool certainly_positive() const { return mpfr_sgn(lo_.get()) > 0; }
  bool certainly_negative() const { return mpfr_sgn(hi_.get()) < 0; }
  bool contains_zero() const { return mpfr_sgn(lo_.get()) <= 0 && mpfr_sgn(hi_.get()) >= 0; }
  bool contains(long v) const { return mpfr_cmp_si(lo_.get(), v) <= 0 && mpfr_cmp_si(hi_.get(), v) >= 0; }
  bool contains(const CertReal& inner) const {
    return mpfr_cmp(lo_.get(), inner.lo_.get()) <= 0 && mpfr_cmp(hi_.get(), inner.hi_.get()) >= 0;
  }

  /// Decimal rendering of the midpoint.
  std::string to_string(int digits = 20) const { return midpoint().to_string(digits); }

  // Raw endpoint access for operations implemented outside this class.
  Float& mutable_lower() noexcept { return lo_; }
  Float& mutable_upper() noexcept { return hi_; }

  friend CertReal operator-(const CertReal& a) {
    CertReal r(a.precision());
    mpfr_neg(r.lo_.get(), a.hi_.get(), MPFR_RNDD);
    mpfr_neg(r.hi_.get(), a.lo_.get(), MPFR_RNDU);
    return r;
  }

  friend CertReal operator+(const CertReal& a, const CertReal& b) {
    CertReal r(std::max(a.precision(), b.precision()));
    mpfr_add(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_add(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend CertReal operator-(const CertReal& a, const CertReal& b) {
    CertReal r(std::max(a.precision(), b.precision()));
    mpfr_sub(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
    mpfr_sub(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
    return r;
  }

  friend CertReal operator*(const CertReal& a, const CertReal& b) {
    CertReal r(std::max(a.precision(), b.precision()));
    if (mpfr_sgn(a.lo_.get()) >= 0 && mpfr_sgn(b.lo_.get()) >= 0) {
      mpfr_mul(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
      mpfr_mul(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
      return r;
    }
    // General case: extremes among the four endpoint products.
    const mpfr_srcptr as[2] = {a.lo_.get(), a.hi_.get()};
    const mpfr_srcptr bs[2] = {b.lo_.get(), b.hi_.get()};
    Float t(r.precision());
    bool first = true;
    for (auto x : as) {
      for (auto y : bs) {
        mpfr_mul(t.get(), x, y, MPFR_RNDD);
        if (first || mpfr_cmp(t.get(), r.lo_.get()) < 0) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
        mpfr_mul(t.get(), x, y, MPFR_RNDU);
        if (first || mpfr_cmp(t.get(), r.hi_.get()) > 0) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
        first = false;
      }
    }
    return r;
  }

  friend CertReal operator/(const CertReal& a, const CertReal& b) {
    if (b.contains_zero()) throw DomainError("division by an enclosure containing zero");
    CertReal r(std::max(a.precision(), b.precision()));
    if (mpfr_sgn(a.lo_.get()) >= 0 && b.certainly_positive()) {
      mpfr_div(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
      mpfr_div(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
      return r;
    }
    const mpfr_srcptr as[2] = {a.lo_.get(), a.hi_.get()};
    const mpfr_srcptr bs[2] = {b.lo_.get(), b.hi_.get()};
    Float t(r.precision());
    bool first = true;
    for (auto x : as) {
      for (auto y : bs) {
        mpfr_div(t.get(), x, y, MPFR_RNDD);
        if (first || mpfr_cmp(t.get(), r.lo_.get()) < 0) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
        mpfr_div(t.get(), x, y, MPFR_RNDU);
        if (first || mpfr_cmp(t.get(), r.hi_.get()) > 0) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
        first = false;
      }
    }
    return r;
  }

  friend CertReal operator*(const CertReal& a, const BigInt& z) {
    CertReal r(a.precision());
    const bool neg = sgn(z) < 0;
    const Float& from_lo = neg ? a.hi_ : a.lo_;
    const Float& from_hi = neg ? a.lo_ : a.hi_;
    mpfr_mul_z(r.lo_.get(), from_lo.get(), z.get_mpz_t(), MPFR_RNDD);
    mpfr_mul_z(r.hi_.get(), from_hi.get(), z.get_mpz_t(), MPFR_RNDU);
    return r;
  }
  friend CertReal operator*(const BigInt& z, const CertReal& a) { return a * z; }

  friend CertReal operator*(const CertReal& a, long v) {
    CertReal r(a.precision());
    const Float& from_lo = v < 0 ? a.hi_ : a.lo_;
    const Float& from_hi = v < 0 ? a.lo_ : a.hi_;
    mpfr_mul_si(r.lo_.get(), from_lo.get(), v, MPFR_RNDD);
    mpfr_mul_si(r.hi_.get(), from_hi.get(), v, MPFR_RNDU);
    return r;
  }
  friend CertReal operator*(long v, const CertReal& a) { return a * v; }

  friend CertReal operator+(const CertReal& a, long v) {
    CertReal r(a.precision());
    mpfr_add_si(r.lo_.get(), a.lo_.get(), v, MPFR_RNDD);
    mpfr_add_si(r.hi_.get(), a.hi_.get(), v, MPFR_RNDU);
    return r;
  }
  friend CertReal operator+(long v, const CertReal& a) { return a + v; }
  friend CertReal operator-(const CertReal& a, long v) { return a + (-v); }
  friend CertReal operator-(long v, const CertReal& a) { return -a + v; }

  friend CertReal operator-(const CertReal& a, const BigInt& z) {
    CertReal r(a.precision());
    mpfr_sub_z(r.lo_.get(), a.lo_.get(), z.get_mpz_t(), MPFR_RNDD);
    mpfr_sub_z(r.hi_.get(), a.hi_.get(), z.get_mpz_t(), MPFR_RNDU);
    return r;
  }
  friend CertReal operator-(const BigInt& z, const CertReal& a) { return -(a - z); }

  /// Multiplication by 2^e (exact).
  friend CertReal ldexp(const CertReal& a, long e) {
    CertReal r(a);
    mpfr_mul_2si(r.lo_.get(), r.lo_.get(), e, MPFR_RNDD);
    mpfr_mul_2si(r.hi_.get(), r.hi_.get(), e, MPFR_RNDU);
    return r;
  }

 private:
  Float lo_;
  Float hi_;
};

/// Same interval at a new working precision (endpoints rounded outward).
inline CertReal with_precision(const CertReal& x, mpfr_prec_t prec) {
  Float lo(prec), hi(prec);
  mpfr_set(lo.get(), x.lower().get(), MPFR_RNDD);
  mpfr_set(hi.get(), x.upper().get(), MPFR_RNDU);
  return CertReal::from_bounds(std::move(lo), std::move(hi));
}

/// a.upper < b.lower: every point of a lies below every point of b.
inline bool certainly_less(const CertReal& a, const CertReal& b) {
  return mpfr_cmp(a.upper().get(), b.lower().get()) < 0;
}

inline bool certainly_less_equal(const CertReal& a, const CertReal& b) {
  return mpfr_cmp(a.upper().get(), b.lower().get()) <= 0;
}

/// The intervals overlap, so no strict order can be certified.
inline bool overlaps(const CertReal& a, const CertReal& b) {
  return !certainly_less(a, b) && !certainly_less(b, a);
}

inline CertReal log_certified(const CertReal& x) {
  if (!x.certainly_positive()) throw DomainError("logarithm of an enclosure touching zero");
  Float lo(x.precision()), hi(x.precision());
  mpfr_log(lo.get(), x.lower().get(), MPFR_RNDD);
  mpfr_log(hi.get(), x.upper().get(), MPFR_RNDU);
  return CertReal::from_bounds(std::move(lo), std::move(hi));
}

inline CertReal log1p_certified(const CertReal& x) {
  if (mpfr_cmp_si(x.lower().get(), -1) <= 0) throw DomainError("log1p of an enclosure touching -1");
  Float lo(x.precision()), hi(x.precision());
  mpfr_log1p(lo.get(), x.lower().get(), MPFR_RNDD);
  mpfr_log1p(hi.get(), x.upper().get(), MPFR_RNDU);
  return CertReal::from_bounds(std::move(lo), std::move(hi));
}

inline CertReal exp_certified(const CertReal& x) {
  Float lo(x.precision()), hi(x.precision());
  mpfr_exp(lo.get(), x.lower().get(), MPFR_RNDD);
  mpfr_exp(hi.get(), x.upper().get(), MPFR_RNDU);
  return CertReal::from_bounds(std::move(lo), std::move(hi));
}

inline CertReal sqrt_certified(const CertReal& x) {
  if (mpfr_sgn(x.lower().get()) < 0) throw DomainError("square root of a negative enclosure");
  Float lo(x.precision()), hi(x.precision());
  mpfr_sqrt(lo.get(), x.lower().get(), MPFR_RNDD);
  mpfr_sqrt(hi.get(), x.upper().get(), MPFR_RNDU);
  return CertReal::from_bounds(std::move(lo), std::move(hi));
}

inline CertReal abs_certified(const CertReal& x) {
  if (mpfr_sgn(x.lower().get()) >= 0) return x;
  if (mpfr_sgn(x.upper().get()) <= 0) return -x;
  Float lo(x.precision()), hi(x.precision());
  if (mpfr_cmpabs(x.lower().get(), x.upper().get()) > 0) {
    mpfr_neg(hi.get(), x.lower().get(), MPFR_RNDU);
  } else {
    mpfr_set(hi.get(), x.upper().get(), MPFR_RNDU);
  }
  return CertReal::from_bounds(std::move(lo), std::move(hi));
}

/// x^e for integer e. pow(x, 0) is exactly 1.
inline CertReal pow_certified(const CertReal& x, long e) {
  const mpfr_prec_t prec = x.precision();
  if (e == 0) return CertReal::exact(1, prec);
  if (e < 0 && x.contains_zero()) throw DomainError("negative power of an enclosure containing zero");

  Float lo(prec), hi(prec);
  const bool odd = (e % 2) != 0;
  if (mpfr_sgn(x.lower().get()) > 0 || (mpfr_sgn(x.lower().get()) == 0 && e > 0)) {
    // Positive base: monotone in the base, direction set by the sign of e.
    const mpfr_srcptr a = e > 0 ? x.lower().get() : x.upper().get();
    const mpfr_srcptr b = e > 0 ? x.upper().get() : x.lower().get();
    mpfr_pow_si(lo.get(), a, e, MPFR_RNDD);
    mpfr_pow_si(hi.get(), b, e, MPFR_RNDU);
    return CertReal::from_bounds(std::move(lo), std::move(hi));
  }
  if (odd) {
    // Odd powers of a sign-definite or straddling base reduce to -((-x)^e)
    // when negative; use the magnitude route to stay monotone.
    if (mpfr_sgn(x.upper().get()) < 0 || e > 0) {
      if (e > 0) {
        mpfr_pow_si(lo.get(), x.lower().get(), e, MPFR_RNDD);
        mpfr_pow_si(hi.get(), x.upper().get(), e, MPFR_RNDU);
      } else {
        mpfr_pow_si(lo.get(), x.upper().get(), e, MPFR_RNDD);
        mpfr_pow_si(hi.get(), x.lower().get(), e, MPFR_RNDU);
      }
      return CertReal::from_bounds(std::move(lo), std::move(hi));
    }
  }
  // Even power: depends only on |x|.
  CertReal m = abs_certified(x);
  return pow_certified(m, e);
}

/// 2^(num/2) for an integer num; used for the half-integer exponents 2^{k/2}.
inline CertReal pow2_half(long num, mpfr_prec_t prec) {
  CertReal base = ldexp(CertReal::exact(1, prec), num >= 0 ? num / 2 : -((-num + 1) / 2));
  if (num % 2 != 0) base = base * sqrt_certified(CertReal::exact(2, prec));
  return base;
}

/// floor(lower), floor(upper).
inline std::pair<BigInt, BigInt> floor_bounds(const CertReal& x) {
  std::pair<BigInt, BigInt> out;
  mpfr_get_z(out.first.get_mpz_t(), x.lower().get(), MPFR_RNDD);
  mpfr_get_z(out.second.get_mpz_t(), x.upper().get(), MPFR_RNDD);
  return out;
}

}  // namespace kbpow
