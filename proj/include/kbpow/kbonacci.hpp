#pragma once

// Exact k-generalized Fibonacci numbers.

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbpow/errors.hpp"

namespace kbpow {

using BigInt = mpz_class;

/// Memoized values F_n^(k) for n in [-(k-2), n_max].
///
/// Logical index n is stored at physical slot n + (k-2), so the k-1 leading
/// zeros F_{-(k-2)}, ..., F_0 are addressable with their natural indices.
/// The table only grows; `extend_to` appends in place.
class SeqTable {
 public:
  int k() const noexcept { return k_; }
  long n_min() const noexcept { return -(k_ - 2); }
  long n_max() const noexcept { return static_cast<long>(values_.size()) + n_min() - 1; }

  bool has(long n) const noexcept { return n >= n_min() && n <= n_max(); }

  const BigInt& operator[](long n) const { return values_[slot(n)]; }

  const BigInt& at(long n) const {
    if (!has(n)) {
      throw std::out_of_range("index " + std::to_string(n) + " outside [" + std::to_string(n_min()) +
                              ", " + std::to_string(n_max()) + "]");
    }
    return values_[slot(n)];
  }

  /// All stored values, physical order (first entry is F_{-(k-2)}).
  std::span<const BigInt> values() const noexcept { return values_; }

  /// Appends terms up to index `n_max` using F_n = 2 F_{n-1} - F_{n-k-1}
  /// (valid for n >= 3; F_2 = F_1 = 1).
  void extend_to(long n_max) {
    if (n_max <= this->n_max()) return;
    values_.reserve(static_cast<std::size_t>(n_max - n_min() + 1));
    for (long n = this->n_max() + 1; n <= n_max; ++n) {
      if (n <= 2) {
        values_.emplace_back(1);
        continue;
      }
      BigInt next = values_[slot(n - 1)];
      next <<= 1;
      next -= values_[slot(n - k_ - 1)];
      values_.push_back(std::move(next));
    }
  }

 private:
  explicit SeqTable(int k) : k_(k) {
    values_.assign(static_cast<std::size_t>(k - 1), BigInt(0));
    values_.emplace_back(1);
  }

  std::size_t slot(long n) const noexcept { return static_cast<std::size_t>(n - n_min()); }

  int k_;
  std::vector<BigInt> values_;

  friend SeqTable generate(int k, long n_max);
};

/// Table of F_n^(k) for every n in [-(k-2), n_max].
inline SeqTable generate(int k, long n_max) {
  if (k < 2) throw DomainError("order k must be at least 2, got " + std::to_string(k));
  if (n_max < 1) throw DomainError("n_max must be at least 1, got " + std::to_string(n_max));
  SeqTable table(k);
  table.extend_to(n_max);
  return table;
}

/// Closed forms on the initial stretch of the sequence:
///   F_i = 2^{i-2}                          for i in [2, k+1]
///   F_i = 2^{i-2} - (i-k) 2^{i-k-3}        for i in [k+2, 2k+2]
/// Returns nullopt elsewhere.
inline std::optional<BigInt> closed_form(int k, long i) {
  if (k < 2) throw DomainError("order k must be at least 2, got " + std::to_string(k));
  if (i >= 2 && i <= k + 1) {
    BigInt v(1);
    v <<= static_cast<mp_bitcnt_t>(i - 2);
    return v;
  }
  if (i >= k + 2 && i <= 2L * k + 2) {
    BigInt v(1);
    v <<= static_cast<mp_bitcnt_t>(i - 2);
    BigInt correction(i - k);
    const long shift = i - k - 3;
    if (shift >= 0) {
      correction <<= static_cast<mp_bitcnt_t>(shift);
    } else {
      correction >>= 1;  // i = k+2: (i-k) 2^{-1} = 1
    }
    v -= correction;
    return v;
  }
  return std::nullopt;
}

/// t when x == 2^t, nullopt otherwise (including x <= 0).
inline std::optional<long> power_of_two_exponent(const BigInt& x) {
  if (sgn(x) <= 0) return std::nullopt;
  if (mpz_popcount(x.get_mpz_t()) != 1) return std::nullopt;
  return static_cast<long>(mpz_scan1(x.get_mpz_t(), 0));
}

/// Bit length, i.e. floor(log2 x) + 1 for x > 0.
inline long bit_length(const BigInt& x) {
  return sgn(x) == 0 ? 0 : static_cast<long>(mpz_sizeinbase(x.get_mpz_t(), 2));
}

inline BigInt pow2(long e) {
  BigInt v(1);
  v <<= static_cast<mp_bitcnt_t>(e);
  return v;
}

}  // namespace kbpow
