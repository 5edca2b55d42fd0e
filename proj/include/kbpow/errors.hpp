#pragma once

#include <stdexcept>
#include <string>

namespace kbpow {

/// Raised when an argument lies outside an operation's domain (k < 2,
/// logarithm of an enclosure touching zero, and so on).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an enclosure cannot be tightened enough to decide a
/// certified question, even after precision escalation up to the cap.
class CertificationError : public std::runtime_error {
 public:
  explicit CertificationError(const std::string& what, long first_uncertified_index = -1)
      : std::runtime_error(what), first_uncertified_index_(first_uncertified_index) {}

  /// Index of the first quantity that could not be certified, or -1.
  long first_uncertified_index() const noexcept { return first_uncertified_index_; }

 private:
  long first_uncertified_index_;
};

/// Hard ceiling for automatic precision doubling.
inline constexpr long kPrecisionCapBits = 1L << 20;

}  // namespace kbpow
