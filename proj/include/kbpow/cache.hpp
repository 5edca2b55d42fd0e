#pragma once

// On-disk cache of dominant roots and continued-fraction data.
//
// Each file is plain text: a header of `key value` lines (quantity, k,
// precision) followed by the payload. Interval endpoints are written with
// enough decimal digits to read back bit-for-bit at the stored precision.
// A request for more precision than a file records is a miss; the caller
// recomputes and overwrites.

#include <filesystem>
#include <functional>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include "kbpow/algebraics.hpp"
#include "kbpow/cert_real.hpp"

namespace kbpow {

struct CachedQuotients {
  long precision_bits = 0;
  std::vector<BigInt> partial_quotients;  // all certified
};

class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& directory() const noexcept { return dir_; }

  std::optional<DominantRoot> load_root(int k, long min_bits) const {
    std::ifstream in(root_path(k));
    if (!in) return std::nullopt;
    Header h;
    if (!read_header(in, h) || h.quantity != "alpha" || h.k != k || h.precision < min_bits) return std::nullopt;
    std::string key, lower, upper;
    long work = 0;
    if (!(in >> key >> work) || key != "working_bits") return std::nullopt;
    if (!(in >> key >> lower) || key != "lower") return std::nullopt;
    if (!(in >> key >> upper) || key != "upper") return std::nullopt;
    Float lo(work), hi(work);
    if (mpfr_set_str(lo.get(), lower.c_str(), 10, MPFR_RNDN) != 0) return std::nullopt;
    if (mpfr_set_str(hi.get(), upper.c_str(), 10, MPFR_RNDN) != 0) return std::nullopt;
    if (mpfr_cmp(lo.get(), hi.get()) > 0) return std::nullopt;
    return DominantRoot{k, h.precision, CertReal::from_bounds(std::move(lo), std::move(hi))};
  }

  void store_root(const DominantRoot& root) const {
    std::ostringstream out;
    write_header(out, "alpha", root.k, root.precision_bits);
    out << "working_bits " << root.alpha.precision() << '\n';
    out << "lower " << root.alpha.lower().to_string(0, MPFR_RNDN) << '\n';
    out << "upper " << root.alpha.upper().to_string(0, MPFR_RNDN) << '\n';
    write_atomically(root_path(root.k), out.str());
  }

  std::optional<CachedQuotients> load_quotients(int k, long min_bits, std::size_t min_count) const {
    std::ifstream in(quotient_path(k));
    if (!in) return std::nullopt;
    Header h;
    if (!read_header(in, h) || h.quantity != "gamma_convergents" || h.k != k || h.precision < min_bits) {
      return std::nullopt;
    }
    std::string key;
    std::size_t count = 0;
    if (!(in >> key >> count) || key != "count" || count < min_count) return std::nullopt;
    CachedQuotients out;
    out.precision_bits = h.precision;
    out.partial_quotients.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      long ell = 0;
      std::string a, p, q;
      if (!(in >> ell >> a >> p >> q) || ell != static_cast<long>(i)) return std::nullopt;
      out.partial_quotients.emplace_back(a, 10);
    }
    return out;
  }

  /// One line per convergent: `ell a_ell p_ell q_ell`.
  void store_quotients(int k, long precision_bits, const std::vector<BigInt>& quotients) const {
    std::ostringstream out;
    write_header(out, "gamma_convergents", k, precision_bits);
    out << "count " << quotients.size() << '\n';
    BigInt p_prev(1), q_prev(0), p_prev2(0), q_prev2(1);
    for (std::size_t i = 0; i < quotients.size(); ++i) {
      BigInt p = quotients[i] * p_prev + p_prev2;
      BigInt q = quotients[i] * q_prev + q_prev2;
      out << i << ' ' << quotients[i].get_str() << ' ' << p.get_str() << ' ' << q.get_str() << '\n';
      p_prev2 = p_prev;
      q_prev2 = q_prev;
      p_prev = p;
      q_prev = q;
    }
    write_atomically(quotient_path(k), out.str());
  }

  std::filesystem::path root_path(int k) const { return dir_ / ("root_k" + std::to_string(k) + ".txt"); }
  std::filesystem::path quotient_path(int k) const {
    return dir_ / ("convergents_k" + std::to_string(k) + ".txt");
  }

 private:
  struct Header {
    std::string quantity;
    int k = 0;
    long precision = 0;
  };

  static void write_header(std::ostream& out, const std::string& quantity, int k, long precision) {
    out << "# kbpow cache v1\n"
        << "quantity " << quantity << '\n'
        << "k " << k << '\n'
        << "precision " << precision << '\n';
  }

  static bool read_header(std::istream& in, Header& h) {
    std::string line;
    if (!std::getline(in, line) || line != "# kbpow cache v1") return false;
    std::string key;
    if (!(in >> key >> h.quantity) || key != "quantity") return false;
    if (!(in >> key >> h.k) || key != "k") return false;
    if (!(in >> key >> h.precision) || key != "precision") return false;
    return true;
  }

  void write_atomically(const std::filesystem::path& path, const std::string& text) const {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    const auto tmp = path.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << text;
      if (!out) return;
    }
    std::filesystem::rename(tmp, path, ec);
  }

  std::filesystem::path dir_;
};

}  // namespace kbpow
