#pragma once

// The kbpow command line: option resolution and the eight subcommands.
// Everything lives in run() so tests can drive it with in-memory streams.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "kbpow/kbpow.hpp"

namespace kbpow::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kComputation = 2, kFalsified = 3 };

/// Bad flags, bad values or an invalid range.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int k_min = 3;
  int k_max = 30;
  long n_max = 600;
  long convergent_index = 120;
  long precision_bits = 0;  // 0 = derived from the convergent index
  unsigned worker_count = default_worker_count();
  std::string cache_dir;
  std::string output_path;
  std::string csv_path;
  bool full_scale = false;
  bool allow_k2 = false;
  int s_max = 4;
  long gap_max = 0;  // 0 = the stage-1 cutoff

  void validate() const {
    if (k_min < 2) throw UsageError("k-min must be at least 2");
    if (k_max < k_min) throw UsageError("empty k range: k-max < k-min");
    if (n_max < 3) throw UsageError("n-max must be at least 3");
    if (convergent_index < 2) throw UsageError("convergent-index must be at least 2");
    if (precision_bits != 0 && precision_bits < 64) throw UsageError("precision-bits must be at least 64");
    if (worker_count < 1) throw UsageError("workers must be at least 1");
    if (s_max < 1 || s_max > 40) throw UsageError("s-max must be in [1, 40]");
    if (gap_max < 0) throw UsageError("gap-max must be nonnegative");
  }
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

namespace detail {

// Settings that every layer (flags, KBB_ variables, config file) may carry.
inline const std::vector<std::string>& setting_names() {
  static const std::vector<std::string> names = {
      "k",       "k-min",      "k-max",     "n-max", "precision-bits", "convergent-index", "workers",
      "cache-dir", "output", "csv", "full", "allow-k2", "s-max", "gap-max"};
  return names;
}

inline const std::set<std::string>& flag_names() {
  static const std::set<std::string> names = {"full", "allow-k2"};
  return names;
}

inline std::string env_name(const std::string& setting) {
  std::string out = "KBB_";
  for (char c : setting) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

inline std::string config_key(const std::string& setting) {
  std::string out = setting;
  for (char& c : out) c = c == '-' ? '_' : c;
  return out;
}

inline long parse_long(const std::string& name, const std::string& text) {
  long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw UsageError(name + ": not an integer: '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& name, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off" || text.empty()) return false;
  throw UsageError(name + ": not a boolean: '" + text + "'");
}

using Layer = std::map<std::string, std::string>;

inline Layer env_layer(const EnvLookup& env) {
  Layer out;
  for (const auto& name : setting_names()) {
    if (auto v = env(env_name(name))) out[name] = *v;
  }
  return out;
}

inline Layer config_layer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config file " + path + ": expected a JSON object");
  Layer out;
  std::set<std::string> known;
  for (const auto& name : setting_names()) known.insert(config_key(name));
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw UsageError("config file " + path + ": unknown key '" + key + "'");
    std::string name = key;
    for (char& c : name) c = c == '_' ? '-' : c;
    out[name] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  return out;
}

// Applies one layer over `cfg`; `seen` collects the settings it touched.
inline void apply_layer(RunConfig& cfg, const Layer& layer, std::set<std::string>& seen) {
  auto get = [&](const std::string& name) -> const std::string* {
    auto it = layer.find(name);
    return it == layer.end() ? nullptr : &it->second;
  };
  auto as_int = [](const std::string& name, const std::string& v) {
    const long x = parse_long(name, v);
    if (x < -(1L << 30) || x > (1L << 30)) throw UsageError(name + ": out of range");
    return static_cast<int>(x);
  };
  if (auto v = get("k")) {
    cfg.k_min = cfg.k_max = as_int("k", *v);
    seen.insert("k-min");
    seen.insert("k-max");
  }
  if (auto v = get("k-min")) cfg.k_min = as_int("k-min", *v), seen.insert("k-min");
  if (auto v = get("k-max")) cfg.k_max = as_int("k-max", *v), seen.insert("k-max");
  if (auto v = get("n-max")) cfg.n_max = parse_long("n-max", *v), seen.insert("n-max");
  if (auto v = get("precision-bits")) cfg.precision_bits = parse_long("precision-bits", *v);
  if (auto v = get("convergent-index")) cfg.convergent_index = parse_long("convergent-index", *v);
  if (auto v = get("workers")) {
    const long w = parse_long("workers", *v);
    if (w < 1 || w > 4096) throw UsageError("workers must be in [1, 4096]");
    cfg.worker_count = static_cast<unsigned>(w);
  }
  if (auto v = get("cache-dir")) cfg.cache_dir = *v;
  if (auto v = get("output")) cfg.output_path = *v;
  if (auto v = get("csv")) cfg.csv_path = *v;
  if (auto v = get("full")) cfg.full_scale = parse_bool("full", *v);
  if (auto v = get("allow-k2")) cfg.allow_k2 = parse_bool("allow-k2", *v);
  if (auto v = get("s-max")) cfg.s_max = as_int("s-max", *v);
  if (auto v = get("gap-max")) cfg.gap_max = parse_long("gap-max", *v);
}

/// Six significant digits, as a JSON number.
inline double sig6(double x) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return std::strtod(buf, nullptr);
}

inline std::string sci(const BigInt& v, int digits = 6) {
  Float f(static_cast<mpfr_prec_t>(std::max<long>(64, bit_length(v) + 8)));
  mpfr_set_z(f.get(), v.get_mpz_t(), MPFR_RNDN);
  return f.to_string(digits);
}

inline long decimal_digits(const BigInt& v) { return static_cast<long>(BigInt(abs(v)).get_str().size()); }

/// Lower endpoint of a (positive) certified quantity, rounded down.
inline std::string lower_sci(const CertReal& x, int digits = 6) { return x.lower().to_string(digits, MPFR_RNDD); }

using Json = nlohmann::ordered_json;

inline void emit(std::ostream& out, const Json& record) { out << record.dump() << '\n'; }

inline Json solution_json(const Solution& s) {
  return Json{{"record", "solution"}, {"k", s.k}, {"n", s.n}, {"m", s.m}, {"t", s.t}};
}

}  // namespace detail

/// Resolved configuration plus the subcommand to run.
struct Invocation {
  std::string command;
  RunConfig config;
};

// ---------------------------------------------------------------------------
// Subcommands. Each returns an exit code and writes records to `out`.

inline int cmd_seq(const RunConfig& cfg, std::ostream& out) {
  out << "k,n,F_n,closed_form\n";
  int code = kOk;
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    const SeqTable table = generate(k, cfg.n_max);
    for (long n = 1; n <= cfg.n_max; ++n) {
      std::string mark;
      if (auto cf = closed_form(k, n)) {
        mark = *cf == table[n] ? "match" : "mismatch";
        if (*cf != table[n]) code = kComputation;
      }
      out << k << ',' << n << ',' << table[n].get_str() << ',' << mark << '\n';
    }
  }
  return code;
}

inline long root_bits(const RunConfig& cfg) { return cfg.precision_bits > 0 ? cfg.precision_bits : 256; }

inline int cmd_root(const RunConfig& cfg, std::ostream& out) {
  const std::unique_ptr<DiskCache> cache = cfg.cache_dir.empty() ? nullptr : std::make_unique<DiskCache>(cfg.cache_dir);
  const long bits = root_bits(cfg);
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    std::optional<DominantRoot> root = cache ? cache->load_root(k, bits) : std::nullopt;
    if (!root) {
      root = dominant_root(k, bits);
      if (cache) cache->store_root(*root);
    }
    const CertReal g = g_value(*root);
    const int decimals = static_cast<int>(std::min<long>(60, bits * 3 / 10 - 4));
    detail::emit(out, detail::Json{{"record", "root"},
                                   {"k", k},
                                   {"precision_bits", root->precision_bits},
                                   {"alpha", root->alpha.midpoint().to_fixed(decimals)},
                                   {"alpha_radius", root->alpha.radius().to_string(3, MPFR_RNDU)},
                                   {"g", g.midpoint().to_fixed(decimals)},
                                   {"g_radius", g.radius().to_string(3, MPFR_RNDU)}});
  }
  return kOk;
}

inline StageOptions stage_options(const RunConfig& cfg, const DiskCache* cache) {
  StageOptions o;
  o.convergent_index = cfg.convergent_index;
  o.precision_bits = cfg.precision_bits;
  o.cache = cache;
  return o;
}

inline int cmd_cf(const RunConfig& cfg, std::ostream& out) {
  if (cfg.k_min < 3) throw UsageError("cf expands gamma_k and needs k >= 3");
  const std::unique_ptr<DiskCache> cache = cfg.cache_dir.empty() ? nullptr : std::make_unique<DiskCache>(cfg.cache_dir);
  const StageOptions opts = stage_options(cfg, cache.get());
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    const StageContext ctx = make_stage_context(k, opts);
    const Convergent& c = ctx.convergents[static_cast<std::size_t>(ctx.ell)];
    detail::Json quotients = detail::Json::array();
    for (long i = 0; i <= ctx.ell; ++i) quotients.push_back(ctx.partial_quotients[static_cast<std::size_t>(i)].get_str());
    detail::emit(out, detail::Json{{"record", "cf"},
                                   {"k", k},
                                   {"precision_bits", ctx.precision_bits},
                                   {"certified_len", ctx.convergents.size()},
                                   {"convergent_index", cfg.convergent_index},
                                   {"ell", ctx.ell},
                                   {"q", c.q.get_str()},
                                   {"q_digits", detail::decimal_digits(c.q)},
                                   {"partial_quotients", quotients}});
  }
  return kOk;
}

inline int cmd_reduce(const RunConfig& cfg, std::ostream& out) {
  if (cfg.k_min < 3) throw UsageError("reduce needs k >= 3");
  const std::unique_ptr<DiskCache> cache = cfg.cache_dir.empty() ? nullptr : std::make_unique<DiskCache>(cfg.cache_dir);
  ReductionRunOptions opts;
  opts.stage = stage_options(cfg, cache.get());
  opts.workers = cfg.worker_count;
  opts.gap_max = cfg.gap_max;
  const ReductionReport rep = run_reduction(cfg.k_min, cfg.k_max, opts);

  using detail::Json;
  for (const auto& rec : rep.stage1) {
    const auto& r = rec.result;
    Json j{{"record", "stage1"}, {"k", rec.k}, {"precision_bits", rec.precision_bits}, {"ell", r.ell_used},
           {"status", to_string(r.status)}};
    if (r.ok()) {
      j["q_digits"] = detail::decimal_digits(r.q);
      j["q"] = detail::sci(r.q);
      j["epsilon"] = detail::lower_sci(r.epsilon);
      j["bound"] = detail::sig6(r.bound);
    }
    j["advanced"] = rec.advanced;
    detail::emit(out, j);
  }
  for (const auto& s : rep.stage2) {
    Json j{{"record", "stage2"}, {"k", s.k}, {"gaps", s.gaps}, {"failures", s.failures}, {"advanced", s.advanced}};
    if (s.failures < s.gaps) {
      j["min_epsilon"] = detail::lower_sci(s.min_epsilon);
      j["min_epsilon_gap"] = s.min_epsilon_gap;
      j["max_bound"] = detail::sig6(s.max_bound);
      j["max_bound_gap"] = s.max_bound_gap;
    }
    detail::emit(out, j);
  }
  Json agg{{"record", "aggregate"},
           {"k_min", rep.k_min},
           {"k_max", rep.k_max},
           {"convergent_index", rep.convergent_index},
           {"ell", rep.convergent_index - 1},
           {"stage1_failures", rep.stage1_failures},
           {"flagged", rep.flagged}};
  if (rep.stage1_failures < static_cast<long>(rep.stage1.size())) {
    agg["min_q"] = detail::sci(rep.min_q);
    agg["max_q"] = detail::sci(rep.max_q);
    agg["max_q_digits"] = detail::decimal_digits(rep.max_q);
    agg["min_epsilon1"] = detail::lower_sci(rep.min_epsilon1);
    agg["min_epsilon1_k"] = rep.min_epsilon1_k;
    agg["max_bound1"] = detail::sig6(rep.max_bound1);
    agg["max_bound1_k"] = rep.max_bound1_k;
    agg["nm_cutoff"] = rep.nm_cutoff;
  }
  if (!rep.stage2.empty()) {
    agg["gap_max"] = rep.gap_max;
    agg["stage2_form"] = "normalized";
    agg["stage2_failures"] = rep.stage2_failures;
    agg["stage2_advanced"] = rep.stage2_advanced;
    if (rep.max_bound2 > 0) {
      agg["min_epsilon2"] = detail::lower_sci(rep.min_epsilon2);
      agg["min_epsilon2_k"] = rep.min_epsilon2_k;
      agg["min_epsilon2_gap"] = rep.min_epsilon2_gap;
      agg["max_bound2"] = detail::sig6(rep.max_bound2);
      agg["max_bound2_k"] = rep.max_bound2_k;
      agg["max_bound2_gap"] = rep.max_bound2_gap;
      agg["n_cutoff"] = rep.n_cutoff;
    }
  }
  detail::emit(out, agg);
  return rep.ok() ? kOk : kComputation;
}

inline void check_k2(const RunConfig& cfg, const char* command) {
  if (cfg.k_min < 3 && !cfg.allow_k2) {
    throw UsageError(std::string(command) + " with k = 2 needs --allow-k2");
  }
}

inline void write_csv(const std::string& path, const std::vector<Solution>& sols) {
  std::ofstream csv(path, std::ios::trunc);
  if (!csv) throw UsageError("cannot write " + path);
  csv << "k,n,m,t\n";
  for (const auto& s : sols) csv << s.k << ',' << s.n << ',' << s.m << ',' << s.t << '\n';
}

inline detail::Json theorem1_json(const SearchReport& rep) {
  return detail::Json{{"record", "theorem1"},
                      {"k_min", rep.k_min},
                      {"k_max", rep.k_max},
                      {"n_max", rep.n_max},
                      {"solutions", rep.solutions.size()},
                      {"probes", rep.probes},
                      {"violations", rep.violations.size()},
                      {"mixed_violations", rep.mixed_violations.size()}};
}

inline int cmd_search(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  check_k2(cfg, "search");
  const SearchReport rep = verify_theorem1(cfg.k_min, cfg.k_max, cfg.n_max, cfg.worker_count);
  for (const auto& s : rep.solutions) detail::emit(out, detail::solution_json(s));
  for (const auto& s : rep.violations) {
    auto j = detail::solution_json(s);
    j["record"] = "violation";
    detail::emit(out, j);
  }
  detail::emit(out, theorem1_json(rep));
  if (!cfg.csv_path.empty()) write_csv(cfg.csv_path, rep.solutions);
  err << "search: " << rep.solutions.size() << " solutions in " << rep.elapsed_seconds << " s\n";
  return rep.ok() ? kOk : kFalsified;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  check_k2(cfg, "verify");
  using detail::Json;
  const SearchReport t1 = verify_theorem1(cfg.k_min, cfg.k_max, cfg.n_max, cfg.worker_count);
  bool falsified = !t1.ok();
  for (const auto& s : t1.violations) {
    auto j = detail::solution_json(s);
    j["record"] = "violation";
    detail::emit(out, j);
  }
  for (const auto& s : t1.mixed_violations) {
    auto j = detail::solution_json(s);
    j["record"] = "mixed_violation";
    detail::emit(out, j);
  }
  detail::emit(out, theorem1_json(t1));

  // Theorem 2 case checks.
  const int k2_min = std::max(3, cfg.k_min);
  long pairs = 0, low = 0, high = 0, identity = 0;
  for (int k = k2_min; k <= cfg.k_max; ++k) {
    const Theorem2Report r = verify_theorem2_cases(k);
    pairs += r.pairs_checked;
    low += static_cast<long>(r.low_block.size());
    high += static_cast<long>(r.high_block.size());
    identity += static_cast<long>(r.identity_hits.size());
  }
  if (k2_min <= cfg.k_max) {
    detail::emit(out, Json{{"record", "theorem2"},
                           {"k_min", k2_min},
                           {"k_max", cfg.k_max},
                           {"pairs_checked", pairs},
                           {"low_block_hits", low},
                           {"high_block_hits", high},
                           {"identity_hits", identity}});
    falsified = falsified || low || high || identity;
  }

  // Family members must verify and, when in range, appear in the search.
  long members = 0, failed = 0, missing = 0;
  for (int s = 1; s <= cfg.s_max; ++s) {
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
      const auto fm = family_member(s, k);
      if (!fm) continue;
      ++members;
      if (!fm->verified) ++failed;
      if (fm->solution.n <= cfg.n_max &&
          !std::binary_search(t1.solutions.begin(), t1.solutions.end(), fm->solution)) {
        ++missing;
      }
    }
  }
  detail::emit(out, Json{{"record", "family"},
                         {"s_max", cfg.s_max},
                         {"members", members},
                         {"unverified", failed},
                         {"missing_from_search", missing}});
  falsified = falsified || failed || missing;
  err << "verify: theorem 1 search took " << t1.elapsed_seconds << " s\n";
  return falsified ? kFalsified : kOk;
}

inline int cmd_family(const RunConfig& cfg, std::ostream& out) {
  bool bad = false;
  for (int s = 1; s <= cfg.s_max; ++s) {
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
      const auto fm = family_member(s, k);
      if (!fm) continue;
      auto j = detail::solution_json(fm->solution);
      j["record"] = "family";
      j["s"] = s;
      j["verified"] = fm->verified;
      detail::emit(out, j);
      bad = bad || !fm->verified;
    }
  }
  return bad ? kFalsified : kOk;
}

inline int cmd_bounds(const RunConfig& cfg, std::ostream& out) {
  if (cfg.k_min < 3) throw UsageError("bounds needs k >= 3");
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    const long double mk = absolute_n_bound(k);
    const auto [h1, h2] = height_bounds(k, 1);
    detail::emit(out, detail::Json{{"record", "bounds"},
                                   {"k", k},
                                   {"M_k", detail::sig6(static_cast<double>(mk))},
                                   {"M_k_ceil", absolute_n_bound_ceil(k).get_str()},
                                   {"six_M_k", detail::sig6(static_cast<double>(6 * mk))},
                                   {"nm_gap_bound_at_M_k", detail::sig6(static_cast<double>(nm_gap_bound(k, mk)))},
                                   {"height_A3_first", detail::sig6(static_cast<double>(h1))},
                                   {"height_A3_second_gap1", detail::sig6(static_cast<double>(h2))},
                                   {"below_2_pow_half_k", std::log(mk) < 0.5L * k * std::log(2.0L)}});
  }
  detail::emit(out, detail::Json{{"record", "crossover"},
                                 {"k_limit", cfg.k_max},
                                 {"k0", exponential_crossover(cfg.k_max)}});
  return kOk;
}

// ---------------------------------------------------------------------------

/// Parses `args` (without the program name) into an invocation. Precedence:
/// flags, then KBB_* variables, then the --config/KBB_CONFIG JSON file, then
/// built-in defaults. --full only moves defaults, so explicit ranges win.
inline std::optional<Invocation> parse(std::vector<std::string> args, const EnvLookup& env, std::ostream& out,
                                       std::ostream& err, int& exit_code) {
  CLI::App app{"k-bonacci sums equal to powers of two: search, reduction and verification", "kbpow"};
  app.require_subcommand(1);
  detail::Layer flags;
  std::string config_path;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"seq", "print F_n for n in [1, n-max] with closed-form checks (CSV)"},
      {"root", "certified dominant root alpha and g(alpha, k)"},
      {"cf", "continued fraction of gamma_k = log 2 / log alpha"},
      {"reduce", "stage-1 and stage-2 reduction over the k range"},
      {"search", "exhaustive search up to n-max"},
      {"verify", "search plus the theorem 2 case checks and family"},
      {"family", "list the (2^s+k, 2^s+s-1, 2^s+k-2, k) family"},
      {"bounds", "absolute bounds M_k and the 2^(k/2) crossover"}};
  const std::map<std::string, std::string> help = {
      {"k", "single order (sets k-min and k-max)"},
      {"k-min", "smallest order"},
      {"k-max", "largest order"},
      {"n-max", "largest index searched or printed"},
      {"precision-bits", "starting working precision"},
      {"convergent-index", "convergent used by the reduction, counting a_0 as the first"},
      {"workers", "worker threads"},
      {"cache-dir", "directory for cached roots and convergents"},
      {"output", "write records here instead of stdout"},
      {"csv", "also write solutions as CSV (search)"},
      {"full", "paper-scale defaults: k in [3, 321], n-max 2265"},
      {"allow-k2", "permit k = 2 in search and verify"},
      {"s-max", "largest family parameter s"},
      {"gap-max", "largest n - m in stage 2 (0 = stage-1 cutoff)"}};

  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    for (const auto& setting : detail::setting_names()) {
      const std::string flag = "--" + setting;
      if (detail::flag_names().count(setting)) {
        sub->add_flag_callback(flag, [&flags, setting] { flags[setting] = "true"; }, help.at(setting));
      } else {
        sub->add_option_function<std::string>(
            flag, [&flags, setting](const std::string& v) { flags[setting] = v; }, help.at(setting));
      }
    }
    sub->add_option("--config", config_path, "JSON file of settings (keys like k_min, n_max)");
  }

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    exit_code = kOk;
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      exit_code = kOk;
      return std::nullopt;
    }
    // Subcommand help arrives as CallForHelp too; everything else is misuse.
    err << "kbpow: " << e.what() << "\nRun with --help for usage.\n";
    exit_code = kUsage;
    return std::nullopt;
  }

  Invocation inv;
  inv.command = app.get_subcommands().front()->get_name();
  if (config_path.empty()) {
    if (auto v = env("KBB_CONFIG")) config_path = *v;
  }
  std::set<std::string> seen;
  if (!config_path.empty()) detail::apply_layer(inv.config, detail::config_layer(config_path), seen);
  detail::apply_layer(inv.config, detail::env_layer(env), seen);
  detail::apply_layer(inv.config, flags, seen);
  if (inv.config.full_scale) {
    if (!seen.count("k-min")) inv.config.k_min = 3;
    if (!seen.count("k-max")) inv.config.k_max = 321;
    if (!seen.count("n-max")) inv.config.n_max = 2265;
  }
  inv.config.validate();
  return inv;
}

/// Runs one command line. Returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               const EnvLookup& env = process_env) {
  int code = kOk;
  std::optional<Invocation> inv;
  try {
    inv = parse(args, env, out, err, code);
  } catch (const UsageError& e) {
    err << "kbpow: " << e.what() << '\n';
    return kUsage;
  }
  if (!inv) return code;

  std::ofstream file;
  if (!inv->config.output_path.empty()) {
    file.open(inv->config.output_path, std::ios::trunc);
    if (!file) {
      err << "kbpow: cannot write " << inv->config.output_path << '\n';
      return kUsage;
    }
  }
  std::ostream& sink = file.is_open() ? static_cast<std::ostream&>(file) : out;
  const RunConfig& cfg = inv->config;
  const auto start = std::chrono::steady_clock::now();
  try {
    const std::string& c = inv->command;
    if (c == "seq") code = cmd_seq(cfg, sink);
    else if (c == "root") code = cmd_root(cfg, sink);
    else if (c == "cf") code = cmd_cf(cfg, sink);
    else if (c == "reduce") code = cmd_reduce(cfg, sink);
    else if (c == "search") code = cmd_search(cfg, sink, err);
    else if (c == "verify") code = cmd_verify(cfg, sink, err);
    else if (c == "family") code = cmd_family(cfg, sink);
    else if (c == "bounds") code = cmd_bounds(cfg, sink);
  } catch (const UsageError& e) {
    err << "kbpow: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "kbpow: " << e.what() << '\n';
    return kUsage;
  } catch (const CertificationError& e) {
    err << "kbpow: computation failed: " << e.what() << '\n';
    return kComputation;
  } catch (const std::exception& e) {
    err << "kbpow: computation failed: " << e.what() << '\n';
    return kComputation;
  }
  sink.flush();
  err << "kbpow " << inv->command << ": "
      << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s\n";
  return code;
}

}  // namespace kbpow::cli
