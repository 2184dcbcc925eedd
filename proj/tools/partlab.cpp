// partlab: partition-function laboratory.
//
// Subcommands: eval, trace, derive, verify, mine, bench, selftest.
// Every command is deterministic; --format machine switches the report to
// line-delimited JSON with a stable field order. Exit codes: 0 success,
// 1 verification failure, 2 usage error, 3 resource limit exceeded.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "partlab/errors.hpp"
#include "partlab/generator.hpp"
#include "partlab/limits.hpp"
#include "partlab/oracle.hpp"
#include "partlab/recurrence.hpp"
#include "partlab/selftest.hpp"
#include "partlab/symbolic.hpp"

namespace {

using partlab::CatalogEntry;
using partlab::Int;
using partlab::Limits;
using partlab::PartitionTable;
using partlab::Recurrence;
using partlab::ResourceLimitError;
using partlab::TailVariant;
using partlab::VerificationReport;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResourceLimit = 3;

struct GlobalOptions {
  std::string format = "text";
  Limits limits;

  bool machine() const { return format == "machine"; }
};

long parse_long(const std::string& text) {
  try {
    size_t used = 0;
    const long value = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw std::invalid_argument("not an integer: '" + text + "'");
  }
}

// "12..24" (inclusive range), or a comma list "12,15,20", or one number.
std::vector<long> parse_caps(const std::string& spec) {
  std::vector<long> caps;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const long lo = parse_long(spec.substr(0, dots));
    const long hi = parse_long(spec.substr(dots + 2));
    if (lo > hi) {
      throw std::invalid_argument("empty cap range: '" + spec + "'");
    }
    for (long cap = lo; cap <= hi; ++cap) caps.push_back(cap);
    return caps;
  }
  std::istringstream stream(spec);
  std::string item;
  while (std::getline(stream, item, ',')) {
    caps.push_back(parse_long(item));
  }
  if (caps.empty()) {
    throw std::invalid_argument("no caps in '" + spec + "'");
  }
  return caps;
}

std::vector<long> parse_sizes(const std::string& spec) {
  std::vector<long> sizes;
  if (spec.empty()) return sizes;
  std::istringstream stream(spec);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const long n = parse_long(item);
    if (n < 0) throw std::invalid_argument("sizes must be nonnegative");
    sizes.push_back(n);
  }
  return sizes;
}

// ---------------------------------------------------------------------------
// eval

int run_eval(long n, const GlobalOptions& g) {
  const Int fractal = partlab::fractal_p(n, g.limits);
  const Int direct = partlab::build_table(n, g.limits).at(n);
  const Int series = partlab::build_table_pentagonal(n, g.limits).at(n);
  const bool agree = fractal == direct && fractal == series;

  if (g.machine()) {
    ordered_json record;
    record["command"] = "eval";
    record["n"] = n;
    record["fractal"] = partlab::to_decimal(fractal);
    record["direct"] = partlab::to_decimal(direct);
    record["series"] = partlab::to_decimal(series);
    record["agree"] = agree;
    std::cout << record.dump() << "\n";
  } else {
    std::cout << "n: " << n << "\n";
    std::cout << "fractal: " << fractal << "\n";
    std::cout << "direct: " << direct << "\n";
    std::cout << "series: " << series << "\n";
    std::cout << "agree: " << (agree ? "yes" : "NO") << "\n";
  }
  return agree ? kExitOk : kExitVerificationFailure;
}

// ---------------------------------------------------------------------------
// trace

int run_trace(long n, const std::string& tail, const GlobalOptions& g) {
  const TailVariant variant = partlab::tail_variant_from_string(tail);
  const partlab::TraceDocument doc = partlab::build_trace(n, variant, g.limits);
  if (g.machine()) {
    std::cout << partlab::trace_to_json(doc) << "\n";
  } else {
    std::cout << partlab::render_trace(doc);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// derive / verify

void print_report_text(const Recurrence& rec, const VerificationReport& report) {
  std::cout << partlab::render_recurrence(rec) << "\n";
  std::cout << "claimed: [" << rec.rhs.lo << ", " << rec.rhs.hi << "] ";
  if (report.claimed_ok) {
    std::cout << "ok\n";
  } else if (report.first_fail &&
             report.first_fail->n <= std::min(report.window_hi, rec.rhs.hi)) {
    const auto& f = *report.first_fail;
    std::cout << "FAILS at n = " << f.n << " (p(n) = " << f.lhs << ", rhs "
              << f.rhs << ")\n";
  } else {
    std::cout << "FAILS\n";
  }
  if (report.pass_hi >= report.pass_lo) {
    std::cout << "pass range: [" << report.pass_lo << ", " << report.pass_hi
              << "] within scan [" << report.window_lo << ", "
              << report.window_hi << "]\n";
  } else {
    std::cout << "pass range: empty within scan [" << report.window_lo << ", "
              << report.window_hi << "]\n";
  }
  if (report.first_fail) {
    const auto& f = *report.first_fail;
    std::cout << "first failure: n = " << f.n << " (p(n) = " << f.lhs
              << ", rhs " << f.rhs << ")\n";
  } else {
    std::cout << "first failure: none up to " << report.window_hi << "\n";
  }
}

ordered_json report_json(const Recurrence& rec,
                         const VerificationReport& report) {
  ordered_json record;
  record["command"] = "verify";
  record["key"] = partlab::canonical_key(rec.rhs);
  record["claimed"] = {rec.rhs.lo, rec.rhs.hi};
  record["claimed_ok"] = report.claimed_ok;
  record["window"] = {report.window_lo, report.window_hi};
  if (report.pass_hi >= report.pass_lo) {
    record["pass"] = {report.pass_lo, report.pass_hi};
  } else {
    record["pass"] = nullptr;
  }
  if (report.first_fail) {
    record["first_fail"] = {{"n", report.first_fail->n},
                            {"lhs", partlab::to_decimal(report.first_fail->lhs)},
                            {"rhs", partlab::to_decimal(report.first_fail->rhs)}};
  } else {
    record["first_fail"] = nullptr;
  }
  return record;
}

int run_derive(long cap, const std::string& pn, const std::string& pn1,
               long to, bool to_given, const GlobalOptions& g) {
  const TailVariant v_pn = partlab::tail_variant_from_string(pn);
  const TailVariant v_pn1 = partlab::tail_variant_from_string(pn1);
  if (!to_given) {
    to = std::min(std::max(40L, cap + 16), g.limits.max_scan);
  }
  if (to > g.limits.max_scan) {
    throw ResourceLimitError("derive: --to " + std::to_string(to) +
                             " exceeds the scan limit of " +
                             std::to_string(g.limits.max_scan));
  }
  const Recurrence rec = partlab::derive_recurrence(cap, v_pn, v_pn1);
  if (to < cap) {
    throw std::invalid_argument("derive: --to must be at least the cap");
  }
  const PartitionTable table = partlab::build_table(to, g.limits);
  const VerificationReport report = partlab::verify(rec, 0, to, table);

  CatalogEntry entry;
  entry.rec = rec;
  entry.key = partlab::canonical_key(rec.rhs);
  entry.empirical_lo = report.pass_lo;
  entry.empirical_hi = report.pass_hi;
  entry.classification = partlab::classify_pentagonal(rec);

  if (g.machine()) {
    std::cout << partlab::catalog_record(entry) << "\n";
  } else {
    print_report_text(rec, report);
    std::cout << "classification: " << partlab::to_string(entry.classification)
              << "\n";
    std::cout << "key: " << entry.key << "\n";
  }
  return report.claimed_ok ? kExitOk : kExitVerificationFailure;
}

int run_verify(const std::string& file, const std::string& rhs, bool rhs_given,
               const std::string& tail_even, const std::string& tail_odd,
               long lo, long hi, bool hi_given, long to,
               const GlobalOptions& g) {
  std::vector<Recurrence> recurrences;
  if (!file.empty() && rhs_given) {
    throw std::invalid_argument("verify: pass --file or --rhs, not both");
  }
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) {
      throw std::invalid_argument("verify: cannot open '" + file + "'");
    }
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      recurrences.push_back(partlab::catalog_entry_from_json(line).rec);
    }
    if (recurrences.empty()) {
      throw std::invalid_argument("verify: no records in '" + file + "'");
    }
  } else if (rhs_given) {
    if (!hi_given) {
      throw std::invalid_argument(
          "verify: inline input requires --hi (claimed upper bound)");
    }
    recurrences.push_back(partlab::recurrence_from_coeff_spec(
        rhs, tail_even, tail_odd, lo, hi));
  } else {
    throw std::invalid_argument("verify: needs --file or --rhs");
  }

  if (to > g.limits.max_scan) {
    throw ResourceLimitError("verify: --to " + std::to_string(to) +
                             " exceeds the scan limit of " +
                             std::to_string(g.limits.max_scan));
  }
  const PartitionTable table = partlab::build_table(to, g.limits);

  long passing = 0;
  bool first = true;
  for (const Recurrence& rec : recurrences) {
    const VerificationReport report = partlab::verify(rec, 0, to, table);
    if (report.claimed_ok) ++passing;
    if (g.machine()) {
      std::cout << report_json(rec, report).dump() << "\n";
    } else {
      if (!first) std::cout << "\n";
      print_report_text(rec, report);
    }
    first = false;
  }
  if (!g.machine() && recurrences.size() > 1) {
    std::cout << "\n" << passing << " of " << recurrences.size()
              << " pass their claimed ranges\n";
  }
  return passing == static_cast<long>(recurrences.size())
             ? kExitOk
             : kExitVerificationFailure;
}

// ---------------------------------------------------------------------------
// mine

int run_mine(const std::string& caps_spec, long to,
             const std::string& catalog_path, const GlobalOptions& g) {
  const std::vector<long> caps = parse_caps(caps_spec);
  const partlab::MiningResult result =
      partlab::mine(caps, partlab::all_variant_pairs(), to, g.limits);

  if (!catalog_path.empty()) {
    std::ofstream out(catalog_path);
    if (!out) {
      throw std::invalid_argument("mine: cannot write '" + catalog_path + "'");
    }
    for (const CatalogEntry& entry : result.entries) {
      out << partlab::catalog_record(entry) << "\n";
    }
  }

  if (g.machine()) {
    for (const CatalogEntry& entry : result.entries) {
      std::cout << partlab::catalog_record(entry) << "\n";
    }
    ordered_json summary;
    summary["summary"] = true;
    summary["jobs"] = result.jobs;
    summary["distinct"] = static_cast<long>(result.entries.size());
    summary["anomalies"] = static_cast<long>(result.anomalies.size());
    summary["errors"] = static_cast<long>(result.errors.size());
    std::cout << summary.dump() << "\n";
  } else {
    std::cout << "jobs: " << result.jobs << "\n";
    std::cout << "distinct: " << result.entries.size() << "\n";
    std::cout << "anomalies: " << result.anomalies.size() << "\n";
    std::cout << "errors: " << result.errors.size() << "\n";
    for (const auto& anomaly : result.anomalies) {
      std::cout << "anomaly: cap " << anomaly.provenance.cap << " "
                << partlab::to_string(anomaly.provenance.v_pn) << "/"
                << partlab::to_string(anomaly.provenance.v_pn1)
                << " fails at n = " << anomaly.n << " (p(n) = " << anomaly.lhs
                << ", rhs " << anomaly.rhs << ")\n";
    }
    for (const std::string& error : result.errors) {
      std::cout << "error: " << error << "\n";
    }
    for (const CatalogEntry& entry : result.entries) {
      std::cout << partlab::to_string(entry.classification) << "  claimed ["
                << entry.rec.rhs.lo << ", " << entry.rec.rhs.hi
                << "]  empirical [" << entry.empirical_lo << ", "
                << entry.empirical_hi << "]  "
                << partlab::render_recurrence(entry.rec) << "\n";
    }
  }
  if (!result.anomalies.empty()) return kExitVerificationFailure;
  if (!result.errors.empty()) return kExitUsage;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

long long g_alloc_current = 0;
long long g_alloc_peak = 0;
void* (*g_base_alloc)(size_t) = nullptr;
void* (*g_base_realloc)(void*, size_t, size_t) = nullptr;
void (*g_base_free)(void*, size_t) = nullptr;

void* counting_alloc(size_t size) {
  g_alloc_current += static_cast<long long>(size);
  if (g_alloc_current > g_alloc_peak) g_alloc_peak = g_alloc_current;
  return g_base_alloc(size);
}

void* counting_realloc(void* ptr, size_t old_size, size_t new_size) {
  g_alloc_current += static_cast<long long>(new_size) -
                     static_cast<long long>(old_size);
  if (g_alloc_current > g_alloc_peak) g_alloc_peak = g_alloc_current;
  return g_base_realloc(ptr, old_size, new_size);
}

void counting_free(void* ptr, size_t size) {
  g_alloc_current -= static_cast<long long>(size);
  g_base_free(ptr, size);
}

// Installs GMP allocation hooks that track the bignum arena high-water mark.
// The hooks chain to the original allocator, so blocks allocated before the
// switch are still freed correctly; accounting is process-global, which is
// fine for the single-threaded sequential bench runs.
void install_alloc_counters() {
  static bool installed = false;
  if (installed) return;
  mp_get_memory_functions(&g_base_alloc, &g_base_realloc, &g_base_free);
  mp_set_memory_functions(counting_alloc, counting_realloc, counting_free);
  installed = true;
}

struct BenchRow {
  std::string method;
  Int value;
  long ms = 0;
  long long peak_bytes = 0;
};

template <typename F>
BenchRow bench_run(const std::string& method, F&& compute) {
  BenchRow row;
  row.method = method;
  const long long base = g_alloc_current;
  g_alloc_peak = g_alloc_current;
  const auto start = std::chrono::steady_clock::now();
  row.value = compute();
  row.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
               .count();
  row.peak_bytes = g_alloc_peak - base;
  return row;
}

int run_bench(const std::string& sizes_spec, bool skip_fractal,
              const GlobalOptions& g) {
  const std::vector<long> sizes = parse_sizes(sizes_spec);
  install_alloc_counters();

  if (!g.machine()) {
    std::cout << "n\tmethod\tms\tpeak_bytes\tvalue\n";
  }
  bool all_agree = true;
  for (long n : sizes) {
    std::vector<BenchRow> rows;
    rows.push_back(bench_run("direct", [&] {
      return partlab::build_table(n, g.limits).at(n);
    }));
    rows.push_back(bench_run("series", [&] {
      return partlab::build_table_pentagonal(n, g.limits).at(n);
    }));
    if (!skip_fractal) {
      rows.push_back(bench_run("fractal", [&] {
        return partlab::fractal_p(n, g.limits);
      }));
    }
    bool agree = true;
    for (const BenchRow& row : rows) {
      if (row.value != rows.front().value) agree = false;
    }
    all_agree = all_agree && agree;
    for (const BenchRow& row : rows) {
      if (g.machine()) {
        ordered_json record;
        record["command"] = "bench";
        record["n"] = n;
        record["method"] = row.method;
        record["ms"] = row.ms;
        record["peak_bytes"] = row.peak_bytes;
        record["value"] = partlab::to_decimal(row.value);
        record["agree"] = agree;
        std::cout << record.dump() << "\n";
      } else {
        std::cout << n << "\t" << row.method << "\t" << row.ms << "\t"
                  << row.peak_bytes << "\t" << row.value << "\n";
      }
    }
    if (!agree) {
      std::cerr << "error: methods disagree at n = " << n << "\n";
    }
  }
  return all_agree ? kExitOk : kExitVerificationFailure;
}

// ---------------------------------------------------------------------------
// selftest

int run_selftest(bool mutate, const GlobalOptions& g) {
  partlab::SelftestOptions options;
  options.mutate_generator = mutate;
  const std::vector<partlab::CheckResult> results =
      partlab::run_acceptance_checks(options);

  long failed = 0;
  std::vector<std::string> failing_ids;
  for (const auto& result : results) {
    if (!result.pass) {
      ++failed;
      failing_ids.push_back(result.id);
    }
  }

  if (g.machine()) {
    for (const auto& result : results) {
      ordered_json record;
      record["id"] = result.id;
      record["label"] = result.label;
      record["pass"] = result.pass;
      record["detail"] = result.detail;
      std::cout << record.dump() << "\n";
    }
    ordered_json summary;
    summary["summary"] = true;
    summary["total"] = static_cast<long>(results.size());
    summary["passed"] = static_cast<long>(results.size()) - failed;
    summary["failed"] = failed;
    summary["failing"] = failing_ids;
    std::cout << summary.dump() << "\n";
  } else {
    for (const auto& result : results) {
      std::cout << (result.pass ? "ok " : "FAIL ") << result.id << " - "
                << result.label << "\n";
      if (!result.pass && !result.detail.empty()) {
        std::istringstream lines(result.detail);
        std::string line;
        while (std::getline(lines, line)) {
          std::cout << "    " << line << "\n";
        }
      }
    }
    if (failed == 0) {
      std::cout << "all " << results.size() << " criteria pass\n";
    } else {
      std::cout << results.size() - failed << " of " << results.size()
                << " criteria pass; failing:";
      for (const std::string& id : failing_ids) std::cout << " " << id;
      std::cout << "\n";
    }
  }
  return failed == 0 ? kExitOk : kExitVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOptions g;
  g.limits = partlab::limits_from_env();

  CLI::App app{
      "partition function laboratory: fractal evaluation, expansion traces, "
      "recurrence derivation, verification, and mining"};
  app.require_subcommand(1);
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"text", "machine"}))
      ->capture_default_str();

  std::function<int()> action;

  // eval
  long eval_n = 0;
  CLI::App* eval = app.add_subcommand(
      "eval", "compute p(n) three ways and check agreement");
  eval->fallthrough();
  eval->add_option("n", eval_n, "index to evaluate")
      ->required()
      ->check(CLI::NonNegativeNumber);
  eval->callback([&] { action = [&] { return run_eval(eval_n, g); }; });

  // trace
  long trace_n = 0;
  std::string trace_tail = "none";
  CLI::App* trace = app.add_subcommand(
      "trace", "render the fully expanded decomposition of p(n)");
  trace->fallthrough();
  trace->add_option("n", trace_n, "index to expand")
      ->required()
      ->check(CLI::NonNegativeNumber);
  trace->add_option("--tail", trace_tail,
                    "top-term substitution: none, one, or two")
      ->check(CLI::IsMember({"none", "one", "two"}))
      ->capture_default_str();
  trace->callback(
      [&] { action = [&] { return run_trace(trace_n, trace_tail, g); }; });

  // derive
  long derive_cap = 0;
  std::string derive_pn = "none";
  std::string derive_pn1 = "none";
  long derive_to = 0;
  CLI::App* derive = app.add_subcommand(
      "derive", "derive a recurrence by differencing two expansions");
  derive->fallthrough();
  derive->add_option("--cap", derive_cap, "truncation cap (>= 3)")->required();
  derive->add_option("--pn", derive_pn, "tail variant for the p(n) expansion")
      ->check(CLI::IsMember({"none", "one", "two"}))
      ->capture_default_str();
  derive->add_option("--pn1", derive_pn1,
                     "tail variant for the p(n-1) expansion")
      ->check(CLI::IsMember({"none", "one", "two"}))
      ->capture_default_str();
  derive->add_option("--to", derive_to,
                     "oracle scan bound (default max(40, cap + 16))");
  derive->callback([&] {
    const bool to_given = derive->count("--to") > 0;
    action = [&, to_given] {
      return run_derive(derive_cap, derive_pn, derive_pn1, derive_to, to_given,
                        g);
    };
  });

  // verify
  std::string verify_file;
  std::string verify_rhs;
  std::string verify_tail_even;
  std::string verify_tail_odd;
  long verify_lo = 2;
  long verify_hi = 0;
  long verify_to = 40;
  CLI::App* verify = app.add_subcommand(
      "verify", "scan recurrences against the oracle table");
  verify->fallthrough();
  verify->add_option("--file", verify_file,
                     "line-delimited catalog records to verify");
  verify->add_option("--rhs", verify_rhs,
                     "inline coefficients, e.g. 1:1,2:1,5:-1,7:-1,12:1");
  verify->add_option("--tail-even", verify_tail_even,
                     "even-branch tail c0,c1 (rationals)");
  verify->add_option("--tail-odd", verify_tail_odd,
                     "odd-branch tail c0,c1 (rationals)");
  verify->add_option("--lo", verify_lo, "claimed lower bound")
      ->capture_default_str();
  verify->add_option("--hi", verify_hi, "claimed upper bound");
  verify->add_option("--to", verify_to, "oracle scan bound")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  verify->callback([&] {
    const bool rhs_given = verify->count("--rhs") > 0;
    const bool hi_given = verify->count("--hi") > 0;
    action = [&, rhs_given, hi_given] {
      return run_verify(verify_file, verify_rhs, rhs_given, verify_tail_even,
                        verify_tail_odd, verify_lo, verify_hi, hi_given,
                        verify_to, g);
    };
  });

  // mine
  std::string mine_caps = "12..24";
  long mine_to = 60;
  std::string mine_catalog;
  CLI::App* mine = app.add_subcommand(
      "mine", "derive across caps and variant pairs, deduplicate, classify");
  mine->fallthrough();
  mine->add_option("--caps", mine_caps, "caps: lo..hi or a comma list")
      ->capture_default_str();
  mine->add_option("--to", mine_to, "oracle scan bound")
      ->capture_default_str();
  mine->add_option("--catalog", mine_catalog,
                   "write the catalog to this file (one record per line)");
  mine->callback([&] {
    action = [&] { return run_mine(mine_caps, mine_to, mine_catalog, g); };
  });

  // bench
  std::string bench_sizes = "100,500,1000";
  bool bench_skip_fractal = false;
  CLI::App* bench = app.add_subcommand(
      "bench", "time the three evaluation methods and report peak "
               "bignum allocation");
  bench->fallthrough();
  bench->add_option("--sizes", bench_sizes, "comma list of n values")
      ->capture_default_str();
  bench->add_flag("--skip-fractal", bench_skip_fractal,
                  "run only the two table constructions");
  bench->callback([&] {
    action = [&] { return run_bench(bench_sizes, bench_skip_fractal, g); };
  });

  // selftest
  bool selftest_mutate = false;
  CLI::App* selftest = app.add_subcommand(
      "selftest", "run the acceptance criteria and report each verdict");
  selftest->fallthrough();
  selftest
      ->add_flag("--mutate-generator", selftest_mutate,
                 "corrupt the child-count rule to prove the suite notices")
      ->group("");
  selftest->callback(
      [&] { action = [&] { return run_selftest(selftest_mutate, g); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action();
  } catch (const ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResourceLimit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
