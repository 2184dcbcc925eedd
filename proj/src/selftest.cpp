#include "partlab/selftest.hpp"

#include <chrono>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "partlab/generator.hpp"
#include "partlab/oracle.hpp"
#include "partlab/recurrence.hpp"
#include "partlab/symbolic.hpp"

namespace partlab {

namespace {

using Clock = std::chrono::steady_clock;

long elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               start)
      .count();
}

// Accumulates sub-check outcomes for one criterion.
struct Collector {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& message) {
    pass = false;
    detail << "fail: " << message << '\n';
  }
  void note(const std::string& message) { detail << message << '\n'; }
  void require(bool ok, const std::string& message) {
    if (!ok) fail(message);
  }
};

CheckResult finish(const std::string& id, const std::string& label,
                   Collector& c, Clock::time_point start, long budget_ms) {
  CheckResult result;
  result.id = id;
  result.label = label;
  result.millis = elapsed_ms(start);
  if (budget_ms > 0 && result.millis > budget_ms) {
    c.fail("runtime " + std::to_string(result.millis) +
           " ms exceeds the budget of " + std::to_string(budget_ms) + " ms");
  }
  result.pass = c.pass;
  std::string text = c.detail.str();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  result.detail = std::move(text);
  return result;
}

// The five pinned derivations: parameters, the frozen reference coefficient
// set each must reproduce, and (where pinned) the first failure an oracle
// scan to 40 must find beyond the claimed range.
struct PinnedRecurrence {
  std::string name;
  long cap;
  TailVariant v_pn;
  TailVariant v_pn1;
  Recurrence reference;
  std::optional<long> expected_first_fail;
};

std::vector<PinnedRecurrence> pinned_recurrences() {
  std::vector<PinnedRecurrence> out;
  out.push_back({"derive(12, one, one)", 12, TailVariant::OneSub,
                 TailVariant::OneSub,
                 recurrence_from_coeff_spec("1:1,2:1,5:-1,7:-1,12:1", "0,0",
                                            "0,0", 2, 12),
                 15});
  out.push_back(
      {"derive(24, one, one)", 24, TailVariant::OneSub, TailVariant::OneSub,
       recurrence_from_coeff_spec("1:1,2:1,5:-1,7:-1,12:1,15:1,22:-1", "0,0",
                                  "0,0", 2, 24),
       26});
  out.push_back(
      {"derive(24, none, none)", 24, TailVariant::Full, TailVariant::Full,
       recurrence_from_coeff_spec(
           "1:2,3:-1,5:-1,6:1,7:-1,8:1,12:1,13:-1,15:1,16:-1,24:-1", "0,0",
           "0,0", 2, 24),
       std::nullopt});
  out.push_back(
      {"derive(24, two, one)", 24, TailVariant::TwoSub, TailVariant::OneSub,
       recurrence_from_coeff_spec(
           "1:1,6:1,8:1,11:-1,13:-2,14:-1,15:-1,16:-1,17:-1,20:1,21:1,22:1,"
           "23:2,24:2",
           "0,1/2", "-1/2,1/2", 2, 24),
       std::nullopt});
  out.push_back(
      {"derive(24, two, two)", 24, TailVariant::TwoSub, TailVariant::TwoSub,
       recurrence_from_coeff_spec(
           "1:1,3:1,7:-1,9:-1,11:-1,12:1,13:-1,14:1,16:1,18:1,20:1", "1,0",
           "0,0", 2, 24),
       std::nullopt});
  return out;
}

CheckResult check_point_values(int bias) {
  const auto start = Clock::now();
  Collector c;

  const std::vector<Int> fractal = fractal_values(300, Limits{}, bias);
  const struct {
    long n;
    long expected;
  } spots[] = {{10, 42}, {11, 56}, {12, 77}};
  for (const auto& spot : spots) {
    if (fractal[static_cast<size_t>(spot.n)] != spot.expected) {
      c.fail("p(" + std::to_string(spot.n) + ") = " +
             to_decimal(fractal[static_cast<size_t>(spot.n)]) +
             ", expected " + std::to_string(spot.expected));
    }
  }
  if (c.pass) c.note("p(10) = 42, p(11) = 56, p(12) = 77");

  const PartitionTable direct = build_table(300);
  const PartitionTable series = build_table_pentagonal(300);
  long disagreements = 0;
  for (long n = 0; n <= 300; ++n) {
    const Int& f = fractal[static_cast<size_t>(n)];
    if (f != direct.at(n) || f != series.at(n)) {
      if (disagreements == 0) {
        c.fail("first disagreement at n = " + std::to_string(n) +
               ": fractal " + to_decimal(f) + ", direct " +
               to_decimal(direct.at(n)) + ", series " +
               to_decimal(series.at(n)));
      }
      ++disagreements;
    }
  }
  if (disagreements == 0) {
    c.note("fractal evaluation matches both oracles for 0 <= n <= 300");
  } else {
    c.note(std::to_string(disagreements) + " of 301 values disagree");
  }
  return finish("1", "point values and oracle agreement to 300", c, start,
                5000);
}

CheckResult check_parcel_semantics(int bias) {
  const auto start = Clock::now();
  Collector c;

  const PartitionTable table = build_table(60);
  ParcelEvaluator evaluator(table, bias);
  long checked = 0;
  long disagreements = 0;
  for (long head = 1; head <= 60; ++head) {
    for (long tab = 0; tab < head; ++tab) {
      ++checked;
      const Int got = evaluator.value(tab, head);
      const Int want = restricted_count(tab, head - tab);
      if (got != want) {
        if (disagreements == 0) {
          c.fail("parcel(tab " + std::to_string(tab) + ", head " +
                 std::to_string(head) + ") = " + to_decimal(got) +
                 ", restricted count is " + to_decimal(want));
        }
        ++disagreements;
      }
    }
  }
  if (disagreements == 0) {
    c.note("all " + std::to_string(checked) +
           " parcel values equal their restricted counts");
  } else {
    c.note(std::to_string(disagreements) + " of " + std::to_string(checked) +
           " pairs disagree");
  }
  return finish("2", "parcel values equal restricted counts through head 60",
                c, start, 5000);
}

const ExpansionNode* find_child(const ExpansionNode& node, long tab) {
  for (const auto& child : node.children) {
    if (child.tab == tab) return &child;
  }
  return nullptr;
}

CheckResult check_trace_structure(int bias) {
  const auto start = Clock::now();
  Collector c;

  const TraceDocument doc = build_trace(10, TailVariant::Full, Limits{}, bias);
  c.require(doc.roots.size() == 10,
            "expected 10 top-level terms, got " +
                std::to_string(doc.roots.size()));

  // Top level: tabs 0..5 stay leaves; tabs 6..9 expand into cells with
  // 2, 4, 6, 8 children.
  const long expected_children[] = {0, 0, 0, 0, 0, 0, 2, 4, 6, 8};
  for (size_t i = 0; i < doc.roots.size() && i < 10; ++i) {
    const ExpansionNode& node = doc.roots[i];
    const long tab = static_cast<long>(i);
    if (node.tab != tab) {
      c.fail("top-level term " + std::to_string(i) + " has tab " +
             std::to_string(node.tab));
      continue;
    }
    const long want = expected_children[i];
    const bool want_cell = want > 0;
    const bool is_cell = node.kind == ExpansionNode::Kind::Cell;
    if (is_cell != want_cell ||
        static_cast<long>(node.children.size()) != want) {
      c.fail("top-level tab " + std::to_string(tab) + " has " +
             std::to_string(node.children.size()) +
             " children, expected " + std::to_string(want));
    }
  }

  // The tab-9 cell must contain [p(7) - p(0) - p(1) - p(2) - p(3) -
  // [p(4) - p(0)]].
  if (doc.roots.size() == 10) {
    const ExpansionNode& tab9 = doc.roots[9];
    const ExpansionNode* inner = find_child(tab9, 7);
    if (inner == nullptr || inner->kind != ExpansionNode::Kind::Cell ||
        inner->children.size() != 5) {
      c.fail("tab-9 cell lacks the expected 5-child cell at tab 7");
    } else {
      for (long tab = 0; tab <= 3; ++tab) {
        const ExpansionNode* leaf = find_child(*inner, tab);
        if (leaf == nullptr || leaf->kind != ExpansionNode::Kind::Parcel) {
          c.fail("tab-7 cell child at tab " + std::to_string(tab) +
                 " is not a leaf");
        }
      }
      const ExpansionNode* deep = find_child(*inner, 4);
      if (deep == nullptr || deep->kind != ExpansionNode::Kind::Cell ||
          deep->children.size() != 1 || deep->children[0].tab != 0 ||
          deep->children[0].kind != ExpansionNode::Kind::Parcel) {
        c.fail("tab-7 cell lacks the nested [p(4) - p(0)] cell");
      }
    }
  }

  if (doc.total != 42) {
    c.fail("trace total is " + to_decimal(doc.total) + ", expected 42");
  }
  if (c.pass) {
    c.note("cells sit at tabs 6, 7, 8, 9 with 2, 4, 6, 8 children; the "
           "nested [p(7) - p(0) - p(1) - p(2) - p(3) - [p(4) - p(0)]] cell "
           "is present; total 42");
  }
  return finish("3", "structure and total of the full p(10) expansion", c,
                start, 0);
}

CheckResult check_derivations() {
  const auto start = Clock::now();
  Collector c;

  const PartitionTable table = build_table(40);
  for (const auto& pinned : pinned_recurrences()) {
    const auto one_start = Clock::now();
    const Recurrence derived =
        derive_recurrence(pinned.cap, pinned.v_pn, pinned.v_pn1);
    const long one_ms = elapsed_ms(one_start);
    if (one_ms >= 1000) {
      c.fail(pinned.name + " took " + std::to_string(one_ms) + " ms");
    }
    if (canonical_key(derived.rhs) == canonical_key(pinned.reference.rhs)) {
      c.note(pinned.name + " reproduces its pinned set");
      continue;
    }
    c.fail(pinned.name + " produced\n  " + render_recurrence(derived) +
           "\nbut the pinned reference set is\n  " +
           render_recurrence(pinned.reference));
    const VerificationReport report =
        verify(pinned.reference, 0, pinned.cap, table);
    if (!report.claimed_ok && report.first_fail) {
      const auto& f = *report.first_fail;
      c.note("note: the pinned set is itself numerically false at n = " +
             std::to_string(f.n) + " (p(" + std::to_string(f.n) + ") = " +
             to_decimal(f.lhs) + ", its rhs = " + to_decimal(f.rhs) +
             "), so no derivation that is correct on the claimed range can "
             "reproduce it");
    }
  }
  return finish("4", "fixed derivations reproduce pinned coefficient sets", c,
                start, 0);
}

CheckResult check_verification() {
  const auto start = Clock::now();
  Collector c;

  const PartitionTable table = build_table(40);
  for (const auto& pinned : pinned_recurrences()) {
    const VerificationReport report =
        verify(pinned.reference, 0, 40, table);
    if (!report.claimed_ok) {
      std::string message =
          pinned.name + " reference set fails inside its claimed range [" +
          std::to_string(pinned.reference.rhs.lo) + ", " +
          std::to_string(pinned.reference.rhs.hi) + "]";
      if (report.first_fail) {
        const auto& f = *report.first_fail;
        message += ": at n = " + std::to_string(f.n) + ", p(n) = " +
                   to_decimal(f.lhs) + " but the rhs gives " +
                   to_decimal(f.rhs);
      }
      c.fail(message);
      continue;
    }
    if (pinned.expected_first_fail) {
      if (!report.first_fail) {
        c.fail(pinned.name + ": no failure up to 40, expected the first at " +
               std::to_string(*pinned.expected_first_fail));
      } else if (report.first_fail->n != *pinned.expected_first_fail) {
        c.fail(pinned.name + ": first failure at n = " +
               std::to_string(report.first_fail->n) + ", expected " +
               std::to_string(*pinned.expected_first_fail));
      } else {
        c.note(pinned.name + " holds on its claimed range; scan to 40 "
               "first fails at n = " +
               std::to_string(report.first_fail->n));
      }
    } else {
      c.note(pinned.name + " holds on its claimed range");
    }
  }
  return finish("5", "pinned recurrences verify on their claimed ranges", c,
                start, 0);
}

CheckResult check_classification() {
  const auto start = Clock::now();
  Collector c;

  const auto pinned = pinned_recurrences();
  const struct {
    size_t index;
    PentagonalClass expected;
  } cases[] = {
      {0, PentagonalClass::ExactTruncation},  // derive(12, one, one)
      {1, PentagonalClass::ExactTruncation},  // derive(24, one, one)
      {2, PentagonalClass::Unrelated},        // derive(24, none, none) pin
  };
  for (const auto& cse : cases) {
    const PentagonalClass got = classify_pentagonal(pinned[cse.index].reference);
    if (got == cse.expected) {
      c.note(pinned[cse.index].name + " reference classifies as " +
             to_string(got));
    } else {
      c.fail(pinned[cse.index].name + " reference classifies as " +
             to_string(got) + ", expected " + to_string(cse.expected));
    }
  }
  return finish("6", "pentagonal classification of pinned recurrences", c,
                start, 0);
}

CheckResult check_mining() {
  const auto start = Clock::now();
  Collector c;

  std::vector<long> caps;
  for (long cap = 12; cap <= 24; ++cap) caps.push_back(cap);
  const MiningResult result = mine(caps, all_variant_pairs(), 60);

  c.require(result.jobs == 117,
            "expected 117 jobs, ran " + std::to_string(result.jobs));
  c.require(result.errors.empty(),
            std::to_string(result.errors.size()) + " jobs errored (first: " +
                (result.errors.empty() ? "" : result.errors.front()) + ")");
  if (static_cast<long>(result.entries.size()) < 20) {
    c.fail("only " + std::to_string(result.entries.size()) +
           " distinct recurrences, expected at least 20");
  }
  if (!result.anomalies.empty()) {
    const auto& a = result.anomalies.front();
    c.fail(std::to_string(result.anomalies.size()) +
           " derived recurrences fail inside their claimed ranges (first: "
           "cap " +
           std::to_string(a.provenance.cap) + ", " +
           to_string(a.provenance.v_pn) + "/" + to_string(a.provenance.v_pn1) +
           " at n = " + std::to_string(a.n) + ")");
  }
  if (c.pass) {
    c.note(std::to_string(result.entries.size()) +
           " distinct recurrences from 117 jobs, zero anomalies");
  }
  return finish("7", "mining caps 12..24 is anomaly-free and productive", c,
                start, 60000);
}

CheckResult check_oracle_independence() {
  const auto start = Clock::now();
  Collector c;

  const PartitionTable direct = build_table(1000);
  const PartitionTable series = build_table_pentagonal(1000);
  long disagreements = 0;
  for (long n = 0; n <= 1000; ++n) {
    if (direct.at(n) != series.at(n)) {
      if (disagreements == 0) {
        c.fail("first disagreement at n = " + std::to_string(n) +
               ": direct " + to_decimal(direct.at(n)) + ", series " +
               to_decimal(series.at(n)));
      }
      ++disagreements;
    }
  }
  if (direct.at(100) != Int("190569292")) {
    c.fail("p(100) = " + to_decimal(direct.at(100)) +
           ", expected 190569292");
  }
  if (c.pass) {
    c.note("both constructions agree for 0 <= n <= 1000; p(100) = "
           "190569292");
  }
  return finish("8", "independent partition tables agree through 1000", c,
                start, 5000);
}

}  // namespace

std::vector<CheckResult> run_acceptance_checks(const SelftestOptions& options) {
  const int bias = options.mutate_generator ? 1 : 0;

  std::vector<CheckResult> results;
  const struct {
    const char* id;
    const char* label;
    CheckResult (*run)(int);
  } generator_checks[] = {
      {"1", "point values and oracle agreement to 300", &check_point_values},
      {"2", "parcel values equal restricted counts through head 60",
       &check_parcel_semantics},
      {"3", "structure and total of the full p(10) expansion",
       &check_trace_structure},
  };
  for (const auto& check : generator_checks) {
    try {
      results.push_back(check.run(bias));
    } catch (const std::exception& e) {
      CheckResult r;
      r.id = check.id;
      r.label = check.label;
      r.pass = false;
      r.detail = std::string("fail: unexpected exception: ") + e.what();
      results.push_back(std::move(r));
    }
  }

  const struct {
    const char* id;
    const char* label;
    CheckResult (*run)();
  } fixed_checks[] = {
      {"4", "fixed derivations reproduce pinned coefficient sets",
       &check_derivations},
      {"5", "pinned recurrences verify on their claimed ranges",
       &check_verification},
      {"6", "pentagonal classification of pinned recurrences",
       &check_classification},
      {"7", "mining caps 12..24 is anomaly-free and productive",
       &check_mining},
      {"8", "independent partition tables agree through 1000",
       &check_oracle_independence},
  };
  for (const auto& check : fixed_checks) {
    try {
      results.push_back(check.run());
    } catch (const std::exception& e) {
      CheckResult r;
      r.id = check.id;
      r.label = check.label;
      r.pass = false;
      r.detail = std::string("fail: unexpected exception: ") + e.what();
      results.push_back(std::move(r));
    }
  }
  return results;
}

}  // namespace partlab
