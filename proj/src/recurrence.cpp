#include "partlab/recurrence.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "partlab/errors.hpp"

namespace partlab {

namespace {

using ordered_json = nlohmann::ordered_json;

void add_into(std::map<long, Int>& acc, const std::map<long, Int>& src,
              int sign) {
  for (const auto& [offset, coef] : src) {
    auto [slot, inserted] = acc.emplace(offset, sign > 0 ? coef : Int(-coef));
    if (!inserted) {
      if (sign > 0) {
        slot->second += coef;
      } else {
        slot->second -= coef;
      }
    }
  }
}

void prune_zeros(std::map<long, Int>& coeffs) {
  for (auto it = coeffs.begin(); it != coeffs.end();) {
    it = (it->second == 0) ? coeffs.erase(it) : std::next(it);
  }
}

}  // namespace

Recurrence derive_recurrence(long cap, TailVariant v_pn, TailVariant v_pn1) {
  if (cap < 3) {
    throw std::invalid_argument("derive_recurrence: cap must be >= 3");
  }
  const LinearForm a = expand_symbolic(cap, v_pn);
  const LinearForm b = shift_form(expand_symbolic(cap - 1, v_pn1), 1);

  Recurrence rec;
  rec.rhs.coeffs[1] = 1;  // the p(n-1) the difference is built around
  add_into(rec.rhs.coeffs, a.coeffs, +1);
  add_into(rec.rhs.coeffs, b.coeffs, -1);
  prune_zeros(rec.rhs.coeffs);
  rec.rhs.tail = a.tail - b.tail;
  rec.rhs.cap = cap;
  rec.rhs.lo = 2;
  rec.rhs.hi = cap;
  rec.provenance = Provenance{true, cap, v_pn, v_pn1};
  return rec;
}

VerificationReport verify(const Recurrence& rec, long window_lo,
                          long window_hi, const PartitionTable& table) {
  if (window_lo < 0 || window_hi < window_lo) {
    throw std::invalid_argument("verify: window must satisfy 0 <= lo <= hi");
  }
  if (window_hi > table.limit) {
    throw std::invalid_argument("verify: table does not cover the window");
  }

  VerificationReport report;
  report.window_lo = window_lo;
  report.window_hi = window_hi;
  report.pass.resize(static_cast<size_t>(window_hi - window_lo + 1));
  for (long n = window_lo; n <= window_hi; ++n) {
    report.pass[static_cast<size_t>(n - window_lo)] =
        evaluate_form(rec.rhs, n, table) == table.at(n);
  }

  const auto passes = [&](long n) {
    return report.pass[static_cast<size_t>(n - window_lo)];
  };

  const long claimed_lo = std::max(window_lo, rec.rhs.lo);
  const long claimed_hi = std::min(window_hi, rec.rhs.hi);
  report.claimed_ok = true;
  for (long n = claimed_lo; n <= claimed_hi; ++n) {
    if (!passes(n)) {
      report.claimed_ok = false;
      break;
    }
  }

  for (long n = std::max(window_lo, rec.rhs.lo); n <= window_hi; ++n) {
    if (!passes(n)) {
      report.first_fail = VerificationReport::Failure{
          n, table.at(n), evaluate_form(rec.rhs, n, table)};
      break;
    }
  }

  report.pass_lo = 0;
  report.pass_hi = -1;
  if (rec.rhs.lo >= window_lo && rec.rhs.lo <= window_hi &&
      passes(rec.rhs.lo)) {
    long lo = rec.rhs.lo;
    long hi = rec.rhs.lo;
    while (lo > window_lo && passes(lo - 1)) --lo;
    while (hi < window_hi && passes(hi + 1)) ++hi;
    report.pass_lo = lo;
    report.pass_hi = hi;
  }
  return report;
}

std::pair<long, long> empirical_validity(const Recurrence& rec, long scan_to,
                                         const PartitionTable& table) {
  if (scan_to < rec.rhs.hi) {
    throw std::invalid_argument(
        "empirical_validity: scan_to must reach the claimed upper bound");
  }
  const VerificationReport report = verify(rec, 0, scan_to, table);
  return {report.pass_lo, report.pass_hi};
}

namespace {

// Generalized pentagonal offsets 1, 2, 5, 7, 12, 15, 22, 26, ... paired
// with the alternating Euler signs +, +, -, -, +, +, ...
std::vector<std::pair<long, int>> pentagonal_prefix(long max_offset) {
  std::vector<std::pair<long, int>> out;
  for (long k = 1;; ++k) {
    const long g1 = k * (3 * k - 1) / 2;
    const long g2 = k * (3 * k + 1) / 2;
    const int sign = (k % 2 == 1) ? 1 : -1;
    if (g1 > max_offset) break;
    out.emplace_back(g1, sign);
    if (g2 > max_offset) break;
    out.emplace_back(g2, sign);
  }
  return out;
}

}  // namespace

std::string to_string(PentagonalClass c) {
  switch (c) {
    case PentagonalClass::ExactTruncation:
      return "exact-truncation";
    case PentagonalClass::TruncationWithExtras:
      return "truncation-with-extras";
    case PentagonalClass::Unrelated:
      return "unrelated";
  }
  return "unrelated";
}

PentagonalClass classify_pentagonal(const Recurrence& rec) {
  const auto& coeffs = rec.rhs.coeffs;
  if (coeffs.empty()) return PentagonalClass::Unrelated;

  const long max_offset = coeffs.rbegin()->first;
  const auto pent = pentagonal_prefix(max_offset);

  // The pentagonal offsets present must be exactly pent[0..m) for some
  // m >= 1, each carrying its Euler sign with unit magnitude.
  size_t m = 0;
  bool broken = false;
  for (size_t i = 0; i < pent.size(); ++i) {
    const auto it = coeffs.find(pent[i].first);
    if (it == coeffs.end()) {
      // Every later pentagonal offset must be absent too.
      for (size_t j = i + 1; j < pent.size(); ++j) {
        if (coeffs.count(pent[j].first)) broken = true;
      }
      break;
    }
    if (it->second != pent[i].second) {
      broken = true;
      break;
    }
    m = i + 1;
  }
  if (broken || m == 0) return PentagonalClass::Unrelated;

  const bool extras = coeffs.size() > m || !rec.rhs.tail.is_zero();
  return extras ? PentagonalClass::TruncationWithExtras
                : PentagonalClass::ExactTruncation;
}

std::string canonical_key(const LinearForm& form) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [offset, coef] : form.coeffs) {
    if (!first) out << ",";
    out << offset << ":" << to_decimal(coef);
    first = false;
  }
  out << "|e:" << to_decimal(form.tail.even_c0) << ","
      << to_decimal(form.tail.even_c1);
  out << "|o:" << to_decimal(form.tail.odd_c0) << ","
      << to_decimal(form.tail.odd_c1);
  return out.str();
}

std::vector<std::pair<TailVariant, TailVariant>> all_variant_pairs() {
  const TailVariant all[] = {TailVariant::Full, TailVariant::OneSub,
                             TailVariant::TwoSub};
  std::vector<std::pair<TailVariant, TailVariant>> out;
  for (TailVariant a : all) {
    for (TailVariant b : all) out.emplace_back(a, b);
  }
  return out;
}

MiningResult mine(
    const std::vector<long>& caps,
    const std::vector<std::pair<TailVariant, TailVariant>>& pairs,
    long scan_to, const Limits& limits) {
  if (scan_to < 3) {
    throw std::invalid_argument("mine: scan_to must be >= 3");
  }
  if (scan_to > limits.max_scan) {
    throw ResourceLimitError("mine: scan_to " + std::to_string(scan_to) +
                             " exceeds the limit of " +
                             std::to_string(limits.max_scan));
  }
  const PartitionTable table = build_table(scan_to, limits);

  MiningResult result;
  std::vector<std::string> seen_keys;
  for (long cap : caps) {
    for (const auto& [v_pn, v_pn1] : pairs) {
      ++result.jobs;
      const std::string job = "cap=" + std::to_string(cap) +
                              " pn=" + to_string(v_pn) +
                              " pn1=" + to_string(v_pn1);
      try {
        if (cap > scan_to) {
          throw std::invalid_argument("scan_to is below the cap");
        }
        const Recurrence rec = derive_recurrence(cap, v_pn, v_pn1);
        const VerificationReport report = verify(rec, 0, scan_to, table);
        if (!report.claimed_ok) {
          const auto& f = *report.first_fail;
          result.anomalies.push_back(
              MiningResult::Anomaly{rec.provenance, f.n, f.lhs, f.rhs});
          continue;
        }
        const std::string key = canonical_key(rec.rhs);
        if (std::find(seen_keys.begin(), seen_keys.end(), key) !=
            seen_keys.end()) {
          continue;
        }
        seen_keys.push_back(key);
        CatalogEntry entry;
        entry.rec = rec;
        entry.key = key;
        entry.empirical_lo = report.pass_lo;
        entry.empirical_hi = report.pass_hi;
        entry.classification = classify_pentagonal(rec);
        result.entries.push_back(std::move(entry));
      } catch (const ResourceLimitError& e) {
        result.errors.push_back(job + ": " + e.what());
      } catch (const std::invalid_argument& e) {
        result.errors.push_back(job + ": " + e.what());
      } catch (const std::logic_error& e) {
        result.errors.push_back(job + ": " + e.what());
      }
    }
  }
  std::sort(result.entries.begin(), result.entries.end(),
            [](const CatalogEntry& a, const CatalogEntry& b) {
              return a.key < b.key;
            });
  return result;
}

std::string render_recurrence(const Recurrence& rec) {
  return render_form(rec.rhs);
}

std::string catalog_record(const CatalogEntry& entry) {
  ordered_json record;
  record["key"] = entry.key;

  ordered_json coefficients = ordered_json::array();
  for (const auto& [offset, coef] : entry.rec.rhs.coeffs) {
    coefficients.push_back({offset, to_decimal(coef)});
  }
  record["coefficients"] = std::move(coefficients);

  const auto& tail = entry.rec.rhs.tail;
  record["tail"] = {
      {"even", {to_decimal(tail.even_c0), to_decimal(tail.even_c1)}},
      {"odd", {to_decimal(tail.odd_c0), to_decimal(tail.odd_c1)}}};
  record["claimed"] = {entry.rec.rhs.lo, entry.rec.rhs.hi};
  record["empirical"] = {entry.empirical_lo, entry.empirical_hi};

  ordered_json provenance;
  if (entry.rec.provenance.derived) {
    provenance["kind"] = "derived";
    provenance["cap"] = entry.rec.provenance.cap;
    provenance["pn"] = to_string(entry.rec.provenance.v_pn);
    provenance["pn1"] = to_string(entry.rec.provenance.v_pn1);
  } else {
    provenance["kind"] = "external";
  }
  record["provenance"] = std::move(provenance);
  record["classification"] = to_string(entry.classification);
  return record.dump();
}

namespace {

PentagonalClass classification_from_string(const std::string& s) {
  if (s == "exact-truncation") return PentagonalClass::ExactTruncation;
  if (s == "truncation-with-extras")
    return PentagonalClass::TruncationWithExtras;
  if (s == "unrelated") return PentagonalClass::Unrelated;
  throw std::invalid_argument("unknown classification: '" + s + "'");
}

Int int_from_string(const std::string& s) {
  try {
    return Int(s, 10);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("malformed integer: '" + s + "'");
  }
}

}  // namespace

CatalogEntry catalog_entry_from_json(const std::string& line) {
  ordered_json record;
  try {
    record = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed catalog line: ") +
                                e.what());
  }

  try {
    CatalogEntry entry;
    entry.key = record.at("key").get<std::string>();

    LinearForm& rhs = entry.rec.rhs;
    for (const auto& pair : record.at("coefficients")) {
      const long offset = pair.at(0).get<long>();
      const Int coef = int_from_string(pair.at(1).get<std::string>());
      if (offset < 1 || rhs.coeffs.count(offset)) {
        throw std::invalid_argument("bad coefficient offset " +
                                    std::to_string(offset));
      }
      if (coef != 0) rhs.coeffs.emplace(offset, coef);
    }
    const auto& tail = record.at("tail");
    rhs.tail.even_c0 = rat_from_string(tail.at("even").at(0));
    rhs.tail.even_c1 = rat_from_string(tail.at("even").at(1));
    rhs.tail.odd_c0 = rat_from_string(tail.at("odd").at(0));
    rhs.tail.odd_c1 = rat_from_string(tail.at("odd").at(1));
    rhs.lo = record.at("claimed").at(0).get<long>();
    rhs.hi = record.at("claimed").at(1).get<long>();

    const auto& provenance = record.at("provenance");
    if (provenance.at("kind").get<std::string>() == "derived") {
      entry.rec.provenance.derived = true;
      entry.rec.provenance.cap = provenance.at("cap").get<long>();
      entry.rec.provenance.v_pn =
          tail_variant_from_string(provenance.at("pn").get<std::string>());
      entry.rec.provenance.v_pn1 =
          tail_variant_from_string(provenance.at("pn1").get<std::string>());
      rhs.cap = entry.rec.provenance.cap;
    } else {
      entry.rec.provenance.derived = false;
      rhs.cap = rhs.coeffs.empty() ? 0 : rhs.coeffs.rbegin()->first;
    }

    entry.empirical_lo = record.at("empirical").at(0).get<long>();
    entry.empirical_hi = record.at("empirical").at(1).get<long>();
    entry.classification = classification_from_string(
        record.at("classification").get<std::string>());
    return entry;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed catalog line: ") +
                                e.what());
  }
}

Recurrence recurrence_from_coeff_spec(const std::string& coeffs,
                                      const std::string& tail_even,
                                      const std::string& tail_odd, long lo,
                                      long hi) {
  if (lo < 0 || hi < lo) {
    throw std::invalid_argument(
        "recurrence spec: claimed range must satisfy 0 <= lo <= hi");
  }

  Recurrence rec;
  rec.provenance.derived = false;

  std::istringstream stream(coeffs);
  std::string term;
  while (std::getline(stream, term, ',')) {
    const auto colon = term.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("malformed coefficient term: '" + term +
                                  "' (expected offset:coef)");
    }
    const std::string offset_text = term.substr(0, colon);
    long offset = 0;
    try {
      size_t used = 0;
      offset = std::stol(offset_text, &used);
      if (used != offset_text.size()) throw std::invalid_argument(offset_text);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed offset: '" + offset_text + "'");
    }
    if (offset < 1) {
      throw std::invalid_argument("offsets must be >= 1, got " +
                                  std::to_string(offset));
    }
    if (rec.rhs.coeffs.count(offset)) {
      throw std::invalid_argument("duplicate offset " +
                                  std::to_string(offset));
    }
    const Int coef = int_from_string(term.substr(colon + 1));
    if (coef != 0) rec.rhs.coeffs.emplace(offset, coef);
  }

  const auto parse_tail = [](const std::string& text, Rat& c0, Rat& c1) {
    if (text.empty()) {
      c0 = 0;
      c1 = 0;
      return;
    }
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("malformed tail '" + text +
                                  "' (expected c0,c1)");
    }
    c0 = rat_from_string(text.substr(0, comma));
    c1 = rat_from_string(text.substr(comma + 1));
  };
  parse_tail(tail_even, rec.rhs.tail.even_c0, rec.rhs.tail.even_c1);
  parse_tail(tail_odd, rec.rhs.tail.odd_c0, rec.rhs.tail.odd_c1);

  rec.rhs.lo = lo;
  rec.rhs.hi = hi;
  rec.rhs.cap = rec.rhs.coeffs.empty() ? 0 : rec.rhs.coeffs.rbegin()->first;
  return rec;
}

}  // namespace partlab
