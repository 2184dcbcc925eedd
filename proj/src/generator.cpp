#include "partlab/generator.hpp"

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "partlab/errors.hpp"

namespace partlab {

std::string to_string(TailVariant v) {
  switch (v) {
    case TailVariant::Full:
      return "none";
    case TailVariant::OneSub:
      return "one";
    case TailVariant::TwoSub:
      return "two";
  }
  throw std::logic_error("unreachable tail variant");
}

TailVariant tail_variant_from_string(const std::string& s) {
  if (s == "none") return TailVariant::Full;
  if (s == "one") return TailVariant::OneSub;
  if (s == "two") return TailVariant::TwoSub;
  throw std::invalid_argument("unknown tail variant '" + s +
                              "' (expected none, one or two)");
}

long child_count(long tau, long head, int bias) {
  const long lambda = 2 * tau - head + bias;
  return lambda > 0 ? lambda : 0;
}

ParcelEvaluator::ParcelEvaluator(const PartitionTable& table, int bias)
    : table_(&table), bias_(bias) {}

Int ParcelEvaluator::value(long tab, long head) {
  if (tab < 0 || tab >= head) {
    throw std::invalid_argument("parcel value: requires 0 <= tab < head, got "
                                "tab = " + std::to_string(tab) +
                                ", head = " + std::to_string(head));
  }
  if (tab > table_->limit) {
    throw std::invalid_argument("parcel value: table of limit " +
                                std::to_string(table_->limit) +
                                " cannot expand p(" + std::to_string(tab) +
                                ")");
  }
  const std::pair<long, long> key{tab, head - tab};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  Int v = table_->values[static_cast<size_t>(tab)];
  const long lambda = child_count(tab, head, bias_);
  for (long k = 0; k < lambda; ++k) {
    v -= value(k, tab);
  }
  return memo_.emplace(key, std::move(v)).first->second;
}

Int parcel_value(long tab, long head, const PartitionTable& table) {
  return ParcelEvaluator(table).value(tab, head);
}

namespace {

// Bottom-up fractal state. rows[t][j] holds the running sum of the first j
// child-parcel values under head t, so a parcel value is a constant-time
// lookup: value(tau under head) = values[tau] - rows[tau][lambda]. The row
// prefix is keyed by (tau, lambda), which carries the same information as
// (tau, head - tau).
struct FractalBuilder {
  int bias;
  std::vector<Int> values;
  std::vector<std::vector<Int>> rows;

  Int parcel(long tau, long head) {
    const long lambda = child_count(tau, head, bias);
    extend_row(tau, lambda);
    return values[static_cast<size_t>(tau)] -
           rows[static_cast<size_t>(tau)][static_cast<size_t>(lambda)];
  }

  void extend_row(long tau, long upto) {
    auto& row = rows[static_cast<size_t>(tau)];
    while (static_cast<long>(row.size()) <= upto) {
      const long k = static_cast<long>(row.size()) - 1;  // next child tab
      Int next = row.back() + parcel(k, tau);
      row.push_back(std::move(next));
    }
  }
};

}  // namespace

std::vector<Int> fractal_values(long n, const Limits& limits, int bias) {
  if (n < 0) throw std::invalid_argument("fractal_values: negative n");
  if (n > limits.max_fractal) {
    throw ResourceLimitError("fractal_values: n = " + std::to_string(n) +
                             " exceeds the configured maximum of " +
                             std::to_string(limits.max_fractal));
  }
  FractalBuilder b{bias, {}, {}};
  b.values.reserve(static_cast<size_t>(n) + 1);
  b.values.emplace_back(1);
  b.rows.push_back({Int(0)});
  for (long i = 1; i <= n; ++i) {
    Int pi(0);
    for (long j = 0; j < i; ++j) {
      pi += b.parcel(j, i);
    }
    b.values.push_back(std::move(pi));
    b.rows.push_back({Int(0)});
  }
  return std::move(b.values);
}

Int fractal_p(long n, const Limits& limits, int bias) {
  return fractal_values(n, limits, bias).back();
}

namespace {

struct TraceBuilder {
  int bias;
  long budget;
  long count = 0;

  ExpansionNode make(long tab, long head) {
    if (++count > budget) {
      throw ResourceLimitError(
          "build_trace: node budget of " + std::to_string(budget) +
          " exceeded");
    }
    ExpansionNode node;
    node.tab = tab;
    const long lambda = child_count(tab, head, bias);
    if (lambda <= 0) {
      node.kind = ExpansionNode::Kind::Parcel;
      return node;
    }
    node.kind = ExpansionNode::Kind::Cell;
    node.children.reserve(static_cast<size_t>(lambda));
    for (long k = 0; k < lambda; ++k) {
      node.children.push_back(make(k, tab));
    }
    return node;
  }
};

Int node_value(const ExpansionNode& node, const PartitionTable& table) {
  Int v = table.at(node.tab);
  for (const auto& child : node.children) {
    v -= node_value(child, table);
  }
  return v;
}

long node_depth(const ExpansionNode& node) {
  long deepest = 0;
  for (const auto& child : node.children) {
    const long d = node_depth(child);
    if (d > deepest) deepest = d;
  }
  return deepest + 1;
}

}  // namespace

TraceDocument build_trace(long n, TailVariant variant, const Limits& limits,
                          int bias) {
  if (n < 0) throw std::invalid_argument("build_trace: negative n");
  if (variant != TailVariant::Full && n < 2) {
    throw std::invalid_argument(
        "build_trace: tail substitutions require n >= 2");
  }
  TraceDocument doc;
  doc.n = n;
  doc.variant = variant;

  long top = n - 1;
  if (variant == TailVariant::OneSub) top = n - 2;
  if (variant == TailVariant::TwoSub) top = n - 3;

  TraceBuilder builder{bias, limits.max_trace_nodes};
  for (long tab = 0; tab <= top; ++tab) {
    doc.roots.push_back(builder.make(tab, n));
  }
  doc.node_count = builder.count;

  if (variant == TailVariant::TwoSub) {
    const std::string label = (n % 2 == 0)
                                  ? std::to_string(n) + "/2"
                                  : "(" + std::to_string(n) + "-1)/2";
    doc.tail_terms.emplace_back(label, Int(n / 2));
  }
  if (variant != TailVariant::Full) {
    doc.tail_terms.emplace_back("1", Int(1));
  }

  const PartitionTable table = build_table(n, limits);
  Int total(0);
  for (const auto& root : doc.roots) {
    total += node_value(root, table);
  }
  for (const auto& term : doc.tail_terms) {
    total += term.second;
  }
  // n = 0 has no top-level parcels at all; the document still reports the
  // conventional p(0) = 1 rather than an empty sum.
  if (n == 0) total = 1;
  doc.total = std::move(total);

  long deepest = 0;
  for (const auto& root : doc.roots) {
    const long d = node_depth(root);
    if (d > deepest) deepest = d;
  }
  doc.steps = deepest + 1;
  return doc;
}

namespace {

void append_term(const ExpansionNode& node, std::string& out) {
  if (node.kind == ExpansionNode::Kind::Parcel) {
    out += "p(" + std::to_string(node.tab) + ")";
    return;
  }
  out += "[p(" + std::to_string(node.tab) + ")";
  for (const auto& child : node.children) {
    out += " - ";
    append_term(child, out);
  }
  out += "]";
}

}  // namespace

std::string render_trace(const TraceDocument& doc) {
  const std::string lhs = "p(" + std::to_string(doc.n) + ") = ";
  if (doc.roots.empty() && doc.tail_terms.empty()) {
    return lhs + to_decimal(doc.total) + "\n";
  }

  std::string expr;
  bool first = true;
  for (const auto& root : doc.roots) {
    if (!first) expr += " + ";
    append_term(root, expr);
    first = false;
  }
  for (const auto& term : doc.tail_terms) {
    if (!first) expr += " + ";
    expr += term.first;
    first = false;
  }

  // Greedy wrap on token boundaries at 80 columns, continuation lines
  // indented four spaces; the total goes on its own final line.
  constexpr size_t kWidth = 80;
  const std::string indent = "    ";
  std::string out;
  std::string line = lhs;
  bool line_has_token = false;
  std::istringstream tokens(expr);
  std::string token;
  while (tokens >> token) {
    if (!line_has_token) {
      line += token;
      line_has_token = true;
    } else if (line.size() + 1 + token.size() <= kWidth) {
      line += " " + token;
    } else {
      out += line + "\n";
      line = indent + token;
    }
  }
  out += line + "\n";
  out += indent + "= " + to_decimal(doc.total) + "\n";
  return out;
}

namespace {

nlohmann::ordered_json node_to_json(const ExpansionNode& node) {
  nlohmann::ordered_json j;
  j["kind"] =
      node.kind == ExpansionNode::Kind::Parcel ? "parcel" : "cell";
  j["tab"] = node.tab;
  if (node.kind == ExpansionNode::Kind::Cell) {
    auto children = nlohmann::ordered_json::array();
    for (const auto& child : node.children) {
      children.push_back(node_to_json(child));
    }
    j["children"] = std::move(children);
  }
  return j;
}

}  // namespace

std::string trace_to_json(const TraceDocument& doc) {
  nlohmann::ordered_json j;
  j["n"] = doc.n;
  j["variant"] = to_string(doc.variant);
  j["steps"] = doc.steps;
  j["nodes"] = doc.node_count;
  auto tree = nlohmann::ordered_json::array();
  for (const auto& root : doc.roots) {
    tree.push_back(node_to_json(root));
  }
  j["tree"] = std::move(tree);
  auto tail = nlohmann::ordered_json::array();
  for (const auto& [label, value] : doc.tail_terms) {
    tail.push_back({{"label", label}, {"value", to_decimal(value)}});
  }
  j["tail"] = std::move(tail);
  j["total"] = to_decimal(doc.total);
  return j.dump();
}

}  // namespace partlab
